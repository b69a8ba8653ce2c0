// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/cli.hpp"

#include <algorithm>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "skingen/backends.hpp"
#include "skingen/evaluation.hpp"
#include "skingen/generation.hpp"
#include "skingen/http_api.hpp"
#include "skingen/image_io.hpp"
#include "skingen/service.hpp"
#include "skingen/study.hpp"
#include "skingen/synthetic.hpp"

namespace skingen::cli {

namespace fs = std::filesystem;

std::vector<DatasetRecord> default_synthetic_corpus(DatasetTag dataset, std::uint64_t seed) {
    if (dataset == DatasetTag::f17k) {
        const auto& vocab = ConditionVocabulary::fitzpatrick17k();
        const std::vector<std::string> labels(vocab.names().begin(), vocab.names().end());
        const auto counts = synthetic_label_counts(labels.size(), 52, 653, seed, 16576);
        return synthetic_corpus(dataset, labels, counts, seed);
    }
    const auto labels = synthetic_labels(400, "scin condition");
    const auto counts = synthetic_label_counts(labels.size(), 1, 600, seed, 7798);
    return synthetic_corpus(dataset, labels, counts, seed);
}

namespace {

struct Globals {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
};

// Backends and vocabulary resolved from --config (stubs without one).
struct Context {
    ServiceConfig service;
    ConditionVocabulary vocab;
    std::optional<BackendRegistry> registry;
    BackendSet backends;

    explicit Context(const Globals& g)
        : service(ServiceConfig::load(g.config.empty() ? std::nullopt : std::optional<fs::path>(g.config))),
          vocab(service.vocabulary ? ConditionVocabulary::load(*service.vocabulary)
                                   : ConditionVocabulary::fitzpatrick17k()) {
        if (service.backends) {
            registry.emplace(BackendConfig::load(*service.backends), vocab, g.seed);
            backends = registry->build();
        } else {
            backends = BackendSet::stubs(vocab, g.seed);
        }
    }

    std::shared_ptr<const GeneratorBackend> generator_for(const std::string& model) const {
        if (registry) return registry->generator_for_model(model);
        return std::make_shared<StubGenerator>(model);
    }
};

std::string model_name(const DatasetSubset& subset) {
    return fmt::format("{}_{}{}", display_name(subset.dataset), to_string(subset.tier),
                       subset.mode == CaptionMode::blip ? "_blip" : "");
}

std::string label_of(const SubsetItem& item) { return Caption::parse(item.caption).label; }

void emit(std::ostream& out, const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        out << text;
    } else {
        write_file(out_path, text);
        out << fmt::format("wrote {}\n", out_path);
    }
}

// --- prep -------------------------------------------------------------------

struct PrepArgs {
    std::string dataset = "f17k";
    std::string tier = "every";
    std::string mode = "both";
    std::string index;
    std::string image_root;
};

int run_prep(const Globals& g, const PrepArgs& a, std::ostream& out) {
    std::vector<DatasetTag> datasets;
    if (to_lower(a.dataset) == "both" || to_lower(a.dataset) == "every")
        datasets = {DatasetTag::f17k, DatasetTag::scin};
    else
        datasets = {dataset_from_string(a.dataset)};
    std::vector<ScaleTier> tiers(std::begin(kAllTiers), std::end(kAllTiers));
    if (a.tier != "every") tiers = {tier_from_string(a.tier)};
    std::vector<CaptionMode> modes(std::begin(kAllModes), std::end(kAllModes));
    if (a.mode != "both") modes = {mode_from_string(a.mode)};
    require(a.index.empty() || datasets.size() == 1, "--index needs a single --dataset");

    std::optional<Context> ctx;
    Describer describer;
    if (!a.image_root.empty()) {
        ctx.emplace(g);
        describer = [&](const DatasetRecord& r) {
            return ctx->backends.captioner->describe(
                read_image_file(fs::path(a.image_root) / r.image_ref, r.image_ref));
        };
    }

    const fs::path out_dir = g.out.empty() ? fs::path("manifests") : fs::path(g.out);
    for (DatasetTag dataset : datasets) {
        const auto records = a.index.empty() ? default_synthetic_corpus(dataset, 0)
                                             : load_dataset_index(a.index, dataset);
        for (ScaleTier tier : tiers) {
            for (CaptionMode mode : modes) {
                const auto subset = build_subset(records, dataset, tier, mode, g.seed, describer);
                const auto path = emit_manifest(subset, TrainConfig::for_tier(tier), out_dir);
                out << fmt::format("{} {} items -> {}\n", subset.name, subset.items.size(), path.string());
            }
        }
    }
    return 0;
}

// --- ingest -----------------------------------------------------------------

int run_ingest(const Globals& g, const std::string& folder, std::ostream& out) {
    Context ctx(g);
    const fs::path out_dir = g.out.empty() ? fs::path("casedb") : fs::path(g.out);
    const auto db = ingest_case_folder(folder, out_dir, *ctx.backends.captioner, *ctx.backends.semantic_embedder,
                                       ctx.service.backends ? "configured" : "stub");
    out << fmt::format("ingested {} cases -> {}\n", db.size(), (out_dir / "cases.jsonl").string());
    return 0;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
    std::string subset;
    std::size_t pairs = kDefaultEvalPairs;
    std::string image_root;
    std::string published;
    std::string dataset = "f17k";
};

ImageLoader make_loader(const std::string& image_root, std::uint64_t seed) {
    if (!image_root.empty())
        return [root = fs::path(image_root)](const SubsetItem& item) {
            return read_image_file(root / item.image_ref, item.image_ref);
        };
    return [seed](const SubsetItem& item) {
        return synthetic_image(item.image_ref, label_of(item), kEvalResolution, seed);
    };
}

int run_eval(const Globals& g, const EvalArgs& a, std::ostream& out) {
    if (!a.published.empty()) {
        emit(out, g.out, published_report(dataset_from_string(a.published)).to_csv());
        return 0;
    }
    Context ctx(g);
    const auto loader = make_loader(a.image_root, g.seed);
    auto score = [&](const DatasetSubset& subset, const std::string& model, const std::string& name) {
        const auto generator = ctx.generator_for(model);
        const auto pairs = sample_eval_pairs(subset, std::min(a.pairs, subset.items.size()), g.seed, *generator, loader);
        return evaluate_model(pairs, name, *ctx.backends.semantic_embedder, *ctx.backends.structural_embedder);
    };

    if (!a.subset.empty()) {
        const Manifest m = load_manifest(a.subset);
        require(a.pairs <= m.subset.items.size(),
                fmt::format("--pairs {} exceeds subset size {}", a.pairs, m.subset.items.size()));
        const MetricRow row = score(m.subset, m.subset.name, model_name(m.subset));
        emit(out, g.out,
             fmt::format("model_name,clip,dino,mse\n{},{},{},{}\n", row.model_name, format_metric(row.clip),
                         format_metric(row.dino), format_metric(row.mse)));
        return 0;
    }

    // Stub run over a synthetic corpus: base model plus the six trained subsets.
    const DatasetTag dataset = dataset_from_string(a.dataset);
    const auto records = default_synthetic_corpus(dataset, 0);
    const auto subsets = build_all_subsets(records, dataset, g.seed);
    MetricReport report;
    report.dataset = std::string(display_name(dataset));
    const auto& base_subset = *std::find_if(subsets.begin(), subsets.end(), [](const auto& s) {
        return s.tier == ScaleTier::all && s.mode == CaptionMode::label_only;
    });
    report.zero_shot = score(base_subset, "base", "0-shot");
    for (const auto& subset : subsets)
        report.trained.push_back({subset.tier, subset.mode, score(subset, subset.name, model_name(subset))});
    emit(out, g.out, report.to_csv());
    return 0;
}

// --- fusion-compare ---------------------------------------------------------

int run_fusion(const Globals& g, const std::string& image_path, const std::string& caption_text,
               const std::string& model, std::ostream& out) {
    Context ctx(g);
    const SkinImage reference = read_image_file(image_path, fs::path(image_path).stem().string());
    const Caption caption = Caption::parse(caption_text);
    const auto generator = ctx.generator_for(model);
    const auto gallery = run_fusion_comparison(reference, caption, *generator, g.seed);
    const fs::path out_dir = g.out.empty() ? fs::path("fusion") : fs::path(g.out);
    int slot = 0;
    bool any_failed = false;
    for (const auto& s : gallery) {
        ++slot;
        if (s.image) {
            const auto path = out_dir / fmt::format("{}-{}.png", slot, to_string(s.strategy));
            write_png_file(path, *s.image);
            out << fmt::format("{} {} image_prompt={} -> {}\n", slot, to_string(s.strategy),
                               s.used_image_prompt ? "yes" : "no", path.string());
        } else {
            any_failed = true;
            out << fmt::format("{} {} failed: {}\n", slot, to_string(s.strategy), s.error->message);
        }
    }
    return any_failed ? 1 : 0;
}

// --- study ------------------------------------------------------------------

int run_study_report(const Globals& g, const std::string& in, std::ostream& out) {
    const auto sessions = load_sessions(in);
    const auto text = demographics_csv(demographics_table(sessions)) + "\n" + aggregate_csv(aggregate(sessions));
    emit(out, g.out, text);
    return 0;
}

// --- serve ------------------------------------------------------------------

int run_serve(const Globals& g, std::optional<int> port, bool seed_given, std::ostream& out) {
    ServiceConfig config =
        ServiceConfig::load(g.config.empty() ? std::nullopt : std::optional<fs::path>(g.config));
    if (port) config.port = *port;
    if (seed_given) config.seed = g.seed;
    if (!g.out.empty()) config.data_dir = g.out;
    auto service = ChatService::from_config(config);
    out << fmt::format("listening on http://{}:{}\n", config.host, config.port) << std::flush;
    if (!serve(*service, config.host, config.port))
        fail(ErrorCode::io_error, fmt::format("cannot listen on {}:{}", config.host, config.port));
    return 0;
}

std::string one_line(std::string text) {
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Diagnosis-to-generation pipeline tools", "skingen"};
    app.require_subcommand(1);

    Globals g;
    app.add_option("--config", g.config, "Service config (JSON)");
    auto* seed_opt = app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--out", g.out, "Output directory or file");

    PrepArgs prep;
    auto* prep_cmd = app.add_subcommand("prep", "Build k-shot training subsets and manifests");
    prep_cmd->add_option("--dataset", prep.dataset, "f17k, scin, or both")->capture_default_str();
    prep_cmd->add_option("--tier", prep.tier, "5shot, 30shot, all, or every")->capture_default_str();
    prep_cmd->add_option("--mode", prep.mode, "label, blip, or both")->capture_default_str();
    prep_cmd->add_option("--index", prep.index, "Dataset CSV (synthetic corpus when omitted)");
    prep_cmd->add_option("--image-root", prep.image_root, "Images for captioning records without descriptions");

    std::string ingest_folder;
    auto* ingest_cmd = app.add_subcommand("ingest", "Build a case database from <folder>/<label>/<image>");
    ingest_cmd->add_option("--folder", ingest_folder, "Labeled image folder")->required();

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score generated images against originals");
    eval_cmd->add_option("--subset", eval.subset, "Manifest JSON to evaluate");
    eval_cmd->add_option("--pairs", eval.pairs, "Image-caption pairs per model")->capture_default_str();
    eval_cmd->add_option("--image-root", eval.image_root, "Original images (synthetic when omitted)");
    eval_cmd->add_option("--dataset", eval.dataset, "Dataset for the stub run")->capture_default_str();
    eval_cmd->add_option("--published", eval.published, "Print the published table for f17k or scin");

    std::string fusion_image, fusion_caption, fusion_model = "f17k-30-shot-blip";
    auto* fusion_cmd = app.add_subcommand("fusion-compare", "Generate the four adapter configurations");
    fusion_cmd->add_option("--image", fusion_image, "Reference image")->required();
    fusion_cmd->add_option("--caption", fusion_caption, "Caption, e.g. \"psoriasis, on her face\"")->required();
    fusion_cmd->add_option("--model", fusion_model, "Generator adapter name")->capture_default_str();

    std::string study_in;
    auto* study_cmd = app.add_subcommand("study", "User-study tools");
    study_cmd->require_subcommand(1);
    auto* report_cmd = study_cmd->add_subcommand("report", "Descriptive statistics for study sessions");
    report_cmd->add_option("--in", study_in, "Sessions JSONL")->required();

    std::optional<int> port;
    auto* serve_cmd = app.add_subcommand("serve", "Run the JSON API");
    serve_cmd->add_option("--port", port, "Listening port");

    for (auto* sub : {prep_cmd, ingest_cmd, eval_cmd, fusion_cmd, study_cmd, report_cmd, serve_cmd})
        sub->fallthrough();

    // Name the offending word when the first non-option token is no command.
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config" || a == "--seed" || a == "--out") {
            ++i;
            continue;
        }
        if (a.starts_with("-")) continue;
        if (app.get_subcommand_no_throw(a) == nullptr) {
            err << fmt::format("error: unknown command '{}'\n", a) << app.help();
            return 2;
        }
        break;
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << one_line(e.what()) << "\n" << app.help();
        return 2;
    }

    try {
        if (*prep_cmd) return run_prep(g, prep, out);
        if (*ingest_cmd) return run_ingest(g, ingest_folder, out);
        if (*eval_cmd) return run_eval(g, eval, out);
        if (*fusion_cmd) return run_fusion(g, fusion_image, fusion_caption, fusion_model, out);
        if (*report_cmd) return run_study_report(g, study_in, out);
        if (*serve_cmd) return run_serve(g, port, seed_opt->count() > 0, out);
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << one_line(e.what()) << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << one_line(e.what()) << "\n";
        return 1;
    }
    err << app.help();
    return 2;
}

}  // namespace skingen::cli
