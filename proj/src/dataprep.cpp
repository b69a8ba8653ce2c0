// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/dataprep.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include <boost/tokenizer.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "skingen/hash.hpp"
#include "skingen/image_io.hpp"

namespace skingen {

using ordered_json = nlohmann::ordered_json;

std::string_view display_name(DatasetTag tag) { return tag == DatasetTag::f17k ? "f17k" : "SCIN"; }

std::string_view display_name(ScaleTier tier) {
    switch (tier) {
        case ScaleTier::five_shot: return "5-shot";
        case ScaleTier::thirty_shot: return "30-shot";
        case ScaleTier::all: return "All";
    }
    return "All";
}

std::string_view to_string(DatasetTag tag) { return tag == DatasetTag::f17k ? "f17k" : "scin"; }

std::string_view to_string(ScaleTier tier) {
    switch (tier) {
        case ScaleTier::five_shot: return "5shot";
        case ScaleTier::thirty_shot: return "30shot";
        case ScaleTier::all: return "all";
    }
    return "all";
}

std::string_view to_string(CaptionMode mode) { return mode == CaptionMode::blip ? "blip" : "label"; }

DatasetTag dataset_from_string(std::string_view text) {
    const std::string t = to_lower(text);
    if (t == "f17k" || t == "fitzpatrick17k") return DatasetTag::f17k;
    if (t == "scin") return DatasetTag::scin;
    fail(ErrorCode::invalid_argument, fmt::format("unknown dataset '{}'", text));
}

ScaleTier tier_from_string(std::string_view text) {
    const std::string t = to_lower(text);
    if (t == "5shot" || t == "5-shot") return ScaleTier::five_shot;
    if (t == "30shot" || t == "30-shot") return ScaleTier::thirty_shot;
    if (t == "all") return ScaleTier::all;
    fail(ErrorCode::invalid_argument, fmt::format("unknown tier '{}'", text));
}

CaptionMode mode_from_string(std::string_view text) {
    const std::string t = to_lower(text);
    if (t == "label" || t == "label_only" || t == "label-only" || t == "plain") return CaptionMode::label_only;
    if (t == "blip") return CaptionMode::blip;
    fail(ErrorCode::invalid_argument, fmt::format("unknown caption mode '{}'", text));
}

void DatasetRecord::validate() const {
    auto bad = [&](const std::string& why) {
        fail(ErrorCode::invalid_record, fmt::format("record '{}': {}", image_ref, why));
    };
    if (image_ref.empty()) bad("empty image_ref");
    if (conditions.empty()) bad("no conditions");
    for (const auto& c : conditions) {
        if (trim(c.label).empty()) bad("empty label");
        if (!(c.weight > 0.0 && c.weight <= 1.0)) bad(fmt::format("weight {} outside (0, 1]", c.weight));
    }
    if (dataset == DatasetTag::f17k && (conditions.size() != 1 || conditions[0].weight != 1.0))
        bad("f17k records carry exactly one condition with weight 1.0");
    if (dataset == DatasetTag::scin && conditions.size() > 3) bad("scin records carry at most 3 conditions");
}

const std::string& primary_label(const DatasetRecord& record) {
    return top_condition(record.conditions);
}

namespace {

std::optional<double> as_number(const std::string& field) {
    const std::string t = trim(field);
    if (t.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        double v = std::stod(t, &used);
        if (used == t.size()) return v;
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

}  // namespace

std::vector<DatasetRecord> parse_dataset_index(std::string_view csv, DatasetTag tag) {
    using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
    std::vector<DatasetRecord> records;
    std::istringstream in{std::string(csv)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        try {
            Tokenizer tok(line, boost::escaped_list_separator<char>('\\', ',', '"'));
            fields.assign(tok.begin(), tok.end());
        } catch (const boost::escaped_list_error& e) {
            fail(ErrorCode::invalid_record, fmt::format("line {}: {}", line_no, e.what()));
        }
        for (auto& f : fields) f = trim(f);
        if (line_no == 1 && !fields.empty() && fields[0] == "image_ref") continue;
        if (fields.size() < 2)
            fail(ErrorCode::invalid_record, fmt::format("line {}: expected image_ref,label", line_no));

        DatasetRecord r;
        r.image_ref = fields[0];
        r.dataset = tag;
        r.conditions.push_back({fields[1], 1.0});
        std::size_t i = 2;
        while (i < fields.size()) {
            if (auto w = as_number(fields[i])) {
                r.conditions.back().weight = *w;
                ++i;
            } else if (i + 1 < fields.size() && as_number(fields[i + 1])) {
                r.conditions.push_back({fields[i], 1.0});
                ++i;
            } else if (i + 1 == fields.size()) {
                if (!fields[i].empty()) r.blip_description = fields[i];
                ++i;
            } else {
                fail(ErrorCode::invalid_record,
                     fmt::format("line {}: cannot interpret field '{}'", line_no, fields[i]));
            }
        }
        try {
            r.validate();
        } catch (const Error& e) {
            fail(ErrorCode::invalid_record, fmt::format("line {}: {}", line_no, e.what()));
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<DatasetRecord> load_dataset_index(const std::filesystem::path& csv, DatasetTag tag) {
    auto bytes = read_file(csv);
    return parse_dataset_index(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                               tag);
}

namespace {

// label key -> record indices in input order; std::map keeps keys sorted.
std::map<std::string, std::vector<std::size_t>> group_by_label(std::span<const DatasetRecord> records) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < records.size(); ++i)
        groups[condition_key(primary_label(records[i]))].push_back(i);
    return groups;
}

}  // namespace

std::vector<std::size_t> sample_k_shot(std::span<const DatasetRecord> records, std::size_t k,
                                       std::uint64_t seed) {
    require(k >= 1, "k must be >= 1");
    std::vector<std::size_t> picked;
    for (auto& [label, members] : group_by_label(records)) {
        SplitMix64 rng(StableHasher(seed).add("k-shot").add(label).digest());
        const std::size_t take = std::min(k, members.size());
        // Partial Fisher-Yates: the first `take` slots become the sample.
        for (std::size_t i = 0; i < take; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(members.size() - i));
            std::swap(members[i], members[j]);
            picked.push_back(members[i]);
        }
    }
    return picked;
}

std::string build_caption_string(const DatasetRecord& record, CaptionMode mode,
                                 const Describer& describer) {
    const std::string& label = primary_label(record);
    if (mode == CaptionMode::label_only) return Caption(label).serialize();
    if (record.blip_description) return Caption(label, *record.blip_description).serialize();
    if (describer) return Caption(label, describer(record)).serialize();
    fail(ErrorCode::missing_description,
         fmt::format("record '{}' has no description and no captioner is configured", record.image_ref));
}

int lora_dim_for(ScaleTier tier) {
    switch (tier) {
        case ScaleTier::five_shot: return 32;
        case ScaleTier::thirty_shot: return 64;
        case ScaleTier::all: return 128;
    }
    return 128;
}

TrainConfig TrainConfig::for_tier(ScaleTier tier) {
    TrainConfig config;
    config.lora_dim = lora_dim_for(tier);
    return config;
}

std::string subset_name(DatasetTag dataset, ScaleTier tier, CaptionMode mode) {
    return fmt::format("{}-{}{}", display_name(dataset), display_name(tier),
                       mode == CaptionMode::blip ? "-blip" : "");
}

DatasetSubset build_subset(std::span<const DatasetRecord> records, DatasetTag dataset,
                           ScaleTier tier, CaptionMode mode, std::uint64_t seed,
                           const Describer& describer) {
    DatasetSubset subset;
    subset.name = subset_name(dataset, tier, mode);
    subset.dataset = dataset;
    subset.tier = tier;
    subset.mode = mode;
    subset.seed = seed;

    std::vector<std::size_t> chosen;
    switch (tier) {
        case ScaleTier::five_shot: chosen = sample_k_shot(records, 5, seed); break;
        case ScaleTier::thirty_shot: chosen = sample_k_shot(records, 30, seed); break;
        case ScaleTier::all:
            for (const auto& [label, members] : group_by_label(records))
                chosen.insert(chosen.end(), members.begin(), members.end());
            break;
    }
    subset.items.reserve(chosen.size());
    for (std::size_t i : chosen)
        subset.items.push_back({records[i].image_ref, build_caption_string(records[i], mode, describer)});
    return subset;
}

std::vector<DatasetSubset> build_all_subsets(std::span<const DatasetRecord> records,
                                             DatasetTag dataset, std::uint64_t seed,
                                             const Describer& describer) {
    std::vector<DatasetSubset> out;
    for (ScaleTier tier : kAllTiers)
        for (CaptionMode mode : kAllModes)
            out.push_back(build_subset(records, dataset, tier, mode, seed, describer));
    return out;
}

std::filesystem::path emit_manifest(const DatasetSubset& subset, const TrainConfig& config,
                                    const std::filesystem::path& out_dir) {
    require(!subset.items.empty(), fmt::format("subset '{}' is empty", subset.name));
    ordered_json items = ordered_json::array();
    for (const auto& item : subset.items)
        items.push_back({{"image_ref", item.image_ref}, {"caption", item.caption}});
    ordered_json manifest = {
        {"name", subset.name},
        {"dataset", to_string(subset.dataset)},
        {"tier", to_string(subset.tier)},
        {"mode", to_string(subset.mode)},
        {"seed", subset.seed},
        {"image_count", subset.items.size()},
        {"config",
         {{"lora_dim", config.lora_dim},
          {"epochs", config.epochs},
          {"batch_size", config.batch_size},
          {"optimizer", config.optimizer},
          {"learning_rate", config.learning_rate},
          {"text_encoder_lr", config.text_encoder_lr},
          {"mixed_precision", config.mixed_precision},
          {"resolution", config.resolution}}},
        {"items", items}};
    const auto path = out_dir / (subset.name + ".json");
    write_file(path, manifest.dump(2) + "\n");
    return path;
}

Manifest load_manifest(const std::filesystem::path& path) {
    auto bytes = read_file(path);
    Manifest m;
    try {
        auto j = ordered_json::parse(bytes.begin(), bytes.end());
        m.subset.name = j.at("name").get<std::string>();
        m.subset.dataset = dataset_from_string(j.at("dataset").get<std::string>());
        m.subset.tier = tier_from_string(j.at("tier").get<std::string>());
        m.subset.mode = mode_from_string(j.at("mode").get<std::string>());
        m.subset.seed = j.at("seed").get<std::uint64_t>();
        const auto& c = j.at("config");
        m.config.lora_dim = c.at("lora_dim").get<int>();
        m.config.epochs = c.at("epochs").get<int>();
        m.config.batch_size = c.at("batch_size").get<int>();
        m.config.optimizer = c.at("optimizer").get<std::string>();
        m.config.learning_rate = c.at("learning_rate").get<double>();
        m.config.text_encoder_lr = c.at("text_encoder_lr").get<double>();
        m.config.mixed_precision = c.at("mixed_precision").get<std::string>();
        m.config.resolution = c.at("resolution").get<int>();
        for (const auto& item : j.at("items"))
            m.subset.items.push_back({item.at("image_ref").get<std::string>(),
                                      item.at("caption").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::io_error, fmt::format("manifest '{}': {}", path.string(), e.what()));
    }
    return m;
}

}  // namespace skingen
