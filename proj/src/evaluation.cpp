// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "skingen/hash.hpp"
#include "skingen/image_io.hpp"

namespace skingen {

double embedding_score(const SkinImage& a, const SkinImage& b, const EmbedderBackend& embedder) {
    return cosine(embedder.embed_image(a), embedder.embed_image(b));
}

double pixel_mse(const SkinImage& a, const SkinImage& b) {
    require(a.width() == b.width() && a.height() == b.height(),
            fmt::format("pixel_mse size mismatch: {}x{} vs {}x{}", a.width(), a.height(), b.width(),
                        b.height()));
    const auto pa = a.pixels();
    const auto pb = b.pixels();
    // Exact integer accumulation; 512x512x3 x 255^2 fits easily in 64 bits.
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const int d = static_cast<int>(pa[i]) - static_cast<int>(pb[i]);
        sum += static_cast<std::uint64_t>(d * d);
    }
    const double denom = 255.0 * 255.0 * static_cast<double>(pa.size());
    return static_cast<double>(sum) / denom * kMseScale;
}

namespace {

SkinImage at_resolution(const SkinImage& image, int resolution) {
    if (image.width() == resolution && image.height() == resolution) return image;
    return resize(image, resolution, resolution);
}

}  // namespace

MetricRow evaluate_model(std::span<const EvalPair> pairs, std::string model_name,
                         const EmbedderBackend& semantic, const EmbedderBackend& structural,
                         int resolution) {
    require(!pairs.empty(), fmt::format("model '{}': no evaluation pairs", model_name));
    require(resolution > 0, "evaluation resolution must be positive");
    double clip = 0.0, dino = 0.0, mse = 0.0;
    for (const auto& pair : pairs) {
        const SkinImage a = at_resolution(pair.original, resolution);
        const SkinImage b = at_resolution(pair.generated, resolution);
        clip += embedding_score(a, b, semantic);
        dino += embedding_score(a, b, structural);
        mse += pixel_mse(a, b);
    }
    const double n = static_cast<double>(pairs.size());
    return {std::move(model_name), clip / n, dino / n, mse / n};
}

namespace {

const MetricRow& cell(std::span<const TrainedMetricRow> rows, ScaleTier tier, CaptionMode mode) {
    const MetricRow* found = nullptr;
    for (const auto& r : rows) {
        if (r.tier != tier || r.mode != mode) continue;
        require(found == nullptr, fmt::format("duplicate row for tier {} mode {}", to_string(tier),
                                              to_string(mode)));
        found = &r.row;
    }
    require(found != nullptr,
            fmt::format("missing row for tier {} mode {}", to_string(tier), to_string(mode)));
    return *found;
}

// Mean of (better - base) per column, mse reversed.
MetricDelta mean_improvement(const std::vector<std::pair<const MetricRow*, const MetricRow*>>& pairs) {
    MetricDelta d;
    for (const auto& [base, better] : pairs) {
        d.clip += better->clip - base->clip;
        d.dino += better->dino - base->dino;
        d.mse += base->mse - better->mse;
    }
    const double n = static_cast<double>(pairs.size());
    return {d.clip / n, d.dino / n, d.mse / n};
}

}  // namespace

MetricDelta blip_gain(std::span<const TrainedMetricRow> rows) {
    std::vector<std::pair<const MetricRow*, const MetricRow*>> pairs;
    for (ScaleTier tier : kAllTiers)
        pairs.emplace_back(&cell(rows, tier, CaptionMode::label_only), &cell(rows, tier, CaptionMode::blip));
    return mean_improvement(pairs);
}

MetricDelta scaling_effect(std::span<const TrainedMetricRow> rows) {
    std::vector<std::pair<const MetricRow*, const MetricRow*>> pairs;
    for (CaptionMode mode : kAllModes)
        pairs.emplace_back(&cell(rows, ScaleTier::thirty_shot, mode), &cell(rows, ScaleTier::all, mode));
    return mean_improvement(pairs);
}

std::string format_metric(double value, bool signed_form) {
    require(std::isfinite(value), "cannot format a non-finite metric");
    // The epsilon pushes binary representations of exact halves (e.g. -0.045)
    // away from zero.
    double hundredths = std::round(value * 100.0 + std::copysign(1e-9, value));
    if (hundredths == 0.0) hundredths = 0.0;  // drop negative zero
    const double rounded = hundredths / 100.0;
    return signed_form ? fmt::format("{:+.2f}", rounded) : fmt::format("{:.2f}", rounded);
}

std::string MetricReport::to_csv(bool header) const {
    std::string out = header ? "model_name,clip,dino,mse\n" : "";
    auto row_line = [&](const MetricRow& r) {
        out += fmt::format("{},{},{},{}\n", r.model_name, format_metric(r.clip), format_metric(r.dino),
                           format_metric(r.mse));
    };
    row_line(zero_shot);
    for (const auto& t : trained) row_line(t.row);
    auto delta_line = [&](std::string_view name, const MetricDelta& d) {
        out += fmt::format("{},{},{},{}\n", name, format_metric(d.clip, true), format_metric(d.dino, true),
                           format_metric(d.mse, true));
    };
    delta_line("BLIP Gain", blip_gain());
    delta_line("Scaling Effect", scaling_effect());
    return out;
}

namespace {

struct PublishedBlock {
    MetricRow zero_shot;
    MetricRow rows[6];  // 5shot, 5shot_blip, 30shot, 30shot_blip, all, all_blip
    MetricDelta blip_gain;
    MetricDelta scaling_effect;
};

const PublishedBlock& published(DatasetTag dataset) {
    static const PublishedBlock f17k{
        {"0-shot", 0.61, 0.69, 2.09},
        {{"f17k_5shot", 0.76, 0.81, 1.31},
         {"f17k_5shot_blip", 0.77, 0.82, 1.32},
         {"f17k_30shot", 0.76, 0.82, 1.33},
         {"f17k_30shot_blip", 0.76, 0.82, 1.31},
         {"f17k_all", 0.71, 0.77, 1.25},
         {"f17k_all_blip", 0.72, 0.76, 1.25}},
        {0.02, 0.00, 0.01},
        {-0.05, -0.05, 0.08}};
    static const PublishedBlock scin{
        {"0-shot", 0.63, 0.71, 2.02},
        {{"SCIN_5shot", 0.71, 0.76, 1.64},
         {"SCIN_5shot_blip", 0.75, 0.77, 1.61},
         {"SCIN_30shot", 0.74, 0.76, 1.58},
         {"SCIN_30shot_blip", 0.76, 0.77, 1.53},
         {"SCIN_all", 0.72, 0.75, 1.62},
         {"SCIN_all_blip", 0.74, 0.76, 1.54}},
        {0.08, 0.03, 0.05},
        {-0.02, -0.01, -0.04}};
    return dataset == DatasetTag::f17k ? f17k : scin;
}

}  // namespace

MetricReport published_report(DatasetTag dataset) {
    const auto& block = published(dataset);
    MetricReport report;
    report.dataset = std::string(display_name(dataset));
    report.zero_shot = block.zero_shot;
    std::size_t i = 0;
    for (ScaleTier tier : kAllTiers)
        for (CaptionMode mode : kAllModes) report.trained.push_back({tier, mode, block.rows[i++]});
    return report;
}

MetricDelta published_blip_gain(DatasetTag dataset) { return published(dataset).blip_gain; }
MetricDelta published_scaling_effect(DatasetTag dataset) { return published(dataset).scaling_effect; }

std::vector<EvalPair> sample_eval_pairs(const DatasetSubset& subset, std::size_t n,
                                        std::uint64_t seed, const GeneratorBackend& generator,
                                        const ImageLoader& load_image) {
    require(n >= 1, "eval pair count must be >= 1");
    require(n <= subset.items.size(), fmt::format("requested {} pairs from subset '{}' of {} items", n,
                                                  subset.name, subset.items.size()));
    require(static_cast<bool>(load_image), "sample_eval_pairs needs an image loader");

    std::vector<std::size_t> order(subset.items.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(StableHasher(seed).add("eval-pairs").add(subset.name).digest());
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(order.size() - i));
        std::swap(order[i], order[j]);
    }
    order.resize(n);
    std::sort(order.begin(), order.end());

    std::vector<EvalPair> pairs;
    pairs.reserve(n);
    for (std::size_t idx : order) {
        const auto& item = subset.items[idx];
        pairs.push_back({load_image(item), item.caption,
                         generator.generate(item.caption, nullptr, GenerationStrategy::lora_text, seed)});
    }
    return pairs;
}

}  // namespace skingen
