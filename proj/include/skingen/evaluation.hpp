// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "skingen/backends.hpp"
#include "skingen/core.hpp"
#include "skingen/dataprep.hpp"

namespace skingen {

// Pixel MSE is reported over [0,1]-normalized channels times this factor.
inline constexpr double kMseScale = 10.0;
inline constexpr int kEvalResolution = 512;
inline constexpr std::size_t kDefaultEvalPairs = 100;

struct EvalPair {
    SkinImage original;
    std::string caption;
    SkinImage generated;
};

struct MetricRow {
    std::string model_name;
    double clip = 0.0;
    double dino = 0.0;
    double mse = 0.0;
};

struct TrainedMetricRow {
    ScaleTier tier;
    CaptionMode mode;
    MetricRow row;
};

// Positive is an improvement in every column (mse deltas are reversed).
struct MetricDelta {
    double clip = 0.0;
    double dino = 0.0;
    double mse = 0.0;
};

// Cosine of the two image embeddings.
double embedding_score(const SkinImage& a, const SkinImage& b, const EmbedderBackend& embedder);

// mean((a/255 - b/255)^2) * kMseScale over every pixel and channel.
double pixel_mse(const SkinImage& a, const SkinImage& b);

// Both images in every pair are resized to `resolution` before scoring.
MetricRow evaluate_model(std::span<const EvalPair> pairs, std::string model_name,
                         const EmbedderBackend& semantic, const EmbedderBackend& structural,
                         int resolution = kEvalResolution);

// Need exactly one row per tier × mode.
MetricDelta blip_gain(std::span<const TrainedMetricRow> rows);
MetricDelta scaling_effect(std::span<const TrainedMetricRow> rows);

struct MetricReport {
    std::string dataset;  // display name, e.g. "f17k"
    MetricRow zero_shot;
    std::vector<TrainedMetricRow> trained;  // tier-major, label-only before blip

    MetricDelta blip_gain() const { return skingen::blip_gain(trained); }
    MetricDelta scaling_effect() const { return skingen::scaling_effect(trained); }

    // model_name,clip,dino,mse rows followed by the two aggregate rows.
    std::string to_csv(bool header = true) const;
};

// Half-away-from-zero to 2 decimals; `signed_form` adds a leading '+'.
std::string format_metric(double value, bool signed_form = false);

// Table rows as printed for the two datasets, in report order.
MetricReport published_report(DatasetTag dataset);
// The aggregate cells printed under each published block.
MetricDelta published_blip_gain(DatasetTag dataset);
MetricDelta published_scaling_effect(DatasetTag dataset);

using ImageLoader = std::function<SkinImage(const SubsetItem&)>;

// Deterministic n-item sample, kept in subset order. The generated side is
// generator(caption, no image prompt, LORA_TEXT, seed).
std::vector<EvalPair> sample_eval_pairs(const DatasetSubset& subset, std::size_t n,
                                        std::uint64_t seed, const GeneratorBackend& generator,
                                        const ImageLoader& load_image);

}  // namespace skingen
