// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skingen/core.hpp"

namespace skingen {

enum class DatasetTag { f17k, scin };
enum class ScaleTier { five_shot, thirty_shot, all };
enum class CaptionMode { label_only, blip };

inline constexpr ScaleTier kAllTiers[] = {ScaleTier::five_shot, ScaleTier::thirty_shot,
                                          ScaleTier::all};
inline constexpr CaptionMode kAllModes[] = {CaptionMode::label_only, CaptionMode::blip};

// Display forms used in subset names: "f17k"/"SCIN", "5-shot"/"30-shot"/"All".
std::string_view display_name(DatasetTag tag);
std::string_view display_name(ScaleTier tier);
// CLI forms: "f17k"/"scin", "5shot"/"30shot"/"all", "label"/"blip".
std::string_view to_string(DatasetTag tag);
std::string_view to_string(ScaleTier tier);
std::string_view to_string(CaptionMode mode);
DatasetTag dataset_from_string(std::string_view text);
ScaleTier tier_from_string(std::string_view text);
CaptionMode mode_from_string(std::string_view text);

struct DatasetRecord {
    std::string image_ref;
    std::vector<WeightedCondition> conditions;
    DatasetTag dataset = DatasetTag::f17k;
    std::optional<std::string> blip_description;

    // f17k: exactly one condition with weight 1; scin: 1-3 conditions.
    void validate() const;
};

// Highest weight, ties to the lexicographically smallest label.
const std::string& primary_label(const DatasetRecord& record);

// CSV rows: image_ref,label[,weight[,label2,weight2,...]][,blip_description].
// A header row starting with "image_ref" is skipped. Quoted fields follow
// the usual CSV escaping.
std::vector<DatasetRecord> load_dataset_index(const std::filesystem::path& csv, DatasetTag tag);
std::vector<DatasetRecord> parse_dataset_index(std::string_view csv, DatasetTag tag);

// Per-label sample without replacement of min(k, count) records. Each label
// draws from its own stream keyed by (seed, label). Result: indices into
// `records`, grouped by label in lexicographic order, sampled order within.
std::vector<std::size_t> sample_k_shot(std::span<const DatasetRecord> records, std::size_t k,
                                       std::uint64_t seed);

// Fallback BLIP describer for records that carry no description.
using Describer = std::function<std::string(const DatasetRecord&)>;

// label_only: "<label>"; blip: "<label>, <description>". Throws
// missing_description when blip mode has neither a stored description nor a
// describer.
std::string build_caption_string(const DatasetRecord& record, CaptionMode mode,
                                 const Describer& describer = {});

struct TrainConfig {
    int lora_dim = 32;
    int epochs = 20;
    int batch_size = 2;
    std::string optimizer = "AdamW8bit";
    double learning_rate = 1e-4;
    double text_encoder_lr = 5e-5;
    std::string mixed_precision = "fp16";
    int resolution = 512;

    static TrainConfig for_tier(ScaleTier tier);
    bool operator==(const TrainConfig&) const = default;
};

int lora_dim_for(ScaleTier tier);

struct SubsetItem {
    std::string image_ref;
    std::string caption;

    bool operator==(const SubsetItem&) const = default;
};

struct DatasetSubset {
    std::string name;  // "<dataset>-<tier>[-blip]", e.g. "f17k-30-shot-blip"
    DatasetTag dataset = DatasetTag::f17k;
    ScaleTier tier = ScaleTier::five_shot;
    CaptionMode mode = CaptionMode::label_only;
    std::uint64_t seed = 0;
    std::vector<SubsetItem> items;
};

std::string subset_name(DatasetTag dataset, ScaleTier tier, CaptionMode mode);

DatasetSubset build_subset(std::span<const DatasetRecord> records, DatasetTag dataset,
                           ScaleTier tier, CaptionMode mode, std::uint64_t seed,
                           const Describer& describer = {});

// Every tier × mode combination for one dataset (6 subsets).
std::vector<DatasetSubset> build_all_subsets(std::span<const DatasetRecord> records,
                                             DatasetTag dataset, std::uint64_t seed,
                                             const Describer& describer = {});

// Writes <out_dir>/<name>.json; identical inputs give identical bytes.
std::filesystem::path emit_manifest(const DatasetSubset& subset, const TrainConfig& config,
                                    const std::filesystem::path& out_dir);

struct Manifest {
    DatasetSubset subset;
    TrainConfig config;
};

Manifest load_manifest(const std::filesystem::path& path);

}  // namespace skingen
