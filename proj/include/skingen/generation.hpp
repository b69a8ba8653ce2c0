// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skingen/backends.hpp"
#include "skingen/core.hpp"

namespace skingen {

struct CaseRecord {
    std::string case_id;
    std::string image_ref;  // relative to the database image root
    std::vector<WeightedCondition> conditions;  // 1-3 entries, weights descending
    Caption caption;
    Embedding embedding;

    const std::string& primary_label() const { return top_condition(conditions); }
    void validate() const;
};

// Labeled exemplar cases with caption embeddings. Reads may run concurrently;
// add() must be serialized by the caller.
class CaseDatabase {
public:
    explicit CaseDatabase(std::string embedder_tag = "stub",
                          std::filesystem::path image_root = {});

    // JSONL, one CaseRecord per line. Image refs resolve against
    // `image_root`, defaulting to the JSONL file's directory.
    static CaseDatabase load(const std::filesystem::path& jsonl,
                             std::optional<std::filesystem::path> image_root = std::nullopt);
    void save(const std::filesystem::path& jsonl) const;

    // Throws invalid_argument on duplicate case_id or embedding dimension
    // mismatch. `image` keeps the case image in memory instead of on disk.
    void add(CaseRecord record, std::optional<SkinImage> image = std::nullopt);

    std::span<const CaseRecord> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const std::string& embedder_tag() const noexcept { return embedder_tag_; }
    const std::filesystem::path& image_root() const noexcept { return image_root_; }

    const CaseRecord* find(std::string_view case_id) const;
    // Image with id = case_id, source = dataset, label = primary label.
    SkinImage case_image(const CaseRecord& record) const;

private:
    std::string embedder_tag_;
    std::filesystem::path image_root_;
    std::vector<CaseRecord> records_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::map<std::string, SkinImage, std::less<>> images_;
};

// Builds a database from <folder>/<label>/<image>.{png,jpg,jpeg}: each image
// is recaptioned, its caption embedded, and a PNG copy written to
// <out_dir>/images/. The JSONL goes to <out_dir>/cases.jsonl.
CaseDatabase ingest_case_folder(const std::filesystem::path& folder,
                                const std::filesystem::path& out_dir,
                                const CaptionerBackend& captioner, const EmbedderBackend& embedder,
                                std::string embedder_tag = "stub");

Caption recaption(const SkinImage& image, std::string_view label, const CaptionerBackend& captioner);

struct RetrievalHit {
    CaseRecord record;
    double similarity = 0.0;
};

inline constexpr double kDefaultRetrievalThreshold = 0.25;

// Records whose primary label matches `query_label` (case-insensitive), ranked
// by cosine(embed_text(caption), record.embedding) descending, ties by case_id
// ascending; top-k at or above `threshold`.
std::vector<RetrievalHit> retrieve_cases(std::string_view query_label, const Caption& query_caption,
                                         const CaseDatabase& db, const EmbedderBackend& embedder,
                                         std::size_t k, double threshold = kDefaultRetrievalThreshold);

GenerationStrategy select_strategy(std::span<const RetrievalHit> retrieval);

struct Failure {
    ErrorCode code;
    std::string message;
};

struct DemonstrationEntry {
    std::string condition;
    std::string caption;
    GenerationStrategy strategy = GenerationStrategy::lora_text;
    std::optional<std::string> case_id;
    std::optional<SkinImage> image;
    std::uint64_t seed = 0;
    std::optional<Failure> error;
};

struct DemonstrationSet {
    std::string request_id;
    std::vector<DemonstrationEntry> entries;  // diagnosis order
};

struct DemonstrationOptions {
    std::uint64_t seed = 0;
    std::size_t retrieval_k = 3;
    double retrieval_threshold = kDefaultRetrievalThreshold;
    bool parallel = true;
};

// For the primary condition and every alternative: recaption, retrieve, pick
// a strategy, generate. Per-condition failures are recorded on the entry;
// generation_failed is thrown only when every condition fails.
DemonstrationSet generate_demonstrations(const SkinImage& image, const Diagnosis& diagnosis,
                                         const CaseDatabase& db, const BackendSet& backends,
                                         const DemonstrationOptions& options);

struct FusionSlot {
    GenerationStrategy strategy;
    bool used_image_prompt = false;
    std::optional<SkinImage> image;
    std::optional<Failure> error;
};

// The four adapter configurations, in order: LoRA text-only, zero-shot image
// prompt, fine-tuned image prompt, image prompt fused with LoRA. Slots 2-4
// receive the reference image as the image prompt.
inline constexpr GenerationStrategy kFusionOrder[4] = {
    GenerationStrategy::lora_text, GenerationStrategy::ip_only, GenerationStrategy::ip_finetuned,
    GenerationStrategy::lora_plus_ip};

std::vector<FusionSlot> run_fusion_comparison(const SkinImage& reference_image,
                                              const Caption& caption,
                                              const GeneratorBackend& generator,
                                              std::uint64_t seed);

}  // namespace skingen
