// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/generation.hpp"

#include <algorithm>
#include <future>

#include <fmt/format.h>

#include "skingen/hash.hpp"

namespace skingen {

Caption recaption(const SkinImage& image, std::string_view label, const CaptionerBackend& captioner) {
    require(!trim(label).empty(), "recaption label is empty");
    std::string description;
    try {
        description = captioner.describe(image);
    } catch (const std::exception& e) {
        fail(ErrorCode::backend_error, fmt::format("captioner: {}", e.what()));
    }
    return Caption(std::string(label), trim(description));
}

std::vector<RetrievalHit> retrieve_cases(std::string_view query_label, const Caption& query_caption,
                                         const CaseDatabase& db, const EmbedderBackend& embedder,
                                         std::size_t k, double threshold) {
    require(k >= 1, "retrieval k must be >= 1");
    require(threshold >= -1.0 && threshold <= 1.0,
            fmt::format("retrieval threshold {} outside [-1, 1]", threshold));
    if (db.empty()) return {};

    const std::string key = condition_key(query_label);
    const Embedding query = embedder.embed_text(query_caption.serialize());

    std::vector<std::pair<const CaseRecord*, double>> scored;
    for (const auto& record : db.records()) {
        if (condition_key(record.primary_label()) != key) continue;
        const double sim = cosine(query, record.embedding);
        if (sim >= threshold) scored.emplace_back(&record, sim);
    }
    auto better = [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first->case_id < b.first->case_id;
    };
    const std::size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                      better);

    std::vector<RetrievalHit> hits;
    hits.reserve(take);
    for (std::size_t i = 0; i < take; ++i) hits.push_back({*scored[i].first, scored[i].second});
    return hits;
}

GenerationStrategy select_strategy(std::span<const RetrievalHit> retrieval) {
    return retrieval.empty() ? GenerationStrategy::lora_text : GenerationStrategy::lora_plus_ip;
}

namespace {

Failure to_failure(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) return {err->code(), err->what()};
    return {ErrorCode::backend_error, e.what()};
}

DemonstrationEntry demonstrate(const SkinImage& image, const std::string& condition,
                               const CaseDatabase& db, const BackendSet& backends,
                               const DemonstrationOptions& options) {
    DemonstrationEntry entry;
    entry.condition = condition;
    entry.seed = options.seed;
    try {
        const Caption caption = recaption(image, condition, *backends.captioner);
        entry.caption = caption.serialize();
        const auto hits = retrieve_cases(condition, caption, db, *backends.semantic_embedder,
                                         options.retrieval_k, options.retrieval_threshold);
        entry.strategy = select_strategy(hits);
        std::optional<SkinImage> image_prompt;
        if (entry.strategy == GenerationStrategy::lora_plus_ip) {
            entry.case_id = hits.front().record.case_id;
            image_prompt = db.case_image(hits.front().record);
        }
        entry.image = backends.generator->generate(entry.caption,
                                                   image_prompt ? &*image_prompt : nullptr,
                                                   entry.strategy, options.seed);
    } catch (const std::exception& e) {
        entry.image.reset();
        entry.error = to_failure(e);
    }
    return entry;
}

}  // namespace

DemonstrationSet generate_demonstrations(const SkinImage& image, const Diagnosis& diagnosis,
                                         const CaseDatabase& db, const BackendSet& backends,
                                         const DemonstrationOptions& options) {
    diagnosis.validate();
    const auto conditions = diagnosis.condition_names();

    StableHasher request(options.seed);
    request.add("demonstrations").add(image.id());
    for (const auto& c : conditions) request.add(c);

    DemonstrationSet set;
    set.request_id = to_hex(request.digest());
    set.entries.reserve(conditions.size());

    if (options.parallel && conditions.size() > 1) {
        std::vector<std::future<DemonstrationEntry>> pending;
        pending.reserve(conditions.size());
        for (const auto& condition : conditions) {
            pending.push_back(std::async(std::launch::async, [&, condition] {
                return demonstrate(image, condition, db, backends, options);
            }));
        }
        for (auto& f : pending) set.entries.push_back(f.get());
    } else {
        for (const auto& condition : conditions)
            set.entries.push_back(demonstrate(image, condition, db, backends, options));
    }

    const bool all_failed = std::all_of(set.entries.begin(), set.entries.end(),
                                        [](const auto& e) { return e.error.has_value(); });
    if (all_failed) {
        fail(ErrorCode::generation_failed,
             fmt::format("all {} demonstrations failed; first: {}", set.entries.size(),
                         set.entries.front().error->message));
    }
    return set;
}

std::vector<FusionSlot> run_fusion_comparison(const SkinImage& reference_image,
                                              const Caption& caption,
                                              const GeneratorBackend& generator,
                                              std::uint64_t seed) {
    const std::string prompt = caption.serialize();
    std::vector<FusionSlot> gallery;
    gallery.reserve(std::size(kFusionOrder));
    for (GenerationStrategy strategy : kFusionOrder) {
        FusionSlot slot;
        slot.strategy = strategy;
        slot.used_image_prompt = strategy != GenerationStrategy::lora_text;
        try {
            slot.image = generator.generate(prompt, slot.used_image_prompt ? &reference_image : nullptr,
                                            strategy, seed);
        } catch (const std::exception& e) {
            slot.error = to_failure(e);
        }
        gallery.push_back(std::move(slot));
    }
    return gallery;
}

}  // namespace skingen
