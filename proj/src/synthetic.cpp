// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/synthetic.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "skingen/backends.hpp"
#include "skingen/hash.hpp"

namespace skingen {

std::vector<std::size_t> synthetic_label_counts(std::size_t labels, std::size_t min_count,
                                                std::size_t max_count, std::uint64_t seed,
                                                std::optional<std::size_t> total) {
    require(labels >= 2, "need at least two labels");
    require(min_count >= 1 && min_count <= max_count, "bad count bounds");
    const std::size_t interior = labels - 2;
    if (total)
        require(*total >= interior * min_count + min_count + max_count &&
                    *total <= interior * max_count + min_count + max_count,
                fmt::format("total {} unreachable with {} labels in [{}, {}]", *total, labels, min_count,
                            max_count));

    SplitMix64 rng(StableHasher(seed).add("label-counts").digest());
    std::vector<std::size_t> counts(labels);
    counts.front() = min_count;
    counts.back() = max_count;
    const double span = static_cast<double>(max_count - min_count);
    for (std::size_t i = 1; i + 1 < labels; ++i) {
        // Cubed uniform: most labels small, a few large.
        const double u = rng.uniform01();
        counts[i] = min_count + static_cast<std::size_t>(span * u * u * u);
    }
    if (!total) return counts;

    // Nudge the interior labels one step at a time toward the target.
    std::size_t sum = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    for (std::size_t step = 0; sum != *total; ++step) {
        std::size_t& c = counts[1 + step % interior];
        if (sum < *total && c < max_count) {
            ++c;
            ++sum;
        } else if (sum > *total && c > min_count) {
            --c;
            --sum;
        }
    }
    return counts;
}

std::vector<std::string> synthetic_labels(std::size_t count, std::string_view prefix) {
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(fmt::format("{} {:03}", prefix, i + 1));
    return out;
}

namespace {

constexpr std::string_view kDescriptions[] = {
    "a close up of a red rash on the arm",      "a close up of a patch of skin on a leg",
    "a person with a red bump on the face",     "a close up of scaly plaques on the elbow",
    "a close up of a dark spot on the back",    "a hand with small blisters on the fingers",
    "a close up of a lesion on the scalp",      "a close up of raised bumps on the chest",
};

std::string slug(std::string_view label) {
    std::string s(label);
    std::replace(s.begin(), s.end(), ' ', '_');
    return s;
}

}  // namespace

std::vector<DatasetRecord> synthetic_corpus(DatasetTag dataset, std::span<const std::string> labels,
                                            std::span<const std::size_t> counts, std::uint64_t seed) {
    require(labels.size() == counts.size(), "labels and counts differ in length");
    std::vector<DatasetRecord> records;
    records.reserve(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
    for (std::size_t l = 0; l < labels.size(); ++l) {
        for (std::size_t i = 0; i < counts[l]; ++i) {
            DatasetRecord r;
            r.dataset = dataset;
            r.image_ref = fmt::format("{}/{}/{:04}.png", to_string(dataset), slug(labels[l]), i);
            SplitMix64 rng(StableHasher(seed).add("record").add(r.image_ref).digest());
            r.conditions.push_back({labels[l], 1.0});
            if (dataset == DatasetTag::scin && labels.size() > 1) {
                const std::size_t extra = static_cast<std::size_t>(rng.below(3));
                double weight = 0.5;
                for (std::size_t e = 0; e < extra; ++e) {
                    const std::string& other = labels[(l + 1 + e) % labels.size()];
                    if (other == labels[l]) break;
                    r.conditions.push_back({other, weight});
                    weight /= 2.0;
                }
            }
            r.blip_description =
                std::string(kDescriptions[rng.below(std::size(kDescriptions))]);
            records.push_back(std::move(r));
        }
    }
    return records;
}

SkinImage synthetic_image(const std::string& id, std::string_view label, int resolution,
                          std::uint64_t seed) {
    const StubGenerator generator("dataset", resolution, resolution);
    const std::uint64_t key = StableHasher(seed).add("synthetic-image").add(id).digest();
    return generator.generate(label, nullptr, GenerationStrategy::lora_text, key)
        .with_id(id)
        .with_source(ImageSource::dataset);
}

}  // namespace skingen
