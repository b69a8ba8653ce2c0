// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

// Deterministic stand-in corpora for running the dataset and evaluation
// tooling without the real image collections.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skingen/core.hpp"
#include "skingen/dataprep.hpp"

namespace skingen {

// Per-label image counts in [min_count, max_count], with the first label at
// min_count and the last at max_count. When `total` is set the counts are
// adjusted to sum to it (it must be reachable within the bounds).
std::vector<std::size_t> synthetic_label_counts(std::size_t labels, std::size_t min_count,
                                                std::size_t max_count, std::uint64_t seed,
                                                std::optional<std::size_t> total = std::nullopt);

// "<dataset>/<label_with_underscores>/<index>.png" references. f17k records
// carry one condition; scin records carry 1-3 with descending weights. Every
// record gets a stored description.
std::vector<DatasetRecord> synthetic_corpus(DatasetTag dataset, std::span<const std::string> labels,
                                            std::span<const std::size_t> counts, std::uint64_t seed);

// Generic "condition NNN" labels.
std::vector<std::string> synthetic_labels(std::size_t count, std::string_view prefix = "condition");

// Square RGB image derived from (seed, id, label); source = dataset.
SkinImage synthetic_image(const std::string& id, std::string_view label, int resolution,
                          std::uint64_t seed);

}  // namespace skingen
