// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "skingen/backends.hpp"
#include "skingen/core.hpp"

namespace skingen {

// Lesion-preserving composite: source pixels inside the mask, zero outside.
struct MaskedImage {
    std::string source_id;
    MaskImage mask;
    SkinImage composite;
};

// Highest-confidence candidate at or above `threshold`; ties go to the earlier
// candidate. Throws lesion_not_found when nothing qualifies.
BoundingBox locate_lesion(const SkinImage& image, std::string_view condition,
                          const DetectorBackend& detector, double threshold);

// Throws empty_mask when the segmenter returns no set bits; segmenter errors
// (e.g. degenerate_region) propagate unchanged.
MaskedImage build_masked_image(const SkinImage& image, const BoundingBox& box,
                               const SegmenterBackend& segmenter);

// Detection followed by segmentation.
MaskedImage mask_lesion(const SkinImage& image, std::string_view condition,
                        const DetectorBackend& detector, const SegmenterBackend& segmenter,
                        double threshold);

// <stem>.png (1-bit mask) plus <stem>.json {source_id, box, threshold}.
struct MaskSidecar {
    std::string source_id;
    BoundingBox box;
    double threshold = 0.0;
};

void save_mask(const std::filesystem::path& directory, const std::string& stem,
               const MaskImage& mask, const MaskSidecar& sidecar);

std::pair<MaskImage, MaskSidecar> load_mask(const std::filesystem::path& directory,
                                            const std::string& stem);

}  // namespace skingen
