// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/masking.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "skingen/image_io.hpp"

namespace skingen {

using nlohmann::json;

BoundingBox locate_lesion(const SkinImage& image, std::string_view condition,
                          const DetectorBackend& detector, double threshold) {
    require(threshold >= 0.0 && threshold <= 1.0,
            fmt::format("detection threshold {} outside [0, 1]", threshold));
    std::vector<BoundingBox> candidates;
    try {
        candidates = detector.detect(image, condition);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(ErrorCode::backend_error, fmt::format("detector: {}", e.what()));
    }
    const BoundingBox* best = nullptr;
    for (const auto& box : candidates) {
        if (!box.valid() || box.confidence < threshold) continue;
        if (best == nullptr || box.confidence > best->confidence) best = &box;
    }
    if (best == nullptr) {
        fail(ErrorCode::lesion_not_found,
             fmt::format("no '{}' region at confidence >= {} among {} candidates",
                         std::string(condition), threshold, candidates.size()));
    }
    return *best;
}

MaskedImage build_masked_image(const SkinImage& image, const BoundingBox& box,
                               const SegmenterBackend& segmenter) {
    box.validate();
    MaskImage mask = segmenter.segment(image, box);
    if (mask.width() != image.width() || mask.height() != image.height()) {
        fail(ErrorCode::backend_error,
             fmt::format("segmenter mask {}x{} does not match image {}x{}", mask.width(),
                         mask.height(), image.width(), image.height()));
    }
    if (mask.set_count() == 0) fail(ErrorCode::empty_mask, "segmentation produced an empty mask");

    std::vector<std::uint8_t> pixels(image.pixels().begin(), image.pixels().end());
    const auto bits = mask.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) pixels[i * 3] = pixels[i * 3 + 1] = pixels[i * 3 + 2] = 0;
    }
    SkinImage composite(image.id() + "-masked", image.width(), image.height(), std::move(pixels),
                        image.source(), image.label());
    return MaskedImage{image.id(), std::move(mask), std::move(composite)};
}

MaskedImage mask_lesion(const SkinImage& image, std::string_view condition,
                        const DetectorBackend& detector, const SegmenterBackend& segmenter,
                        double threshold) {
    return build_masked_image(image, locate_lesion(image, condition, detector, threshold),
                              segmenter);
}

void save_mask(const std::filesystem::path& directory, const std::string& stem,
               const MaskImage& mask, const MaskSidecar& sidecar) {
    write_file(directory / (stem + ".png"), encode_mask_png(mask));
    json j = {{"source_id", sidecar.source_id},
              {"box",
               {{"x0", sidecar.box.x0},
                {"y0", sidecar.box.y0},
                {"x1", sidecar.box.x1},
                {"y1", sidecar.box.y1},
                {"confidence", sidecar.box.confidence}}},
              {"threshold", sidecar.threshold}};
    write_file(directory / (stem + ".json"), j.dump(2) + "\n");
}

std::pair<MaskImage, MaskSidecar> load_mask(const std::filesystem::path& directory,
                                            const std::string& stem) {
    auto sidecar_bytes = read_file(directory / (stem + ".json"));
    MaskSidecar sidecar;
    try {
        auto j = json::parse(sidecar_bytes.begin(), sidecar_bytes.end());
        sidecar.source_id = j.at("source_id").get<std::string>();
        const auto& b = j.at("box");
        sidecar.box = {b.at("x0").get<double>(), b.at("y0").get<double>(),
                       b.at("x1").get<double>(), b.at("y1").get<double>(),
                       b.at("confidence").get<double>()};
        sidecar.threshold = j.at("threshold").get<double>();
    } catch (const json::exception& e) {
        fail(ErrorCode::io_error, fmt::format("mask sidecar '{}': {}", stem, e.what()));
    }
    auto mask = decode_mask_png(read_file(directory / (stem + ".png")), sidecar.source_id);
    return {std::move(mask), std::move(sidecar)};
}

}  // namespace skingen
