// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "skingen/masking.hpp"
#include "test_support.hpp"

namespace skingen {
namespace {

using testing::EmptySegmenter;
using testing::error_code_of;
using testing::FixedDetector;
using testing::random_image;
using testing::TempDir;

TEST(LocateLesion, StubBoxAtDefaultThreshold) {
    const StubDetector det(1);
    const auto img = random_image("a", 16, 16, 0);
    const auto box = locate_lesion(img, "acne", det, 0.3);
    EXPECT_EQ(box, det.detect(img, "acne").front());
    EXPECT_GE(box.confidence, 0.5);
}

TEST(LocateLesion, ThresholdOutOfRange) {
    const StubDetector det;
    const auto img = random_image("a", 8, 8, 0);
    EXPECT_EQ(error_code_of([&] { locate_lesion(img, "acne", det, 1.01); }), ErrorCode::invalid_argument);
    EXPECT_EQ(error_code_of([&] { locate_lesion(img, "acne", det, -0.1); }), ErrorCode::invalid_argument);
}

TEST(LocateLesion, NothingAboveThreshold) {
    const FixedDetector det({{0.1, 0.1, 0.5, 0.5, 0.2}, {0.2, 0.2, 0.6, 0.6, 0.25}});
    EXPECT_EQ(error_code_of([&] { locate_lesion(random_image("a", 8, 8, 0), "acne", det, 0.3); }),
              ErrorCode::lesion_not_found);
    const FixedDetector none({});
    EXPECT_EQ(error_code_of([&] { locate_lesion(random_image("a", 8, 8, 0), "acne", none, 0.0); }),
              ErrorCode::lesion_not_found);
}

TEST(LocateLesion, ArgmaxWithEarliestTieBreak) {
    const BoundingBox a{0.0, 0.0, 0.5, 0.5, 0.4};
    const BoundingBox b{0.1, 0.1, 0.6, 0.6, 0.8};
    const BoundingBox c{0.2, 0.2, 0.7, 0.7, 0.8};
    const FixedDetector det({a, b, c});
    EXPECT_EQ(locate_lesion(random_image("x", 8, 8, 0), "acne", det, 0.3), b);
}

TEST(BuildMaskedImage, GrayOracle) {
    const auto img = SkinImage::filled("gray", 64, 48, 128);
    const BoundingBox full{0.0, 0.0, 1.0, 1.0, 1.0};
    const auto masked = build_masked_image(img, full, StubSegmenter());
    EXPECT_EQ(masked.source_id, "gray");
    ASSERT_EQ(masked.composite.width(), 64);
    ASSERT_EQ(masked.composite.height(), 48);
    for (int y = 0; y < 48; ++y) {
        const double dy = (y + 0.5 - 24.0) / 24.0;
        for (int x = 0; x < 64; ++x) {
            const double dx = (x + 0.5 - 32.0) / 32.0;
            const std::uint8_t want = dx * dx + dy * dy <= 1.0 ? 128 : 0;
            for (int c = 0; c < 3; ++c) ASSERT_EQ(masked.composite.at(x, y, c), want) << x << "," << y;
        }
    }
}

TEST(BuildMaskedImage, EmptyMaskRejected) {
    const auto img = random_image("a", 8, 8, 0);
    EXPECT_EQ(error_code_of([&] { build_masked_image(img, {0, 0, 1, 1, 1}, EmptySegmenter()); }),
              ErrorCode::empty_mask);
}

TEST(BuildMaskedImage, DegenerateRegionPropagates) {
    const auto img = random_image("a", 8, 8, 0);
    EXPECT_EQ(error_code_of([&] { build_masked_image(img, {0.0, 0.0, 0.05, 1.0, 1.0}, StubSegmenter()); }),
              ErrorCode::degenerate_region);
}

TEST(BuildMaskedImage, DeterministicAndZeroOutside) {
    const StubDetector det(2);
    for (int i = 0; i < 20; ++i) {
        const auto img = random_image("r" + std::to_string(i), 40, 30, 4);
        const auto a = mask_lesion(img, "acne", det, StubSegmenter(), 0.3);
        const auto b = mask_lesion(img, "acne", det, StubSegmenter(), 0.3);
        EXPECT_EQ(a.mask, b.mask);
        EXPECT_TRUE(a.composite.same_pixels(b.composite));
        for (int y = 0; y < 30; ++y)
            for (int x = 0; x < 40; ++x)
                for (int c = 0; c < 3; ++c) {
                    if (!a.mask.at(x, y))
                        EXPECT_EQ(a.composite.at(x, y, c), 0);
                    else
                        EXPECT_EQ(a.composite.at(x, y, c), img.at(x, y, c));
                }
    }
}

TEST(MaskSidecar, SaveLoadRoundTrip) {
    TempDir dir;
    const auto img = random_image("src-7", 20, 10, 1);
    const BoundingBox box{0.1, 0.2, 0.9, 0.8, 0.75};
    const auto masked = build_masked_image(img, box, StubSegmenter());
    save_mask(dir.path(), "lesion", masked.mask, {"src-7", box, 0.3});
    EXPECT_TRUE(std::filesystem::exists(dir / "lesion.png"));
    EXPECT_TRUE(std::filesystem::exists(dir / "lesion.json"));
    const auto [mask, sidecar] = load_mask(dir.path(), "lesion");
    EXPECT_EQ(mask.bits().size(), masked.mask.bits().size());
    EXPECT_TRUE(std::equal(mask.bits().begin(), mask.bits().end(), masked.mask.bits().begin()));
    EXPECT_EQ(sidecar.source_id, "src-7");
    EXPECT_EQ(sidecar.box, box);
    EXPECT_DOUBLE_EQ(sidecar.threshold, 0.3);
}

}  // namespace
}  // namespace skingen
