// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "skingen/core.hpp"
#include "skingen/hash.hpp"
#include "skingen/image_io.hpp"
#include "test_support.hpp"

namespace skingen {
namespace {

using testing::error_code_of;
using testing::random_image;
using testing::TempDir;

TEST(Vocabulary, BuiltInListHas114DistinctLabels) {
    const auto& vocab = ConditionVocabulary::fitzpatrick17k();
    EXPECT_EQ(vocab.size(), 114u);
    std::set<std::string> keys;
    for (const auto& n : vocab.names()) keys.insert(condition_key(n));
    EXPECT_EQ(keys.size(), 114u);
    EXPECT_TRUE(vocab.contains("psoriasis"));
    EXPECT_TRUE(vocab.contains("acne"));
}

TEST(Vocabulary, RejectsDuplicatesAndEmpty) {
    EXPECT_EQ(error_code_of([] { ConditionVocabulary({}); }), ErrorCode::invalid_argument);
    EXPECT_EQ(error_code_of([] { ConditionVocabulary({"Acne", " acne "}); }), ErrorCode::invalid_argument);
}

TEST(Vocabulary, LoadsNewlineDelimitedFile) {
    TempDir dir;
    write_file(dir / "labels.txt", std::string_view("psoriasis\n\nEczema\r\nacne\n"));
    const auto vocab = ConditionVocabulary::load(dir / "labels.txt");
    ASSERT_EQ(vocab.size(), 3u);
    EXPECT_EQ(*vocab.find("ECZEMA"), "Eczema");
}

TEST(NormalizeCondition, CanonicalHitWithTrimmingAndCase) {
    const auto& vocab = ConditionVocabulary::fitzpatrick17k();
    const auto a = normalize_condition("Psoriasis ", vocab);
    EXPECT_EQ(a.name, "psoriasis");
    EXPECT_TRUE(a.canonical);
    const auto b = normalize_condition("psoriasis", vocab);
    EXPECT_EQ(b, a);
}

TEST(NormalizeCondition, UnknownNameIsFlagged) {
    const auto c = normalize_condition("  zebra stripes ", ConditionVocabulary::fitzpatrick17k());
    EXPECT_EQ(c.name, "zebra stripes");
    EXPECT_FALSE(c.canonical);
}

TEST(NormalizeCondition, EmptyInputIsInvalid) {
    EXPECT_EQ(error_code_of([] { normalize_condition("   ", ConditionVocabulary::fitzpatrick17k()); }),
              ErrorCode::invalid_argument);
}

TEST(NormalizeCondition, Idempotent) {
    const auto& vocab = ConditionVocabulary::fitzpatrick17k();
    for (std::string input : {"  ACNE", "Lupus Erythematosus", "made up thing ", "Psoriasis"}) {
        const auto once = normalize_condition(input, vocab);
        EXPECT_EQ(normalize_condition(once.name, vocab), once) << input;
    }
}

TEST(Caption, SerializesWithAndWithoutDescription) {
    EXPECT_EQ(Caption("psoriasis").serialize(), "psoriasis");
    EXPECT_EQ(Caption("psoriasis", "on the arm").serialize(), "psoriasis, on the arm");
    EXPECT_EQ(Caption("psoriasis", "   ").serialize(), "psoriasis");
}

TEST(Caption, RejectsCommaLabelsAndEmptyLabels) {
    EXPECT_EQ(error_code_of([] { Caption("a, b"); }), ErrorCode::invalid_argument);
    EXPECT_EQ(error_code_of([] { Caption(" "); }), ErrorCode::invalid_argument);
}

TEST(Caption, RoundTripsForCommaFreeLabels) {
    SplitMix64 rng(5);
    const auto& names = ConditionVocabulary::fitzpatrick17k().names();
    const std::vector<std::string> descriptions = {"", "on the arm", "red, scaly plaques, elbow", "x"};
    for (int i = 0; i < 200; ++i) {
        const Caption c(names[rng.below(names.size())], descriptions[rng.below(descriptions.size())]);
        EXPECT_EQ(Caption::parse(c.serialize()), c);
    }
}

TEST(Embedding, NormalizesAndRejectsDegenerateInput) {
    const auto e = Embedding::from_raw({3.0, 4.0});
    EXPECT_NEAR(e.values()[0], 0.6, 1e-12);
    EXPECT_NEAR(e.values()[1], 0.8, 1e-12);
    EXPECT_EQ(error_code_of([] { Embedding::from_raw({0.0, 0.0}); }), ErrorCode::numeric_error);
    EXPECT_EQ(error_code_of([] { Embedding::from_raw({NAN, 1.0}); }), ErrorCode::numeric_error);
}

TEST(Embedding, FromUnitKeepsBitsAndChecksNorm) {
    const auto e = Embedding::from_raw({1.0, 2.0, 3.0});
    const std::vector<double> stored(e.values().begin(), e.values().end());
    EXPECT_EQ(Embedding::from_unit(stored), e);
    EXPECT_EQ(error_code_of([] { Embedding::from_unit({3.0, 4.0}); }), ErrorCode::numeric_error);
}

TEST(Embedding, CosineMatchesDotProductAndChecksDimension) {
    const auto a = Embedding::from_raw({1.0, 0.0, 0.0});
    const auto b = Embedding::from_raw({1.0, 1.0, 0.0});
    EXPECT_NEAR(cosine(a, b), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(cosine(a, a), 1.0, 1e-12);
    EXPECT_EQ(error_code_of([&] { cosine(a, Embedding::from_raw({1.0, 0.0})); }), ErrorCode::invalid_argument);
}

TEST(TopCondition, WeightOrderThenLexicographicTie) {
    const std::vector<WeightedCondition> a = {{"eczema", 0.6}, {"acne", 0.4}};
    EXPECT_EQ(top_condition(a), "eczema");
    const std::vector<WeightedCondition> b = {{"b", 0.5}, {"a", 0.5}};
    EXPECT_EQ(top_condition(b), "a");
    EXPECT_EQ(error_code_of([] { top_condition({}); }), ErrorCode::invalid_record);
}

TEST(Diagnosis, ValidateEnforcesInvariants) {
    Diagnosis d{{"acne", true}, {{"eczema", true}, {"psoriasis", true}}, "text", "img"};
    EXPECT_NO_THROW(d.validate());
    EXPECT_EQ(d.condition_names(), (std::vector<std::string>{"acne", "eczema", "psoriasis"}));

    Diagnosis with_primary = d;
    with_primary.alternatives.push_back({"Acne", true});
    EXPECT_THROW(with_primary.validate(), Error);

    Diagnosis dup = d;
    dup.alternatives.push_back({"eczema", true});
    EXPECT_THROW(dup.validate(), Error);

    Diagnosis many = d;
    many.alternatives = {{"a", false}, {"b", false}, {"c", false}, {"d", false}, {"e", false}, {"f", false}};
    EXPECT_THROW(many.validate(), Error);
}

TEST(BoundingBox, ValidityAndPixelRect) {
    EXPECT_TRUE((BoundingBox{0.1, 0.2, 0.5, 0.6, 0.9}).valid());
    EXPECT_FALSE((BoundingBox{0.5, 0.2, 0.5, 0.6, 0.9}).valid());
    EXPECT_FALSE((BoundingBox{0.1, 0.2, 1.1, 0.6, 0.9}).valid());
    EXPECT_FALSE((BoundingBox{0.1, 0.2, 0.5, 0.6, 1.5}).valid());
    const auto r = to_pixel_rect({0.0, 0.0, 1.0, 1.0, 1.0}, 40, 30);
    EXPECT_EQ(r.width(), 40);
    EXPECT_EQ(r.height(), 30);
}

TEST(SkinImage, ValidatesSize) {
    EXPECT_THROW(SkinImage("x", 0, 4, {}), Error);
    EXPECT_THROW(SkinImage("x", 2, 2, std::vector<std::uint8_t>(11)), Error);
    const auto img = SkinImage::filled("x", 3, 2, 7);
    EXPECT_EQ(img.at(2, 1, 2), 7);
}

TEST(Hash, StableAcrossRunsAndPlatforms) {
    // FNV-1a 64 reference values.
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(StableHasher(1).add("x").digest(), StableHasher(1).add("x").digest());
    EXPECT_NE(StableHasher(1).add("ab").add("c").digest(), StableHasher(1).add("a").add("bc").digest());
    EXPECT_EQ(to_hex(0xabcULL), "0000000000000abc");
}

TEST(Hash, SplitMixBelowStaysInRange) {
    SplitMix64 rng(9);
    std::vector<int> hist(7, 0);
    for (int i = 0; i < 7000; ++i) ++hist[rng.below(7)];
    for (int h : hist) EXPECT_GT(h, 800);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform01();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(ImageIo, PngRoundTrip) {
    const auto img = random_image("a", 17, 9, 3);
    const auto decoded = decode_image(encode_png(img), "a");
    EXPECT_TRUE(decoded.same_pixels(img));
}

TEST(ImageIo, RejectsNonImages) {
    const std::string text = "definitely not an image";
    const std::vector<std::uint8_t> bytes(text.begin(), text.end());
    EXPECT_EQ(error_code_of([&] { decode_image(bytes, "t"); }), ErrorCode::unsupported_media);
    EXPECT_EQ(error_code_of([] { decode_image({}, "t"); }), ErrorCode::unsupported_media);
}

TEST(ImageIo, MaskRoundTrip) {
    std::vector<std::uint8_t> bits(13 * 5);
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (i * 7 % 3 == 0) ? 1 : 0;
    const MaskImage mask("m", 13, 5, bits);
    EXPECT_EQ(decode_mask_png(encode_mask_png(mask), "m"), mask);
}

TEST(ImageIo, ResizeKeepsUniformColorAndDimensions) {
    const auto img = SkinImage::filled("u", 10, 7, 128);
    const auto big = resize(img, 33, 20);
    EXPECT_EQ(big.width(), 33);
    EXPECT_EQ(big.height(), 20);
    for (auto p : big.pixels()) EXPECT_EQ(p, 128);
    EXPECT_TRUE(resize(img, 10, 7).same_pixels(img));
}

TEST(ImageIo, Sha256KnownVector) {
    const std::string abc = "abc";
    EXPECT_EQ(sha256_hex(std::vector<std::uint8_t>(abc.begin(), abc.end())),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ImageIo, FileHelpersCreateParents) {
    TempDir dir;
    const auto img = random_image("f", 8, 8, 1);
    write_png_file(dir / "nested/deeper/f.png", img);
    EXPECT_TRUE(read_image_file(dir / "nested/deeper/f.png", "f").same_pixels(img));
    EXPECT_EQ(error_code_of([&] { read_file(dir / "missing.bin"); }), ErrorCode::io_error);
}

}  // namespace
}  // namespace skingen
