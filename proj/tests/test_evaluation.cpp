// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "skingen/evaluation.hpp"
#include "skingen/synthetic.hpp"
#include "test_support.hpp"

namespace skingen {
namespace {

using testing::error_code_of;
using testing::random_image;

// Embeds the first pixel's red channel as a direction, so tests can force
// orthogonal or parallel vectors.
class AxisEmbedder final : public EmbedderBackend {
public:
    Embedding embed_image(const SkinImage& image) const override {
        return image.at(0, 0, 0) < 128 ? Embedding::from_raw({1.0, 0.0}) : Embedding::from_raw({0.0, 1.0});
    }
    Embedding embed_text(std::string_view) const override { return Embedding::from_raw({1.0, 0.0}); }
};

class ZeroEmbedder final : public EmbedderBackend {
public:
    Embedding embed_image(const SkinImage&) const override { return Embedding::from_raw({0.0, 0.0}); }
    Embedding embed_text(std::string_view) const override { return Embedding::from_raw({0.0, 0.0}); }
};

std::vector<TrainedMetricRow> rows_from(const std::array<std::array<double, 3>, 6>& v) {
    std::vector<TrainedMetricRow> rows;
    std::size_t i = 0;
    for (auto t : kAllTiers)
        for (auto m : kAllModes) {
            rows.push_back({t, m, {"m" + std::to_string(i), v[i][0], v[i][1], v[i][2]}});
            ++i;
        }
    return rows;
}

TEST(EmbeddingScore, IdentityOrthogonalityAndOracle) {
    const StubEmbedder emb(32, 1);
    const auto a = random_image("a", 16, 16, 1);
    const auto b = random_image("b", 16, 16, 2);
    EXPECT_NEAR(embedding_score(a, a, emb), 1.0, 1e-6);
    EXPECT_NEAR(embedding_score(a, b, emb), embedding_score(b, a, emb), 1e-9);
    const auto ea = emb.embed_image(a);
    const auto eb = emb.embed_image(b);
    double dot = 0.0;
    for (std::size_t i = 0; i < ea.dimension(); ++i) dot += ea.values()[i] * eb.values()[i];
    EXPECT_NEAR(embedding_score(a, b, emb), dot, 1e-12);

    const AxisEmbedder axis;
    EXPECT_NEAR(embedding_score(SkinImage::filled("d", 2, 2, 10), SkinImage::filled("l", 2, 2, 200), axis), 0.0,
                1e-6);
    EXPECT_EQ(error_code_of([&] { embedding_score(a, b, ZeroEmbedder()); }), ErrorCode::numeric_error);
}

TEST(PixelMse, IdentitiesAndScale) {
    const auto a = random_image("a", 9, 7, 1);
    const auto b = random_image("b", 9, 7, 2);
    EXPECT_EQ(pixel_mse(a, a), 0.0);
    EXPECT_EQ(pixel_mse(a, b), pixel_mse(b, a));
    EXPECT_GT(pixel_mse(a, b), 0.0);
    EXPECT_EQ(pixel_mse(SkinImage::filled("k", 5, 5, 0), SkinImage::filled("w", 5, 5, 255)), 10.0);
    EXPECT_EQ(error_code_of([&] { pixel_mse(a, random_image("c", 7, 9, 0)); }), ErrorCode::invalid_argument);

    // Hand value: one channel off by 51 of 12 values -> (0.2^2)/12 * 10.
    std::vector<std::uint8_t> px(12, 0);
    const SkinImage base("z", 2, 2, px);
    px[5] = 51;
    EXPECT_NEAR(pixel_mse(base, SkinImage("o", 2, 2, px)), 0.04 / 12.0 * 10.0, 1e-15);
}

TEST(EvaluateModel, MeansOverPairs) {
    const StubEmbedder emb(16);
    const auto a = random_image("a", 8, 8, 1);
    const std::vector<EvalPair> same{{a, "acne", a}};
    const auto row = evaluate_model(same, "m", emb, emb, 8);
    EXPECT_EQ(row.model_name, "m");
    EXPECT_NEAR(row.clip, 1.0, 1e-9);
    EXPECT_NEAR(row.dino, 1.0, 1e-9);
    EXPECT_EQ(row.mse, 0.0);

    // mse 0 and 10/5 = 2 via a partial difference. A 5x1 row resized to 5x5 is
    // replicated, so the ratio survives.
    std::vector<std::uint8_t> half(5 * 3, 0);
    for (int i = 0; i < 3; ++i) half[i] = 255;
    const SkinImage black("k", 5, 1, std::vector<std::uint8_t>(15, 0));
    const SkinImage one_white("w", 5, 1, half);
    const std::vector<EvalPair> two{{black, "x", black}, {black, "y", one_white}};
    EXPECT_NEAR(evaluate_model(two, "m", emb, emb, 5).mse, 1.0, 1e-12);

    EXPECT_EQ(error_code_of([&] { evaluate_model({}, "m", emb, emb); }), ErrorCode::invalid_argument);
}

TEST(Aggregates, NullAndLinear) {
    const std::array<std::array<double, 3>, 6> v = {{{0.7, 0.8, 1.3},
                                                     {0.72, 0.79, 1.1},
                                                     {0.75, 0.81, 1.2},
                                                     {0.77, 0.84, 1.25},
                                                     {0.69, 0.75, 1.05},
                                                     {0.73, 0.74, 1.15}}};
    const auto rows = rows_from(v);
    const auto g = blip_gain(rows);
    const auto s = scaling_effect(rows);
    EXPECT_NEAR(g.clip, ((0.72 - 0.7) + (0.77 - 0.75) + (0.73 - 0.69)) / 3, 1e-12);
    EXPECT_NEAR(g.mse, ((1.3 - 1.1) + (1.2 - 1.25) + (1.05 - 1.15)) / 3, 1e-12);
    EXPECT_NEAR(s.dino, ((0.75 - 0.81) + (0.74 - 0.84)) / 2, 1e-12);
    EXPECT_NEAR(s.mse, ((1.2 - 1.05) + (1.25 - 1.15)) / 2, 1e-12);

    auto scaled = v;
    for (auto& r : scaled)
        for (auto& x : r) x *= 3.0;
    const auto g3 = blip_gain(rows_from(scaled));
    const auto s3 = scaling_effect(rows_from(scaled));
    EXPECT_NEAR(g3.clip, 3 * g.clip, 1e-12);
    EXPECT_NEAR(g3.dino, 3 * g.dino, 1e-12);
    EXPECT_NEAR(g3.mse, 3 * g.mse, 1e-12);
    EXPECT_NEAR(s3.clip, 3 * s.clip, 1e-12);
    EXPECT_NEAR(s3.mse, 3 * s.mse, 1e-12);

    std::array<std::array<double, 3>, 6> flat{};
    for (auto& r : flat) r = {0.5, 0.6, 1.5};
    const auto g0 = blip_gain(rows_from(flat));
    const auto s0 = scaling_effect(rows_from(flat));
    EXPECT_EQ(g0.clip, 0.0);
    EXPECT_EQ(g0.dino, 0.0);
    EXPECT_EQ(g0.mse, 0.0);
    EXPECT_EQ(s0.clip, 0.0);
    EXPECT_EQ(s0.mse, 0.0);
}

TEST(Aggregates, MissingOrDuplicateCells) {
    auto rows = rows_from({});
    rows.pop_back();
    EXPECT_EQ(error_code_of([&] { blip_gain(rows); }), ErrorCode::invalid_argument);
    rows.push_back(rows.front());
    EXPECT_EQ(error_code_of([&] { scaling_effect(rows); }), ErrorCode::invalid_argument);
}

TEST(FormatMetric, RoundingRules) {
    EXPECT_EQ(format_metric(-0.045, true), "-0.05");
    EXPECT_EQ(format_metric(0.005, true), "+0.01");
    EXPECT_EQ(format_metric(-0.0001, true), "+0.00");
    EXPECT_EQ(format_metric(0.0), "0.00");
    EXPECT_EQ(format_metric(1.3149), "1.31");
    EXPECT_EQ(format_metric(2.0), "2.00");
}

TEST(Published, F17kAggregatesWithinTolerance) {
    const auto report = published_report(DatasetTag::f17k);
    ASSERT_EQ(report.trained.size(), 6u);
    const auto g = report.blip_gain();
    const auto s = report.scaling_effect();
    const auto pg = published_blip_gain(DatasetTag::f17k);
    const auto ps = published_scaling_effect(DatasetTag::f17k);
    for (auto [got, want] : {std::pair{g.clip, pg.clip}, {g.dino, pg.dino}, {g.mse, pg.mse},
                             {s.clip, ps.clip}, {s.dino, ps.dino}, {s.mse, ps.mse}})
        EXPECT_LE(std::abs(got - want), 0.02 + 1e-9);
    EXPECT_EQ(format_metric(g.dino, true), "+0.00");
    EXPECT_EQ(format_metric(s.clip, true), "-0.05");
    EXPECT_NEAR(g.clip, 0.02 / 3, 1e-9);
    EXPECT_NEAR(s.mse, 0.07, 1e-9);
}

TEST(Published, ScinClipGainDiverges) {
    const auto g = published_report(DatasetTag::scin).blip_gain();
    EXPECT_NEAR(g.clip, 0.08 / 3, 1e-9);
    EXPECT_GT(std::abs(g.clip - published_blip_gain(DatasetTag::scin).clip), 0.05);
}

TEST(Report, CsvLayout) {
    const auto csv = published_report(DatasetTag::f17k).to_csv();
    EXPECT_TRUE(csv.starts_with("model_name,clip,dino,mse\n0-shot,0.61,0.69,2.09\n"));
    EXPECT_NE(csv.find("\nBLIP Gain,+0.01,+0.00,+0.00\n"), std::string::npos);
    EXPECT_NE(csv.find("\nScaling Effect,-0.05,-0.06,+0.07\n"), std::string::npos);
    EXPECT_FALSE(published_report(DatasetTag::f17k).to_csv(false).starts_with("model_name"));
}

TEST(SampleEvalPairs, DeterministicSubsetAndGeneratorCalls) {
    DatasetSubset subset;
    subset.name = "f17k-5-shot";
    for (int i = 0; i < 30; ++i) subset.items.push_back({"img" + std::to_string(i), "label " + std::to_string(i)});
    testing::RecordingGenerator gen(8);
    const ImageLoader load = [](const SubsetItem& item) { return synthetic_image(item.image_ref, item.caption, 8, 0); };

    const auto a = sample_eval_pairs(subset, 10, 3, gen, load);
    const auto b = sample_eval_pairs(subset, 10, 3, gen, load);
    ASSERT_EQ(a.size(), 10u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].caption, b[i].caption);
        EXPECT_TRUE(a[i].generated.same_pixels(b[i].generated));
        EXPECT_EQ(a[i].original.id(), b[i].original.id());
        if (i) {
            EXPECT_LT(std::stoi(a[i - 1].caption.substr(6)), std::stoi(a[i].caption.substr(6)));
        }
    }
    for (const auto& call : gen.calls()) {
        EXPECT_FALSE(call.image_prompt_id);
        EXPECT_EQ(call.strategy, GenerationStrategy::lora_text);
        EXPECT_EQ(call.seed, 3u);
    }

    const auto whole = sample_eval_pairs(subset, 30, 3, gen, load);
    ASSERT_EQ(whole.size(), 30u);
    for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(whole[i].caption, subset.items[i].caption);
    EXPECT_EQ(error_code_of([&] { sample_eval_pairs(subset, 31, 3, gen, load); }), ErrorCode::invalid_argument);
}

TEST(SampleEvalPairs, HundredPairRunIsReproducible) {
    DatasetSubset subset;
    for (int i = 0; i < 570; ++i) subset.items.push_back({"img" + std::to_string(i), "label " + std::to_string(i % 114)});
    const StubGenerator gen("f17k_5shot", 32, 32);
    const StubEmbedder sem(32, 0, 4);
    const StubEmbedder str(32, 1, 8);
    const ImageLoader load = [](const SubsetItem& item) { return synthetic_image(item.image_ref, item.caption, 32, 0); };
    const auto run = [&] {
        const auto pairs = sample_eval_pairs(subset, 100, 1, gen, load);
        EXPECT_EQ(pairs.size(), 100u);
        return evaluate_model(pairs, "f17k_5shot", sem, str, 32);
    };
    const auto r1 = run();
    const auto r2 = run();
    EXPECT_EQ(r1.clip, r2.clip);
    EXPECT_EQ(r1.dino, r2.dino);
    EXPECT_EQ(r1.mse, r2.mse);
    EXPECT_GE(r1.clip, -1.0);
    EXPECT_LE(r1.clip, 1.0);
    EXPECT_GT(r1.mse, 0.0);
}

}  // namespace
}  // namespace skingen
