// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/backends.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "skingen/diagnosis.hpp"
#include "skingen/hash.hpp"
#include "skingen/image_io.hpp"

namespace skingen {

std::string_view to_string(GenerationStrategy strategy) {
    switch (strategy) {
        case GenerationStrategy::lora_text: return "LORA_TEXT";
        case GenerationStrategy::lora_plus_ip: return "LORA_PLUS_IP";
        case GenerationStrategy::ip_only: return "IP_ONLY";
        case GenerationStrategy::ip_finetuned: return "IP_FINETUNED";
    }
    return "LORA_TEXT";
}

GenerationStrategy strategy_from_string(std::string_view text) {
    for (auto s : {GenerationStrategy::lora_text, GenerationStrategy::lora_plus_ip,
                   GenerationStrategy::ip_only, GenerationStrategy::ip_finetuned}) {
        if (to_string(s) == text) return s;
    }
    fail(ErrorCode::invalid_argument, fmt::format("unknown generation strategy '{}'", text));
}

Embedding stub_embed(std::string_view key, std::size_t dimension, std::uint64_t seed) {
    require(dimension >= 2, fmt::format("stub embedding dimension {} < 2", dimension));
    SplitMix64 rng(StableHasher(seed).add("stub_embed").add(key).digest());
    std::vector<double> values(dimension);
    for (;;) {
        for (double& v : values) v = rng.uniform(-1.0, 1.0);
        double sum_sq = 0.0;
        for (double v : values) sum_sq += v * v;
        if (sum_sq > 1e-12) break;
    }
    return Embedding::from_raw(std::move(values));
}

// ---------------------------------------------------------------------------

namespace {

std::string capitalize(std::string text) {
    if (!text.empty() && text[0] >= 'a' && text[0] <= 'z') text[0] = static_cast<char>(text[0] - 32);
    return text;
}

}  // namespace

StubDiagnoser::StubDiagnoser(const ConditionVocabulary& vocab, std::uint64_t seed)
    : labels_(vocab.names().begin(), vocab.names().end()), seed_(seed) {}

StubDiagnoser& StubDiagnoser::script(std::string prompt, std::string response) {
    scripted_[std::move(prompt)] = std::move(response);
    return *this;
}

std::string StubDiagnoser::answer(const SkinImage& image, std::string_view prompt) const {
    if (auto it = scripted_.find(prompt); it != scripted_.end()) return it->second;

    const std::uint64_t key = StableHasher(seed_).add("diagnoser").add(image.id()).digest();
    const std::string& primary = labels_[key % labels_.size()];

    if (prompt == kAlternativesPrompt) {
        SplitMix64 rng(key ^ 0xa17e4a7e5ULL);
        std::vector<std::string> picks;
        const std::size_t want = std::min<std::size_t>(5, labels_.size());
        while (picks.size() < want) {
            const std::string& label = labels_[rng.below(labels_.size())];
            if (std::find(picks.begin(), picks.end(), label) == picks.end()) picks.push_back(label);
        }
        std::string out = "[";
        for (std::size_t i = 0; i < picks.size(); ++i) {
            if (i) out += ", ";
            out += fmt::format("\"{}\"", capitalize(picks[i]));
        }
        return out + "]";
    }
    if (prompt == kPrimaryPrompt) {
        return fmt::format(
            "This appears to be {0}. The visible lesion shows features commonly seen in {0}; "
            "a dermatologist should confirm the diagnosis.",
            primary);
    }
    return fmt::format("Based on the image, the lesion is most consistent with {}.", primary);
}

std::vector<BoundingBox> StubDetector::detect(const SkinImage& image,
                                              std::string_view text_prompt) const {
    SplitMix64 rng(StableHasher(seed_).add("detector").add(image.id()).add(text_prompt).digest());
    BoundingBox box;
    const double w = rng.uniform(0.2, 0.8);
    const double h = rng.uniform(0.2, 0.8);
    box.x0 = rng.uniform(0.0, 1.0 - w);
    box.y0 = rng.uniform(0.0, 1.0 - h);
    box.x1 = box.x0 + w;
    box.y1 = box.y0 + h;
    box.confidence = rng.uniform(0.5, 1.0);
    return {box};
}

MaskImage StubSegmenter::segment(const SkinImage& image, const BoundingBox& box) const {
    box.validate();
    const PixelRect rect = to_pixel_rect(box, image.width(), image.height());
    // An ellipse needs at least two pixels along each axis to be non-trivial.
    if (rect.width() < 2 || rect.height() < 2) {
        fail(ErrorCode::degenerate_region,
             fmt::format("box covers a {}x{} pixel region", rect.width(), rect.height()));
    }
    const double cx = (rect.x0 + rect.x1) / 2.0;
    const double cy = (rect.y0 + rect.y1) / 2.0;
    const double rx = rect.width() / 2.0;
    const double ry = rect.height() / 2.0;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(image.width()) * image.height(), 0);
    for (int y = rect.y0; y < rect.y1; ++y) {
        const double dy = (y + 0.5 - cy) / ry;
        for (int x = rect.x0; x < rect.x1; ++x) {
            const double dx = (x + 0.5 - cx) / rx;
            if (dx * dx + dy * dy <= 1.0)
                bits[static_cast<std::size_t>(y) * image.width() + x] = 1;
        }
    }
    return MaskImage(image.id(), image.width(), image.height(), std::move(bits));
}

StubCaptioner::StubCaptioner(std::uint64_t seed)
    : StubCaptioner(seed, {"on the arm", "red scaly plaques on the elbow", "on her face",
                           "small papules on the cheek", "on the back",
                           "itchy patch on the leg", "raised bumps on the hand",
                           "on the neck"}) {}

StubCaptioner::StubCaptioner(std::uint64_t seed, std::vector<std::string> phrases)
    : seed_(seed), phrases_(std::move(phrases)) {}

std::string StubCaptioner::describe(const SkinImage& image) const {
    if (phrases_.empty()) return {};
    const std::uint64_t key = StableHasher(seed_).add("captioner").add(image.id()).digest();
    return phrases_[key % phrases_.size()];
}

// ---------------------------------------------------------------------------

StubGenerator::StubGenerator(std::string model, int width, int height)
    : model_(std::move(model)), width_(width), height_(height) {
    require(width_ >= 1 && height_ >= 1, "generator resolution must be positive");
}

SkinImage StubGenerator::generate(std::string_view text_prompt, const SkinImage* image_prompt,
                                  GenerationStrategy strategy, std::uint64_t seed) const {
    const std::uint64_t key = StableHasher(seed)
                                  .add("generator")
                                  .add(model_)
                                  .add(text_prompt)
                                  .add(image_prompt ? std::string_view(image_prompt->id())
                                                    : std::string_view("<none>"))
                                  .add(to_string(strategy))
                                  .digest();
    SplitMix64 rng(key);

    // Base tone keyed on the text alone, so one caption gives related images
    // across strategies and seeds.
    SplitMix64 tone(StableHasher(0).add("tone").add(text_prompt).digest());
    const double base[3] = {tone.uniform(170, 235), tone.uniform(120, 180), tone.uniform(95, 150)};

    struct Blob {
        double cx, cy, rx, ry, r, g, b;
    };
    std::vector<Blob> blobs(3 + rng.below(4));
    for (auto& blob : blobs) {
        blob = {rng.uniform(0.1, 0.9) * width_, rng.uniform(0.1, 0.9) * height_,
                rng.uniform(0.04, 0.2) * width_, rng.uniform(0.04, 0.2) * height_,
                rng.uniform(120, 200), rng.uniform(40, 100), rng.uniform(40, 90)};
    }

    std::optional<SkinImage> reference;
    double reference_weight = 0.0;
    if (image_prompt) {
        reference = resize(*image_prompt, width_, height_);
        switch (strategy) {
            case GenerationStrategy::ip_only: reference_weight = 0.6; break;
            case GenerationStrategy::ip_finetuned: reference_weight = 0.4; break;
            default: reference_weight = 0.5; break;
        }
    }

    const std::size_t count = static_cast<std::size_t>(width_) * height_;
    std::vector<double> rgb(count * 3);
    for (std::size_t i = 0; i < count; ++i) std::copy(base, base + 3, rgb.begin() + i * 3);
    for (const auto& blob : blobs) {
        // Only pixels inside the blob's bounding box can have d2 < 1.
        const int x0 = std::max(0, static_cast<int>(std::floor(blob.cx - blob.rx)));
        const int x1 = std::min(width_, static_cast<int>(std::ceil(blob.cx + blob.rx)) + 1);
        const int y0 = std::max(0, static_cast<int>(std::floor(blob.cy - blob.ry)));
        const int y1 = std::min(height_, static_cast<int>(std::ceil(blob.cy + blob.ry)) + 1);
        for (int y = y0; y < y1; ++y) {
            const double dy = (y + 0.5 - blob.cy) / blob.ry;
            for (int x = x0; x < x1; ++x) {
                const double dx = (x + 0.5 - blob.cx) / blob.rx;
                const double d2 = dx * dx + dy * dy;
                if (d2 >= 1.0) continue;
                const double w = 1.0 - d2;
                double* px = &rgb[(static_cast<std::size_t>(y) * width_ + x) * 3];
                px[0] = px[0] * (1 - w) + blob.r * w;
                px[1] = px[1] * (1 - w) + blob.g * w;
                px[2] = px[2] * (1 - w) + blob.b * w;
            }
        }
    }

    std::vector<std::uint8_t> pixels(count * 3);
    const auto ref = reference ? reference->pixels() : std::span<const std::uint8_t>{};
    for (std::size_t idx = 0; idx < count; ++idx) {
        const std::uint64_t noise = mix64(key + idx);
        for (int c = 0; c < 3; ++c) {
            double v = rgb[idx * 3 + c] + static_cast<double>((noise >> (c * 8)) & 0xF) - 7.5;
            if (reference) v = v * (1 - reference_weight) + ref[idx * 3 + c] * reference_weight;
            pixels[idx * 3 + c] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return SkinImage("gen-" + to_hex(key), width_, height_, std::move(pixels),
                     ImageSource::generated);
}

// ---------------------------------------------------------------------------

StubEmbedder::StubEmbedder(std::size_t dimension, std::uint64_t seed, int grid)
    : dimension_(dimension), seed_(seed), grid_(grid) {
    require(dimension_ >= 2, "embedder dimension must be >= 2");
    require(grid_ >= 1, "embedder grid must be >= 1");
    const std::size_t features = 3 * static_cast<std::size_t>(grid_) * grid_ + 1;
    projection_.resize(dimension_ * features);
    SplitMix64 rng(StableHasher(seed_).add("projection").add(static_cast<std::uint64_t>(grid_)).digest());
    for (double& w : projection_) w = rng.uniform(-1.0, 1.0);
}

Embedding StubEmbedder::embed_image(const SkinImage& image) const {
    const std::size_t cells = static_cast<std::size_t>(grid_) * grid_;
    std::vector<double> sums(3 * cells, 0.0);
    std::vector<double> counts(cells, 0.0);
    for (int y = 0; y < image.height(); ++y) {
        const int gy = y * grid_ / image.height();
        for (int x = 0; x < image.width(); ++x) {
            const std::size_t cell = static_cast<std::size_t>(gy) * grid_ + x * grid_ / image.width();
            counts[cell] += 1.0;
            for (int c = 0; c < 3; ++c) sums[cell * 3 + c] += image.at(x, y, c);
        }
    }
    std::vector<double> features(3 * cells + 1, 1.0);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        for (int c = 0; c < 3; ++c) {
            const double mean = counts[cell] > 0 ? sums[cell * 3 + c] / counts[cell] : 127.5;
            features[cell * 3 + c] = mean / 127.5 - 1.0;
        }
    }
    std::vector<double> out(dimension_, 0.0);
    for (std::size_t i = 0; i < dimension_; ++i) {
        const double* row = projection_.data() + i * features.size();
        for (std::size_t j = 0; j < features.size(); ++j) out[i] += row[j] * features[j];
    }
    return Embedding::from_raw(std::move(out));
}

Embedding StubEmbedder::embed_text(std::string_view text) const {
    return stub_embed(text, dimension_, seed_);
}

BackendSet BackendSet::stubs(const ConditionVocabulary& vocab, std::uint64_t seed) {
    BackendSet set;
    set.diagnoser = std::make_shared<StubDiagnoser>(vocab, seed);
    set.detector = std::make_shared<StubDetector>(seed);
    set.segmenter = std::make_shared<StubSegmenter>();
    set.captioner = std::make_shared<StubCaptioner>(seed);
    set.generator = std::make_shared<StubGenerator>();
    set.semantic_embedder = std::make_shared<StubEmbedder>(kDefaultEmbeddingDimension, seed, 4);
    set.structural_embedder = std::make_shared<StubEmbedder>(kDefaultEmbeddingDimension, seed + 1, 8);
    return set;
}

}  // namespace skingen
