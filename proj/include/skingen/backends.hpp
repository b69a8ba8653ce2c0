// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "skingen/core.hpp"

namespace skingen {

enum class GenerationStrategy {
    lora_text,     // LoRA, text prompt only
    lora_plus_ip,  // LoRA fused with an image-prompt adapter
    ip_only,       // zero-shot image-prompt adapter
    ip_finetuned,  // image-prompt adapter fine-tuned on the 30-shot subset
};

std::string_view to_string(GenerationStrategy strategy);
GenerationStrategy strategy_from_string(std::string_view text);

// Model roles. Implementations must tolerate concurrent const calls; adapters
// around non-reentrant processes serialize internally.

class DiagnoserBackend {
public:
    virtual ~DiagnoserBackend() = default;
    virtual std::string answer(const SkinImage& image, std::string_view prompt) const = 0;
};

class DetectorBackend {
public:
    virtual ~DetectorBackend() = default;
    // Boxes ordered by descending confidence.
    virtual std::vector<BoundingBox> detect(const SkinImage& image,
                                            std::string_view text_prompt) const = 0;
};

class SegmenterBackend {
public:
    virtual ~SegmenterBackend() = default;
    virtual MaskImage segment(const SkinImage& image, const BoundingBox& box) const = 0;
};

class CaptionerBackend {
public:
    virtual ~CaptionerBackend() = default;
    virtual std::string describe(const SkinImage& image) const = 0;
};

class GeneratorBackend {
public:
    virtual ~GeneratorBackend() = default;
    virtual SkinImage generate(std::string_view text_prompt, const SkinImage* image_prompt,
                               GenerationStrategy strategy, std::uint64_t seed) const = 0;
};

class EmbedderBackend {
public:
    virtual ~EmbedderBackend() = default;
    virtual Embedding embed_image(const SkinImage& image) const = 0;
    virtual Embedding embed_text(std::string_view text) const = 0;
};

// ---------------------------------------------------------------------------
// Deterministic stubs. Every output is a pure function of the declared inputs
// plus the configured seed.

inline constexpr std::size_t kDefaultEmbeddingDimension = 64;
inline constexpr int kDefaultGenerationResolution = 512;

// Unit vector keyed on (key, seed). dimension must be >= 2.
Embedding stub_embed(std::string_view key, std::size_t dimension, std::uint64_t seed);

class StubDiagnoser final : public DiagnoserBackend {
public:
    explicit StubDiagnoser(const ConditionVocabulary& vocab, std::uint64_t seed = 0);

    // Fixed reply for a prompt, overriding the hashed answer.
    StubDiagnoser& script(std::string prompt, std::string response);

    std::string answer(const SkinImage& image, std::string_view prompt) const override;

private:
    std::vector<std::string> labels_;
    std::uint64_t seed_;
    std::map<std::string, std::string, std::less<>> scripted_;
};

class StubDetector final : public DetectorBackend {
public:
    explicit StubDetector(std::uint64_t seed = 0) : seed_(seed) {}
    std::vector<BoundingBox> detect(const SkinImage& image,
                                    std::string_view text_prompt) const override;

private:
    std::uint64_t seed_;
};

// Axis-aligned ellipse inscribed in the box's pixel rectangle.
class StubSegmenter final : public SegmenterBackend {
public:
    MaskImage segment(const SkinImage& image, const BoundingBox& box) const override;
};

class StubCaptioner final : public CaptionerBackend {
public:
    explicit StubCaptioner(std::uint64_t seed = 0);
    StubCaptioner(std::uint64_t seed, std::vector<std::string> phrases);

    std::string describe(const SkinImage& image) const override;

private:
    std::uint64_t seed_;
    std::vector<std::string> phrases_;
};

class StubGenerator final : public GeneratorBackend {
public:
    // `model` names the adapter weights the stub stands in for, so different
    // trained models yield different outputs under one seed.
    explicit StubGenerator(std::string model = "base", int width = kDefaultGenerationResolution,
                           int height = kDefaultGenerationResolution);

    SkinImage generate(std::string_view text_prompt, const SkinImage* image_prompt,
                       GenerationStrategy strategy, std::uint64_t seed) const override;

    const std::string& model() const noexcept { return model_; }

private:
    std::string model_;
    int width_;
    int height_;
};

// Text: stub_embed of the text. Image: random projection of a grid of mean
// cell colours, so identical pixels give identical vectors and similar images
// give nearby ones.
class StubEmbedder final : public EmbedderBackend {
public:
    StubEmbedder(std::size_t dimension = kDefaultEmbeddingDimension, std::uint64_t seed = 0,
                 int grid = 4);

    Embedding embed_image(const SkinImage& image) const override;
    Embedding embed_text(std::string_view text) const override;

private:
    std::size_t dimension_;
    std::uint64_t seed_;
    int grid_;
    std::vector<double> projection_;  // dimension_ × (3·grid² + 1), row-major
};

// ---------------------------------------------------------------------------
// Registry

// Role → implementation configuration, read from an INI-style file:
//
//   [generator]
//   impl = stub
//   seed = 3
//
//   [captioner]
//   impl = remote
//   endpoint = http://127.0.0.1:9000
//
// Roles: diagnoser, detector, segmenter, captioner, generator,
// semantic_embedder, structural_embedder. Missing roles default to stubs.
struct BackendConfig {
    struct Role {
        std::string impl = "stub";
        std::map<std::string, std::string> params;

        std::string get(const std::string& key, const std::string& fallback) const;
        std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
        double get_double(const std::string& key, double fallback) const;
    };

    std::map<std::string, Role> roles;

    static BackendConfig parse(std::string_view text);
    static BackendConfig load(const std::filesystem::path& path);

    const Role& role(const std::string& name) const;
};

struct BackendSet {
    std::shared_ptr<const DiagnoserBackend> diagnoser;
    std::shared_ptr<const DetectorBackend> detector;
    std::shared_ptr<const SegmenterBackend> segmenter;
    std::shared_ptr<const CaptionerBackend> captioner;
    std::shared_ptr<const GeneratorBackend> generator;
    std::shared_ptr<const EmbedderBackend> semantic_embedder;
    std::shared_ptr<const EmbedderBackend> structural_embedder;

    // No trained model behind any role.
    static BackendSet stubs(const ConditionVocabulary& vocab, std::uint64_t seed = 0);
};

inline constexpr double kDefaultDetectionThreshold = 0.3;

class BackendRegistry {
public:
    BackendRegistry(BackendConfig config, const ConditionVocabulary& vocab,
                    std::uint64_t global_seed = 0);

    BackendSet build() const;

    // Generator loaded with the named adapter weights (evaluation harness).
    std::shared_ptr<const GeneratorBackend> generator_for_model(const std::string& model) const;

    double detection_threshold() const;
    const BackendConfig& config() const noexcept { return config_; }

private:
    BackendConfig config_;
    const ConditionVocabulary* vocab_;
    std::uint64_t global_seed_;
};

}  // namespace skingen
