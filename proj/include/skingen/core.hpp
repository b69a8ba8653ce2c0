// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skingen/error.hpp"

namespace skingen {

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

// Matching key for condition names: lowercased, whitespace-trimmed.
std::string condition_key(std::string_view name);

enum class ImageSource { user_upload, dataset, generated };

std::string_view to_string(ImageSource source);
ImageSource image_source_from_string(std::string_view text);

// Interleaved 8-bit RGB raster. Immutable once constructed.
class SkinImage {
public:
    SkinImage(std::string id, int width, int height, std::vector<std::uint8_t> pixels,
              ImageSource source = ImageSource::dataset,
              std::optional<std::string> label = std::nullopt);

    static SkinImage filled(std::string id, int width, int height, std::uint8_t value,
                            ImageSource source = ImageSource::dataset);

    const std::string& id() const noexcept { return id_; }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    ImageSource source() const noexcept { return source_; }
    const std::optional<std::string>& label() const noexcept { return label_; }
    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

    std::uint8_t at(int x, int y, int channel) const {
        return pixels_[(static_cast<std::size_t>(y) * width_ + x) * 3 + channel];
    }

    // Same pixels, different identity / provenance.
    SkinImage with_id(std::string id) const;
    SkinImage with_source(ImageSource source) const;

    bool same_pixels(const SkinImage& other) const;

private:
    std::string id_;
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
    ImageSource source_;
    std::optional<std::string> label_;
};

struct NormalizedCondition {
    std::string name;
    bool canonical = false;

    bool operator==(const NormalizedCondition&) const = default;
};

class ConditionVocabulary {
public:
    explicit ConditionVocabulary(std::vector<std::string> names);

    // Newline-delimited UTF-8, one label per line. Blank lines are skipped.
    static ConditionVocabulary load(const std::filesystem::path& path);
    static ConditionVocabulary parse(std::string_view text);

    // The 114-label Fitzpatrick17k vocabulary.
    static const ConditionVocabulary& fitzpatrick17k();

    std::span<const std::string> names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }

    // Canonical entry for a name, matched on condition_key.
    const std::string* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Unknown names come back trimmed (case preserved) with canonical = false.
NormalizedCondition normalize_condition(std::string_view name, const ConditionVocabulary& vocab);

struct Diagnosis {
    NormalizedCondition primary;
    std::vector<NormalizedCondition> alternatives;
    std::string narrative;
    std::string image_id;

    // Primary first, then alternatives.
    std::vector<std::string> condition_names() const;
    void validate() const;
};

// Normalized [0,1]² rectangle.
struct BoundingBox {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 1.0;
    double y1 = 1.0;
    double confidence = 1.0;

    bool valid() const;
    void validate() const;

    bool operator==(const BoundingBox&) const = default;
};

// Pixel-space rectangle [x0, x1) × [y0, y1) covered by a normalized box.
struct PixelRect {
    int x0, y0, x1, y1;
    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
};

PixelRect to_pixel_rect(const BoundingBox& box, int width, int height);

class MaskImage {
public:
    MaskImage(std::string image_id, int width, int height, std::vector<std::uint8_t> bits);

    const std::string& image_id() const noexcept { return image_id_; }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    // One byte per pixel, 0 or 1, row-major.
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    std::size_t set_count() const;

    bool operator==(const MaskImage&) const = default;

private:
    std::string image_id_;
    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

// "<label>" or "<label>, <description>". Labels may not contain commas.
struct Caption {
    std::string label;
    std::string description;

    Caption() = default;
    Caption(std::string label, std::string description = {});

    std::string serialize() const;
    static Caption parse(std::string_view text);

    bool operator==(const Caption&) const = default;
};

// Unit-L2 real vector.
class Embedding {
public:
    // Normalizes; throws numeric_error on non-finite entries or zero norm.
    static Embedding from_raw(std::vector<double> values);
    // Stored vectors: kept bit-for-bit, but the norm must already be 1 (±1e-9).
    static Embedding from_unit(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t dimension() const noexcept { return values_.size(); }

    bool operator==(const Embedding&) const = default;

private:
    explicit Embedding(std::vector<double> values) : values_(std::move(values)) {}
    std::vector<double> values_;
};

// Dot product of two unit vectors; dimension mismatch is invalid_argument.
double cosine(const Embedding& a, const Embedding& b);

struct WeightedCondition {
    std::string label;
    double weight = 1.0;

    bool operator==(const WeightedCondition&) const = default;
};

// Highest weight wins; equal weights resolve to the lexicographically smallest
// label. Throws invalid_record on an empty list.
const std::string& top_condition(std::span<const WeightedCondition> conditions);

}  // namespace skingen
