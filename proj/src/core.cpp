// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/core.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace skingen {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::backend_error: return "backend-error";
        case ErrorCode::diagnosis_parse_error: return "diagnosis-parse-error";
        case ErrorCode::degenerate_region: return "degenerate-region";
        case ErrorCode::lesion_not_found: return "lesion-not-found";
        case ErrorCode::empty_mask: return "empty-mask";
        case ErrorCode::generation_failed: return "generation-failed";
        case ErrorCode::invalid_record: return "invalid-record";
        case ErrorCode::missing_description: return "missing-description";
        case ErrorCode::io_error: return "io-error";
        case ErrorCode::numeric_error: return "numeric-error";
        case ErrorCode::schema_error: return "schema-error";
        case ErrorCode::insufficient_data: return "insufficient-data";
        case ErrorCode::unsupported_media: return "unsupported-media";
        case ErrorCode::not_found: return "not-found";
        case ErrorCode::precondition_failed: return "precondition-failed";
    }
    return "unknown";
}

ErrorCode error_code_from_string(std::string_view text) {
    for (int i = 0; i <= static_cast<int>(ErrorCode::precondition_failed); ++i) {
        const auto code = static_cast<ErrorCode>(i);
        if (to_string(code) == text) return code;
    }
    return ErrorCode::backend_error;
}

std::string trim(std::string_view text) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && is_space(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && is_space(static_cast<unsigned char>(text[end - 1]))) --end;
    return std::string(text.substr(begin, end - begin));
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string condition_key(std::string_view name) { return to_lower(trim(name)); }

// ---------------------------------------------------------------------------
// SkinImage

std::string_view to_string(ImageSource source) {
    switch (source) {
        case ImageSource::user_upload: return "user-upload";
        case ImageSource::dataset: return "dataset";
        case ImageSource::generated: return "generated";
    }
    return "dataset";
}

ImageSource image_source_from_string(std::string_view text) {
    if (text == "user-upload") return ImageSource::user_upload;
    if (text == "dataset") return ImageSource::dataset;
    if (text == "generated") return ImageSource::generated;
    fail(ErrorCode::invalid_argument, fmt::format("unknown image source '{}'", text));
}

SkinImage::SkinImage(std::string id, int width, int height, std::vector<std::uint8_t> pixels,
                     ImageSource source, std::optional<std::string> label)
    : id_(std::move(id)),
      width_(width),
      height_(height),
      pixels_(std::move(pixels)),
      source_(source),
      label_(std::move(label)) {
    require(width_ >= 1 && height_ >= 1,
            fmt::format("image '{}' has invalid size {}x{}", id_, width_, height_));
    require(pixels_.size() == static_cast<std::size_t>(width_) * height_ * 3,
            fmt::format("image '{}' pixel buffer has {} bytes, expected {}", id_, pixels_.size(),
                        static_cast<std::size_t>(width_) * height_ * 3));
}

SkinImage SkinImage::filled(std::string id, int width, int height, std::uint8_t value,
                            ImageSource source) {
    require(width >= 1 && height >= 1, "image dimensions must be positive");
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height * 3, value);
    return SkinImage(std::move(id), width, height, std::move(pixels), source);
}

SkinImage SkinImage::with_id(std::string id) const {
    SkinImage copy = *this;
    copy.id_ = std::move(id);
    return copy;
}

SkinImage SkinImage::with_source(ImageSource source) const {
    SkinImage copy = *this;
    copy.source_ = source;
    return copy;
}

bool SkinImage::same_pixels(const SkinImage& other) const {
    return width_ == other.width_ && height_ == other.height_ && pixels_ == other.pixels_;
}

// ---------------------------------------------------------------------------
// ConditionVocabulary

ConditionVocabulary::ConditionVocabulary(std::vector<std::string> names) {
    require(!names.empty(), "condition vocabulary is empty");
    names_.reserve(names.size());
    for (auto& raw : names) {
        std::string name = trim(raw);
        require(!name.empty(), "condition vocabulary contains an empty label");
        std::string key = condition_key(name);
        auto [it, inserted] = index_.emplace(key, names_.size());
        require(inserted, fmt::format("duplicate condition label '{}'", name));
        names_.push_back(std::move(name));
    }
}

ConditionVocabulary ConditionVocabulary::parse(std::string_view text) {
    std::vector<std::string> names;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::string label = trim(line);
        if (!label.empty()) names.push_back(std::move(label));
    }
    return ConditionVocabulary(std::move(names));
}

ConditionVocabulary ConditionVocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io_error, fmt::format("cannot read vocabulary '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

const ConditionVocabulary& ConditionVocabulary::fitzpatrick17k() {
    static const ConditionVocabulary vocab = [] {
        static constexpr std::array kLabels = {
#include "fitzpatrick17k_labels.inc"
        };
        return ConditionVocabulary(std::vector<std::string>(kLabels.begin(), kLabels.end()));
    }();
    return vocab;
}

const std::string* ConditionVocabulary::find(std::string_view name) const {
    auto it = index_.find(condition_key(name));
    return it == index_.end() ? nullptr : &names_[it->second];
}

NormalizedCondition normalize_condition(std::string_view name, const ConditionVocabulary& vocab) {
    std::string trimmed = trim(name);
    require(!trimmed.empty(), "condition name is empty");
    if (const std::string* canonical = vocab.find(trimmed)) return {*canonical, true};
    return {std::move(trimmed), false};
}

// ---------------------------------------------------------------------------
// Diagnosis

std::vector<std::string> Diagnosis::condition_names() const {
    std::vector<std::string> out;
    out.reserve(1 + alternatives.size());
    out.push_back(primary.name);
    for (const auto& alt : alternatives) out.push_back(alt.name);
    return out;
}

void Diagnosis::validate() const {
    require(!trim(primary.name).empty(), "diagnosis primary condition is empty");
    require(alternatives.size() <= 5, "diagnosis has more than 5 alternatives");
    std::vector<std::string> keys{condition_key(primary.name)};
    for (const auto& alt : alternatives) {
        std::string key = condition_key(alt.name);
        require(!key.empty(), "diagnosis alternative is empty");
        require(std::find(keys.begin(), keys.end(), key) == keys.end(),
                fmt::format("diagnosis repeats condition '{}'", alt.name));
        keys.push_back(std::move(key));
    }
}

// ---------------------------------------------------------------------------
// Boxes and masks

bool BoundingBox::valid() const {
    auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    return in_unit(x0) && in_unit(y0) && in_unit(x1) && in_unit(y1) && in_unit(confidence) &&
           x0 < x1 && y0 < y1;
}

void BoundingBox::validate() const {
    require(valid(), fmt::format("invalid bounding box ({}, {}, {}, {}) confidence {}", x0, y0,
                                 x1, y1, confidence));
}

PixelRect to_pixel_rect(const BoundingBox& box, int width, int height) {
    auto px = [](double v, int extent) {
        return std::clamp(static_cast<int>(std::lround(v * extent)), 0, extent);
    };
    return {px(box.x0, width), px(box.y0, height), px(box.x1, width), px(box.y1, height)};
}

MaskImage::MaskImage(std::string image_id, int width, int height, std::vector<std::uint8_t> bits)
    : image_id_(std::move(image_id)), width_(width), height_(height), bits_(std::move(bits)) {
    require(width_ >= 1 && height_ >= 1, "mask dimensions must be positive");
    require(bits_.size() == static_cast<std::size_t>(width_) * height_,
            "mask bit buffer does not match its dimensions");
    for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t MaskImage::set_count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

// ---------------------------------------------------------------------------
// Caption

Caption::Caption(std::string label_in, std::string description_in)
    : label(trim(label_in)), description(trim(description_in)) {
    require(!label.empty(), "caption label is empty");
    require(label.find(',') == std::string::npos,
            fmt::format("caption label '{}' contains a comma", label));
}

std::string Caption::serialize() const {
    if (description.empty()) return label;
    return label + ", " + description;
}

Caption Caption::parse(std::string_view text) {
    auto pos = text.find(", ");
    if (pos == std::string_view::npos) return Caption(std::string(text));
    return Caption(std::string(text.substr(0, pos)), std::string(text.substr(pos + 2)));
}

// ---------------------------------------------------------------------------
// Embedding

Embedding Embedding::from_raw(std::vector<double> values) {
    require(!values.empty(), "embedding is empty");
    double sum_sq = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) fail(ErrorCode::numeric_error, "embedding has a non-finite entry");
        sum_sq += v * v;
    }
    const double norm = std::sqrt(sum_sq);
    if (!(norm > 0.0) || !std::isfinite(norm))
        fail(ErrorCode::numeric_error, "embedding has zero norm");
    for (double& v : values) v /= norm;
    return Embedding(std::move(values));
}

Embedding Embedding::from_unit(std::vector<double> values) {
    require(!values.empty(), "embedding is empty");
    double sum_sq = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) fail(ErrorCode::numeric_error, "embedding has a non-finite entry");
        sum_sq += v * v;
    }
    if (std::abs(std::sqrt(sum_sq) - 1.0) > 1e-9)
        fail(ErrorCode::numeric_error, fmt::format("stored embedding has norm {}", std::sqrt(sum_sq)));
    return Embedding(std::move(values));
}

double cosine(const Embedding& a, const Embedding& b) {
    require(a.dimension() == b.dimension(),
            fmt::format("embedding dimension mismatch: {} vs {}", a.dimension(), b.dimension()));
    double dot = 0.0;
    auto av = a.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) dot += av[i] * bv[i];
    return std::clamp(dot, -1.0, 1.0);
}

const std::string& top_condition(std::span<const WeightedCondition> conditions) {
    if (conditions.empty()) fail(ErrorCode::invalid_record, "record has no conditions");
    const WeightedCondition* best = &conditions.front();
    for (const auto& c : conditions.subspan(1)) {
        if (c.weight > best->weight || (c.weight == best->weight && c.label < best->label))
            best = &c;
    }
    return best->label;
}

}  // namespace skingen
