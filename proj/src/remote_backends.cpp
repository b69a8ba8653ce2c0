// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/remote_backends.hpp"

#include <mutex>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "skingen/image_io.hpp"

namespace skingen {

using nlohmann::json;

namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += kAlphabet[v & 63];
    }
    if (i < bytes.size()) {
        std::uint32_t v = bytes[i] << 16;
        if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    std::vector<std::uint8_t> out;
    std::uint32_t buffer = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        const auto pos = kAlphabet.find(c);
        if (pos == std::string_view::npos) fail(ErrorCode::invalid_argument, "invalid base64");
        buffer = (buffer << 6) | static_cast<std::uint32_t>(pos);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((buffer >> bits) & 0xFF));
        }
    }
    return out;
}

class RemoteClient {
public:
    explicit RemoteClient(const RemoteEndpoint& endpoint) : client_(endpoint.url) {
        const auto seconds = static_cast<time_t>(endpoint.timeout_seconds);
        client_.set_connection_timeout(seconds, 0);
        client_.set_read_timeout(seconds, 0);
        client_.set_write_timeout(seconds, 0);
    }

    json post(const std::string& path, const json& body) const {
        std::lock_guard lock(mutex_);
        auto res = client_.Post(path, body.dump(), "application/json");
        if (!res)
            fail(ErrorCode::backend_error,
                 fmt::format("{}: transport error: {}", path, httplib::to_string(res.error())));
        if (res->status < 200 || res->status >= 300)
            fail(ErrorCode::backend_error, fmt::format("{}: HTTP {}", path, res->status));
        try {
            return json::parse(res->body);
        } catch (const json::exception& e) {
            fail(ErrorCode::backend_error, fmt::format("{}: malformed response: {}", path, e.what()));
        }
    }

private:
    mutable std::mutex mutex_;
    mutable httplib::Client client_;
};

namespace {

json image_json(const SkinImage& image) {
    return {{"id", image.id()}, {"png", base64_encode(encode_png(image))}};
}

template <typename T>
T field(const json& j, const char* key, const char* path) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(ErrorCode::backend_error, fmt::format("{}: response lacks '{}'", path, key));
    }
}

Embedding embedding_from(const json& response, const char* path) {
    auto values = field<std::vector<double>>(response, "values", path);
    try {
        return Embedding::from_raw(std::move(values));
    } catch (const Error& e) {
        fail(ErrorCode::backend_error, fmt::format("{}: {}", path, e.what()));
    }
}

class RemoteDiagnoser final : public DiagnoserBackend {
public:
    explicit RemoteDiagnoser(const RemoteEndpoint& e) : client_(e) {}
    std::string answer(const SkinImage& image, std::string_view prompt) const override {
        static constexpr const char* path = "/v1/diagnoser/answer";
        auto r = client_.post(path, {{"image", image_json(image)}, {"prompt", prompt}});
        return field<std::string>(r, "text", path);
    }

private:
    RemoteClient client_;
};

class RemoteDetector final : public DetectorBackend {
public:
    explicit RemoteDetector(const RemoteEndpoint& e) : client_(e) {}
    std::vector<BoundingBox> detect(const SkinImage& image, std::string_view prompt) const override {
        static constexpr const char* path = "/v1/detector/detect";
        auto r = client_.post(path, {{"image", image_json(image)}, {"prompt", prompt}});
        std::vector<BoundingBox> boxes;
        for (const auto& b : field<json>(r, "boxes", path)) {
            BoundingBox box{field<double>(b, "x0", path), field<double>(b, "y0", path),
                            field<double>(b, "x1", path), field<double>(b, "y1", path),
                            field<double>(b, "confidence", path)};
            if (!box.valid()) fail(ErrorCode::backend_error, fmt::format("{}: invalid box", path));
            boxes.push_back(box);
        }
        std::stable_sort(boxes.begin(), boxes.end(),
                         [](const auto& a, const auto& b) { return a.confidence > b.confidence; });
        return boxes;
    }

private:
    RemoteClient client_;
};

class RemoteSegmenter final : public SegmenterBackend {
public:
    explicit RemoteSegmenter(const RemoteEndpoint& e) : client_(e) {}
    MaskImage segment(const SkinImage& image, const BoundingBox& box) const override {
        static constexpr const char* path = "/v1/segmenter/segment";
        json jb = {{"x0", box.x0}, {"y0", box.y0}, {"x1", box.x1}, {"y1", box.y1},
                   {"confidence", box.confidence}};
        auto r = client_.post(path, {{"image", image_json(image)}, {"box", jb}});
        auto mask = decode_mask_png(base64_decode(field<std::string>(r, "mask_png", path)), image.id());
        if (mask.width() != image.width() || mask.height() != image.height())
            fail(ErrorCode::backend_error, fmt::format("{}: mask size mismatch", path));
        return mask;
    }

private:
    RemoteClient client_;
};

class RemoteCaptioner final : public CaptionerBackend {
public:
    explicit RemoteCaptioner(const RemoteEndpoint& e) : client_(e) {}
    std::string describe(const SkinImage& image) const override {
        static constexpr const char* path = "/v1/captioner/describe";
        return field<std::string>(client_.post(path, {{"image", image_json(image)}}), "text", path);
    }

private:
    RemoteClient client_;
};

class RemoteGenerator final : public GeneratorBackend {
public:
    RemoteGenerator(const RemoteEndpoint& e, std::string model) : client_(e), model_(std::move(model)) {}
    SkinImage generate(std::string_view prompt, const SkinImage* image_prompt,
                       GenerationStrategy strategy, std::uint64_t seed) const override {
        static constexpr const char* path = "/v1/generator/generate";
        json body = {{"prompt", prompt},
                     {"image_prompt", image_prompt ? image_json(*image_prompt) : json(nullptr)},
                     {"strategy", to_string(strategy)},
                     {"seed", seed},
                     {"model", model_}};
        auto img = field<json>(client_.post(path, body), "image", path);
        auto png = base64_decode(field<std::string>(img, "png", path));
        return decode_image(png, field<std::string>(img, "id", path), ImageSource::generated);
    }

private:
    RemoteClient client_;
    std::string model_;
};

class RemoteEmbedder final : public EmbedderBackend {
public:
    RemoteEmbedder(const RemoteEndpoint& e, std::string role) : client_(e), role_(std::move(role)) {}
    Embedding embed_image(const SkinImage& image) const override {
        static constexpr const char* path = "/v1/embedder/embed_image";
        return embedding_from(client_.post(path, {{"image", image_json(image)}, {"role", role_}}), path);
    }
    Embedding embed_text(std::string_view text) const override {
        static constexpr const char* path = "/v1/embedder/embed_text";
        return embedding_from(client_.post(path, {{"text", text}, {"role", role_}}), path);
    }

private:
    RemoteClient client_;
    std::string role_;
};

}  // namespace

std::shared_ptr<const DiagnoserBackend> make_remote_diagnoser(const RemoteEndpoint& e) {
    return std::make_shared<RemoteDiagnoser>(e);
}
std::shared_ptr<const DetectorBackend> make_remote_detector(const RemoteEndpoint& e) {
    return std::make_shared<RemoteDetector>(e);
}
std::shared_ptr<const SegmenterBackend> make_remote_segmenter(const RemoteEndpoint& e) {
    return std::make_shared<RemoteSegmenter>(e);
}
std::shared_ptr<const CaptionerBackend> make_remote_captioner(const RemoteEndpoint& e) {
    return std::make_shared<RemoteCaptioner>(e);
}
std::shared_ptr<const GeneratorBackend> make_remote_generator(const RemoteEndpoint& e,
                                                              std::string model) {
    return std::make_shared<RemoteGenerator>(e, std::move(model));
}
std::shared_ptr<const EmbedderBackend> make_remote_embedder(const RemoteEndpoint& e,
                                                            std::string role) {
    return std::make_shared<RemoteEmbedder>(e, std::move(role));
}

}  // namespace skingen
