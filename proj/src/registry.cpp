// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "skingen/backends.hpp"
#include "skingen/image_io.hpp"
#include "skingen/remote_backends.hpp"

namespace skingen {
namespace {

const std::set<std::string> kRoles = {"diagnoser", "detector", "segmenter", "captioner",
                                      "generator", "semantic_embedder", "structural_embedder"};

const BackendConfig::Role kDefaultRole{};

}  // namespace

std::string BackendConfig::Role::get(const std::string& key, const std::string& fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

std::uint64_t BackendConfig::Role::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        std::size_t used = 0;
        auto v = std::stoull(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::invalid_argument, fmt::format("'{}' is not an unsigned integer", it->second));
    }
}

double BackendConfig::Role::get_double(const std::string& key, double fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::invalid_argument, fmt::format("'{}' is not a number", it->second));
    }
}

BackendConfig BackendConfig::parse(std::string_view text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorCode::invalid_argument, fmt::format("backend config: {}", e.message()));
    }
    BackendConfig config;
    for (const auto& [section, body] : tree) {
        if (body.empty()) continue;  // top-level key without a section
        if (!kRoles.contains(section))
            fail(ErrorCode::invalid_argument, fmt::format("backend config: unknown role '{}'", section));
        Role role;
        for (const auto& [key, value] : body) {
            if (key == "impl")
                role.impl = value.data();
            else
                role.params[key] = value.data();
        }
        if (role.impl != "stub" && role.impl != "remote")
            fail(ErrorCode::invalid_argument,
                 fmt::format("backend config: role '{}' has unknown impl '{}'", section, role.impl));
        if (role.impl == "remote" && !role.params.contains("endpoint"))
            fail(ErrorCode::invalid_argument,
                 fmt::format("backend config: remote role '{}' needs an endpoint", section));
        config.roles[section] = std::move(role);
    }
    return config;
}

BackendConfig BackendConfig::load(const std::filesystem::path& path) {
    auto bytes = read_file(path);
    return parse(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

const BackendConfig::Role& BackendConfig::role(const std::string& name) const {
    auto it = roles.find(name);
    return it == roles.end() ? kDefaultRole : it->second;
}

BackendRegistry::BackendRegistry(BackendConfig config, const ConditionVocabulary& vocab,
                                 std::uint64_t global_seed)
    : config_(std::move(config)), vocab_(&vocab), global_seed_(global_seed) {}

namespace {

RemoteEndpoint endpoint_of(const BackendConfig::Role& role) {
    return {role.get("endpoint", ""), role.get_double("timeout", 60.0)};
}

}  // namespace

BackendSet BackendRegistry::build() const {
    BackendSet set;
    auto seed_of = [&](const BackendConfig::Role& role) {
        return role.get_u64("seed", global_seed_);
    };

    if (const auto& r = config_.role("diagnoser"); r.impl == "remote")
        set.diagnoser = make_remote_diagnoser(endpoint_of(r));
    else
        set.diagnoser = std::make_shared<StubDiagnoser>(*vocab_, seed_of(r));

    if (const auto& r = config_.role("detector"); r.impl == "remote")
        set.detector = make_remote_detector(endpoint_of(r));
    else
        set.detector = std::make_shared<StubDetector>(seed_of(r));

    if (const auto& r = config_.role("segmenter"); r.impl == "remote")
        set.segmenter = make_remote_segmenter(endpoint_of(r));
    else
        set.segmenter = std::make_shared<StubSegmenter>();

    if (const auto& r = config_.role("captioner"); r.impl == "remote")
        set.captioner = make_remote_captioner(endpoint_of(r));
    else
        set.captioner = std::make_shared<StubCaptioner>(seed_of(r));

    set.generator = generator_for_model(config_.role("generator").get("model", "base"));

    auto embedder = [&](const std::string& name, std::uint64_t seed_offset, int grid)
        -> std::shared_ptr<const EmbedderBackend> {
        const auto& r = config_.role(name);
        if (r.impl == "remote") return make_remote_embedder(endpoint_of(r), name);
        return std::make_shared<StubEmbedder>(r.get_u64("dimension", kDefaultEmbeddingDimension),
                                              r.get_u64("seed", global_seed_ + seed_offset),
                                              static_cast<int>(r.get_u64("grid", grid)));
    };
    set.semantic_embedder = embedder("semantic_embedder", 0, 4);
    set.structural_embedder = embedder("structural_embedder", 1, 8);
    return set;
}

std::shared_ptr<const GeneratorBackend> BackendRegistry::generator_for_model(
    const std::string& model) const {
    const auto& r = config_.role("generator");
    if (r.impl == "remote") return make_remote_generator(endpoint_of(r), model);
    const auto resolution = static_cast<int>(r.get_u64("resolution", kDefaultGenerationResolution));
    return std::make_shared<StubGenerator>(model, resolution, resolution);
}

double BackendRegistry::detection_threshold() const {
    return config_.role("detector").get_double("threshold", kDefaultDetectionThreshold);
}

}  // namespace skingen
