// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "skingen/backends.hpp"
#include "skingen/core.hpp"
#include "skingen/generation.hpp"
#include "skingen/image_io.hpp"
#include "skingen/study.hpp"

namespace skingen {

enum class SystemVariant { text_only, retrieval, full };
std::string_view to_string(SystemVariant variant);  // "TEXT_ONLY", "RETRIEVAL", "FULL"
SystemVariant variant_from_string(std::string_view text);
SystemVariant variant_for(SystemCondition condition);

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir = "skingen-data";
    std::optional<std::filesystem::path> backends;    // INI registry; stubs when unset
    std::optional<std::filesystem::path> case_db;     // cases.jsonl; empty db when unset
    std::optional<std::filesystem::path> vocabulary;  // one label per line; built-in list when unset
    std::uint64_t seed = 0;
    std::size_t retrieval_k = 3;
    double retrieval_threshold = kDefaultRetrievalThreshold;
    // Reference cases shown by the retrieval variant; -1 admits any same-label case.
    double reference_threshold = -1.0;
    std::optional<std::uint64_t> study_order_seed;  // random study orders when set

    // JSON config file (every key optional) then SKINGEN_PORT, SKINGEN_HOST,
    // SKINGEN_BACKENDS, SKINGEN_CASE_DB, SKINGEN_SEED, SKINGEN_DATA_DIR.
    using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
    static ServiceConfig load(const std::optional<std::filesystem::path>& file,
                              const EnvLookup& env = process_env);
    static std::optional<std::string> process_env(const std::string& name);
};

// Content-addressed blob store: <dir>/<sha256>.
class MediaStore {
public:
    explicit MediaStore(std::filesystem::path dir);

    std::string put(std::span<const std::uint8_t> bytes);
    Bytes get(std::string_view hash) const;  // not_found for unknown or malformed hashes
    bool contains(std::string_view hash) const;
    static std::string url(std::string_view hash) { return "/media/" + std::string(hash); }
    static std::string_view content_type(std::span<const std::uint8_t> bytes);

private:
    std::filesystem::path path_for(std::string_view hash) const;
    std::filesystem::path dir_;
};

struct GalleryEntry {
    std::string condition;
    std::string source;                   // "generated" or "dataset"
    std::optional<std::string> strategy;  // generated entries only
    std::optional<std::string> case_id;
    std::optional<std::string> media;     // hash in the media store
    std::optional<double> similarity;     // dataset entries only
    std::optional<std::uint64_t> seed;    // generated entries only
    std::optional<Failure> error;

    bool operator==(const GalleryEntry& other) const;
};

struct Gallery {
    std::string gallery_id;
    SystemVariant variant = SystemVariant::full;
    std::vector<GalleryEntry> entries;

    bool operator==(const Gallery&) const = default;
};

enum class MessageRole { user, system };
enum class MessageKind { text, image, gallery };

struct Message {
    std::size_t index = 0;
    MessageRole role = MessageRole::system;
    MessageKind kind = MessageKind::text;
    std::string text;
    std::optional<std::string> media;  // image messages
    std::optional<Gallery> gallery;    // gallery messages
    std::optional<Failure> error;      // pipeline failures surfaced to the user
};

struct ChatSession {
    std::string session_id;
    SystemVariant variant = SystemVariant::full;
    std::optional<SystemCondition> study_condition;
    std::optional<std::string> participant_id;
    std::vector<Message> messages;
    std::optional<std::string> current_image;  // media hash
    std::optional<Diagnosis> diagnosis;
    std::optional<Gallery> gallery;  // most recent
};

std::string message_json(const Message& message);
std::string gallery_json(const Gallery& gallery);
std::string session_json(const ChatSession& session);

class ChatService {
public:
    ChatService(ServiceConfig config, BackendSet backends, CaseDatabase cases,
                ConditionVocabulary vocab, double detection_threshold = kDefaultDetectionThreshold);

    // Builds backends from config.backends (or stubs) and loads the case db.
    static std::unique_ptr<ChatService> from_config(const ServiceConfig& config);

    std::string create_session(SystemVariant variant,
                               std::optional<SystemCondition> study_condition = std::nullopt,
                               std::optional<std::string> participant_id = std::nullopt);

    // Returns the media hash of the stored upload.
    std::string upload_image(const std::string& session_id, std::span<const std::uint8_t> bytes);

    // New system messages, in order.
    std::vector<Message> ask(const std::string& session_id, const std::string& text, bool demo_intent);

    Gallery get_gallery(const std::string& session_id) const;
    ChatSession history(const std::string& session_id) const;
    std::vector<std::string> session_ids() const;

    const MediaStore& media() const noexcept { return media_; }
    StudyRegistry& study() noexcept { return study_; }
    const ServiceConfig& config() const noexcept { return config_; }

    // Rebuilds a session from its persisted event log.
    ChatSession replay(const std::string& session_id) const;

private:
    struct Slot {
        mutable std::mutex mutex;
        ChatSession session;
    };

    Slot& slot(const std::string& session_id) const;
    void append_event(const std::string& session_id, const std::string& line) const;
    Message& push_message(Slot& slot, Message message);
    void load_existing_sessions();

    std::vector<Message> run_diagnosis(Slot& slot, const SkinImage& image);
    Message demonstrate(Slot& slot, const SkinImage& image);

    ServiceConfig config_;
    BackendSet backends_;
    CaseDatabase cases_;
    ConditionVocabulary vocab_;
    double detection_threshold_;
    MediaStore media_;
    StudyRegistry study_;
    std::filesystem::path session_dir_;

    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, std::unique_ptr<Slot>, std::less<>> sessions_;
};

}  // namespace skingen
