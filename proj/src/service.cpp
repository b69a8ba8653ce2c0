// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/service.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "skingen/diagnosis.hpp"
#include "skingen/hash.hpp"
#include "skingen/masking.hpp"

namespace skingen {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(SystemVariant variant) {
    switch (variant) {
        case SystemVariant::text_only: return "TEXT_ONLY";
        case SystemVariant::retrieval: return "RETRIEVAL";
        case SystemVariant::full: return "FULL";
    }
    return "FULL";
}

SystemVariant variant_from_string(std::string_view text) {
    std::string t = to_lower(trim(text));
    std::replace(t.begin(), t.end(), '-', '_');
    if (t == "text_only") return SystemVariant::text_only;
    if (t == "retrieval") return SystemVariant::retrieval;
    if (t == "full") return SystemVariant::full;
    fail(ErrorCode::invalid_argument, fmt::format("unknown system variant '{}'", text));
}

SystemVariant variant_for(SystemCondition condition) {
    switch (condition) {
        case SystemCondition::sys1_text_only: return SystemVariant::text_only;
        case SystemCondition::sys2_retrieval: return SystemVariant::retrieval;
        case SystemCondition::sys3_skingen: return SystemVariant::full;
    }
    return SystemVariant::full;
}

// ---------------------------------------------------------------------------
// Config

std::optional<std::string> ServiceConfig::process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str()); v != nullptr && *v != '\0') return std::string(v);
    return std::nullopt;
}

namespace {

std::uint64_t parse_u64(const std::string& text, std::string_view what) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used == text.size() && text.find('-') == std::string::npos) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorCode::invalid_argument, fmt::format("{} '{}' is not a non-negative integer", what, text));
}

}  // namespace

ServiceConfig ServiceConfig::load(const std::optional<fs::path>& file, const EnvLookup& env) {
    ServiceConfig c;
    if (file) {
        const auto bytes = read_file(*file);
        try {
            const auto j = json::parse(bytes.begin(), bytes.end());
            c.host = j.value("host", c.host);
            c.port = j.value("port", c.port);
            c.data_dir = j.value("data_dir", c.data_dir.string());
            if (j.contains("backends")) c.backends = j["backends"].get<std::string>();
            if (j.contains("case_db")) c.case_db = j["case_db"].get<std::string>();
            if (j.contains("vocabulary")) c.vocabulary = j["vocabulary"].get<std::string>();
            c.seed = j.value("seed", c.seed);
            c.retrieval_k = j.value("retrieval_k", c.retrieval_k);
            c.retrieval_threshold = j.value("retrieval_threshold", c.retrieval_threshold);
            c.reference_threshold = j.value("reference_threshold", c.reference_threshold);
            if (j.contains("study_order_seed")) c.study_order_seed = j["study_order_seed"].get<std::uint64_t>();
        } catch (const json::exception& e) {
            fail(ErrorCode::invalid_argument, fmt::format("config '{}': {}", file->string(), e.what()));
        }
    }
    if (env) {
        if (auto v = env("SKINGEN_PORT")) {
            const auto port = parse_u64(*v, "SKINGEN_PORT");
            require(port >= 1 && port <= 65535, fmt::format("SKINGEN_PORT {} out of range", port));
            c.port = static_cast<int>(port);
        }
        if (auto v = env("SKINGEN_HOST")) c.host = *v;
        if (auto v = env("SKINGEN_BACKENDS")) c.backends = *v;
        if (auto v = env("SKINGEN_CASE_DB")) c.case_db = *v;
        if (auto v = env("SKINGEN_SEED")) c.seed = parse_u64(*v, "SKINGEN_SEED");
        if (auto v = env("SKINGEN_DATA_DIR")) c.data_dir = *v;
    }
    require(c.retrieval_k >= 1, "retrieval_k must be >= 1");
    return c;
}

// ---------------------------------------------------------------------------
// Media store

MediaStore::MediaStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

namespace {

bool is_sha256_hex(std::string_view hash) {
    return hash.size() == 64 &&
           std::all_of(hash.begin(), hash.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

}  // namespace

fs::path MediaStore::path_for(std::string_view hash) const { return dir_ / std::string(hash); }

std::string MediaStore::put(std::span<const std::uint8_t> bytes) {
    const std::string hash = sha256_hex(bytes);
    const fs::path target = path_for(hash);
    if (fs::exists(target)) return hash;
    // Unique temp name, then rename: concurrent writers of one hash race harmlessly.
    static std::atomic<std::uint64_t> counter{0};
    const fs::path tmp = dir_ / fmt::format(".{}.{}.tmp", hash.substr(0, 16), counter.fetch_add(1));
    write_file(tmp, bytes);
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        if (!fs::exists(target)) fail(ErrorCode::io_error, fmt::format("cannot store media {}", hash));
    }
    return hash;
}

bool MediaStore::contains(std::string_view hash) const {
    return is_sha256_hex(hash) && fs::exists(path_for(hash));
}

Bytes MediaStore::get(std::string_view hash) const {
    if (!contains(hash)) fail(ErrorCode::not_found, fmt::format("no media '{}'", hash));
    return read_file(path_for(hash));
}

std::string_view MediaStore::content_type(std::span<const std::uint8_t> bytes) {
    if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' && bytes[3] == 'G')
        return "image/png";
    if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) return "image/jpeg";
    return "application/octet-stream";
}

// ---------------------------------------------------------------------------
// JSON forms

bool GalleryEntry::operator==(const GalleryEntry& o) const {
    auto same_error = [](const std::optional<Failure>& a, const std::optional<Failure>& b) {
        if (a.has_value() != b.has_value()) return false;
        return !a || (a->code == b->code && a->message == b->message);
    };
    return condition == o.condition && source == o.source && strategy == o.strategy &&
           case_id == o.case_id && media == o.media && similarity == o.similarity && seed == o.seed &&
           same_error(error, o.error);
}

namespace {

json failure_to_j(const Failure& f) { return {{"code", to_string(f.code)}, {"message", f.message}}; }

Failure failure_from_j(const json& j) {
    return {error_code_from_string(j.at("code").get<std::string>()), j.at("message").get<std::string>()};
}

json entry_to_j(const GalleryEntry& e) {
    json j = {{"condition", e.condition}, {"source", e.source}};
    j["strategy"] = e.strategy ? json(*e.strategy) : json(nullptr);
    j["case_id"] = e.case_id ? json(*e.case_id) : json(nullptr);
    j["media"] = e.media ? json(*e.media) : json(nullptr);
    j["url"] = e.media ? json(MediaStore::url(*e.media)) : json(nullptr);
    if (e.similarity) j["similarity"] = *e.similarity;
    if (e.seed) j["seed"] = *e.seed;
    if (e.error) j["error"] = failure_to_j(*e.error);
    return j;
}

template <typename T>
std::optional<T> opt(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<T>();
}

GalleryEntry entry_from_j(const json& j) {
    GalleryEntry e;
    e.condition = j.at("condition").get<std::string>();
    e.source = j.at("source").get<std::string>();
    e.strategy = opt<std::string>(j, "strategy");
    e.case_id = opt<std::string>(j, "case_id");
    e.media = opt<std::string>(j, "media");
    e.similarity = opt<double>(j, "similarity");
    e.seed = opt<std::uint64_t>(j, "seed");
    if (j.contains("error")) e.error = failure_from_j(j["error"]);
    return e;
}

json gallery_to_j(const Gallery& g) {
    json entries = json::array();
    for (const auto& e : g.entries) entries.push_back(entry_to_j(e));
    return {{"gallery_id", g.gallery_id}, {"variant", to_string(g.variant)}, {"entries", entries}};
}

Gallery gallery_from_j(const json& j) {
    Gallery g;
    g.gallery_id = j.at("gallery_id").get<std::string>();
    g.variant = variant_from_string(j.at("variant").get<std::string>());
    for (const auto& e : j.at("entries")) g.entries.push_back(entry_from_j(e));
    return g;
}

json message_to_j(const Message& m) {
    json j = {{"index", m.index},
              {"role", m.role == MessageRole::user ? "user" : "system"},
              {"kind", m.kind == MessageKind::text ? "text" : m.kind == MessageKind::image ? "image" : "gallery"},
              {"text", m.text}};
    if (m.media) {
        j["media"] = *m.media;
        j["url"] = MediaStore::url(*m.media);
    }
    if (m.gallery) j["gallery"] = gallery_to_j(*m.gallery);
    if (m.error) j["error"] = failure_to_j(*m.error);
    return j;
}

Message message_from_j(const json& j) {
    Message m;
    m.index = j.at("index").get<std::size_t>();
    m.role = j.at("role").get<std::string>() == "user" ? MessageRole::user : MessageRole::system;
    const auto kind = j.at("kind").get<std::string>();
    m.kind = kind == "text" ? MessageKind::text : kind == "image" ? MessageKind::image : MessageKind::gallery;
    m.text = j.value("text", std::string{});
    m.media = opt<std::string>(j, "media");
    if (j.contains("gallery")) m.gallery = gallery_from_j(j["gallery"]);
    if (j.contains("error")) m.error = failure_from_j(j["error"]);
    return m;
}

json condition_to_j(const NormalizedCondition& c) { return {{"name", c.name}, {"canonical", c.canonical}}; }

NormalizedCondition condition_from_j(const json& j) {
    return {j.at("name").get<std::string>(), j.at("canonical").get<bool>()};
}

json diagnosis_to_j(const Diagnosis& d) {
    json alts = json::array();
    for (const auto& a : d.alternatives) alts.push_back(condition_to_j(a));
    return {{"primary", condition_to_j(d.primary)},
            {"alternatives", alts},
            {"narrative", d.narrative},
            {"image_id", d.image_id}};
}

Diagnosis diagnosis_from_j(const json& j) {
    Diagnosis d;
    d.primary = condition_from_j(j.at("primary"));
    for (const auto& a : j.at("alternatives")) d.alternatives.push_back(condition_from_j(a));
    d.narrative = j.at("narrative").get<std::string>();
    d.image_id = j.at("image_id").get<std::string>();
    return d;
}

json session_to_j(const ChatSession& s) {
    json messages = json::array();
    for (const auto& m : s.messages) messages.push_back(message_to_j(m));
    json j = {{"session_id", s.session_id}, {"variant", to_string(s.variant)}, {"messages", messages}};
    j["study_condition"] = s.study_condition ? json(to_string(*s.study_condition)) : json(nullptr);
    j["participant_id"] = s.participant_id ? json(*s.participant_id) : json(nullptr);
    j["current_image"] = s.current_image ? json(*s.current_image) : json(nullptr);
    j["current_image_url"] = s.current_image ? json(MediaStore::url(*s.current_image)) : json(nullptr);
    j["diagnosis"] = s.diagnosis ? diagnosis_to_j(*s.diagnosis) : json(nullptr);
    return j;
}

void apply_event(ChatSession& s, const json& e) {
    const auto type = e.at("type").get<std::string>();
    if (type == "created") {
        s.session_id = e.at("session_id").get<std::string>();
        s.variant = variant_from_string(e.at("variant").get<std::string>());
        if (auto c = opt<std::string>(e, "study_condition")) s.study_condition = system_from_string(*c);
        s.participant_id = opt<std::string>(e, "participant_id");
    } else if (type == "message") {
        Message m = message_from_j(e.at("message"));
        if (m.gallery) s.gallery = m.gallery;
        s.messages.push_back(std::move(m));
    } else if (type == "image") {
        s.current_image = e.at("media").get<std::string>();
        s.diagnosis.reset();
    } else if (type == "diagnosis") {
        s.diagnosis = diagnosis_from_j(e.at("diagnosis"));
    } else {
        fail(ErrorCode::schema_error, fmt::format("unknown session event '{}'", type));
    }
}

std::string random_session_id() {
    static std::mutex mutex;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(mutex);
    return "s" + to_hex(rng());
}

Failure to_failure(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) return {err->code(), err->what()};
    return {ErrorCode::backend_error, e.what()};
}

Message error_message(std::string_view stage, const std::exception& e) {
    Message m;
    m.error = to_failure(e);
    m.text = fmt::format("Sorry, {} failed: {}", stage, m.error->message);
    return m;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? std::string(sep) : "") + items[i];
    return out;
}

std::vector<std::string> alternative_names(const Diagnosis& d) {
    std::vector<std::string> names;
    for (const auto& a : d.alternatives) names.push_back(a.name);
    return names;
}

}  // namespace

std::string message_json(const Message& message) { return message_to_j(message).dump(); }
std::string gallery_json(const Gallery& gallery) { return gallery_to_j(gallery).dump(); }
std::string session_json(const ChatSession& session) { return session_to_j(session).dump(); }

// ---------------------------------------------------------------------------
// ChatService

ChatService::ChatService(ServiceConfig config, BackendSet backends, CaseDatabase cases,
                         ConditionVocabulary vocab, double detection_threshold)
    : config_(std::move(config)),
      backends_(std::move(backends)),
      cases_(std::move(cases)),
      vocab_(std::move(vocab)),
      detection_threshold_(detection_threshold),
      media_(config_.data_dir / "media"),
      study_(config_.data_dir / "study" / "sessions.jsonl", config_.study_order_seed),
      session_dir_(config_.data_dir / "sessions") {
    fs::create_directories(session_dir_);
    load_existing_sessions();
}

std::unique_ptr<ChatService> ChatService::from_config(const ServiceConfig& config) {
    ConditionVocabulary vocab =
        config.vocabulary ? ConditionVocabulary::load(*config.vocabulary) : ConditionVocabulary::fitzpatrick17k();
    BackendSet backends;
    double threshold = kDefaultDetectionThreshold;
    if (config.backends) {
        BackendRegistry registry(BackendConfig::load(*config.backends), vocab, config.seed);
        backends = registry.build();
        threshold = registry.detection_threshold();
    } else {
        backends = BackendSet::stubs(vocab, config.seed);
    }
    CaseDatabase cases = config.case_db ? CaseDatabase::load(*config.case_db) : CaseDatabase();
    return std::make_unique<ChatService>(config, std::move(backends), std::move(cases), std::move(vocab),
                                         threshold);
}

void ChatService::load_existing_sessions() {
    std::vector<fs::path> logs;
    for (const auto& entry : fs::directory_iterator(session_dir_))
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") logs.push_back(entry.path());
    std::sort(logs.begin(), logs.end());
    for (const auto& log : logs) {
        auto slot = std::make_unique<Slot>();
        slot->session = replay(log.stem().string());
        sessions_.emplace(slot->session.session_id, std::move(slot));
    }
}

ChatSession ChatService::replay(const std::string& session_id) const {
    const fs::path log = session_dir_ / (session_id + ".jsonl");
    std::ifstream in(log);
    if (!in) fail(ErrorCode::not_found, fmt::format("no event log for session '{}'", session_id));
    ChatSession s;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            apply_event(s, json::parse(line));
        } catch (const json::exception& e) {
            fail(ErrorCode::io_error, fmt::format("{}:{}: {}", log.string(), line_no, e.what()));
        }
    }
    return s;
}

ChatService::Slot& ChatService::slot(const std::string& session_id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) fail(ErrorCode::not_found, fmt::format("no session '{}'", session_id));
    return *it->second;
}

void ChatService::append_event(const std::string& session_id, const std::string& line) const {
    const fs::path log = session_dir_ / (session_id + ".jsonl");
    std::ofstream out(log, std::ios::app | std::ios::binary);
    out << line << '\n';
    out.flush();
    if (!out) fail(ErrorCode::io_error, fmt::format("cannot append to '{}'", log.string()));
}

Message& ChatService::push_message(Slot& s, Message message) {
    message.index = s.session.messages.size();
    append_event(s.session.session_id, json{{"type", "message"}, {"message", message_to_j(message)}}.dump());
    if (message.gallery) s.session.gallery = message.gallery;
    s.session.messages.push_back(std::move(message));
    return s.session.messages.back();
}

std::string ChatService::create_session(SystemVariant variant, std::optional<SystemCondition> study_condition,
                                        std::optional<std::string> participant_id) {
    if (study_condition)
        require(variant_for(*study_condition) == variant,
                fmt::format("study condition {} runs the {} variant", to_string(*study_condition),
                            to_string(variant_for(*study_condition))));
    auto s = std::make_unique<Slot>();
    std::unique_lock lock(sessions_mutex_);
    std::string id;
    do {
        id = random_session_id();
    } while (sessions_.contains(id) || fs::exists(session_dir_ / (id + ".jsonl")));
    s->session.session_id = id;
    s->session.variant = variant;
    s->session.study_condition = study_condition;
    s->session.participant_id = participant_id;

    json created = {{"type", "created"}, {"session_id", id}, {"variant", to_string(variant)}};
    if (study_condition) created["study_condition"] = to_string(*study_condition);
    if (participant_id) created["participant_id"] = *participant_id;
    append_event(id, created.dump());
    sessions_.emplace(id, std::move(s));
    return id;
}

std::string ChatService::upload_image(const std::string& session_id, std::span<const std::uint8_t> bytes) {
    Slot& s = slot(session_id);
    std::lock_guard lock(s.mutex);
    // Validates the payload before anything is stored.
    const std::string hash = sha256_hex(bytes);
    decode_image(bytes, hash, ImageSource::user_upload);
    media_.put(bytes);

    append_event(session_id, json{{"type", "image"}, {"media", hash}}.dump());
    s.session.current_image = hash;
    s.session.diagnosis.reset();

    Message m;
    m.role = MessageRole::user;
    m.kind = MessageKind::image;
    m.media = hash;
    push_message(s, std::move(m));
    return hash;
}

std::vector<Message> ChatService::run_diagnosis(Slot& s, const SkinImage& image) {
    std::vector<Message> replies;
    try {
        Diagnosis d = diagnose(image, *backends_.diagnoser, vocab_);
        append_event(s.session.session_id, json{{"type", "diagnosis"}, {"diagnosis", diagnosis_to_j(d)}}.dump());
        s.session.diagnosis = d;
        Message m;
        m.text = d.narrative;
        if (!d.alternatives.empty())
            m.text += fmt::format("\nOther possible conditions: {}.", join(alternative_names(d), ", "));
        replies.push_back(push_message(s, std::move(m)));
    } catch (const std::exception& e) {
        replies.push_back(push_message(s, error_message("diagnosis", e)));
        return replies;
    }

    if (s.session.variant == SystemVariant::full) {
        try {
            const auto masked = mask_lesion(image, s.session.diagnosis->primary.name, *backends_.detector,
                                            *backends_.segmenter, detection_threshold_);
            Message m;
            m.kind = MessageKind::image;
            m.text = fmt::format("Affected area for {}.", s.session.diagnosis->primary.name);
            m.media = media_.put(encode_png(masked.composite));
            replies.push_back(push_message(s, std::move(m)));
        } catch (const std::exception& e) {
            replies.push_back(push_message(s, error_message("lesion masking", e)));
        }
    }
    return replies;
}

Message ChatService::demonstrate(Slot& s, const SkinImage& image) {
    const Diagnosis& d = *s.session.diagnosis;
    const auto conditions = d.condition_names();

    if (s.session.variant == SystemVariant::text_only) {
        Message m;
        m.text = fmt::format("The most likely condition is {}.", d.primary.name);
        if (!d.alternatives.empty())
            m.text += fmt::format(" Other possible conditions: {}.", join(alternative_names(d), ", "));
        return push_message(s, std::move(m));
    }

    Gallery g;
    g.variant = s.session.variant;
    if (s.session.variant == SystemVariant::retrieval) {
        StableHasher id(config_.seed);
        id.add("reference-cases").add(image.id());
        for (const auto& c : conditions) id.add(c);
        g.gallery_id = to_hex(id.digest());
        for (const auto& condition : conditions) {
            try {
                const Caption caption = recaption(image, condition, *backends_.captioner);
                const auto hits = retrieve_cases(condition, caption, cases_, *backends_.semantic_embedder,
                                                 config_.retrieval_k, config_.reference_threshold);
                if (hits.empty())
                    fail(ErrorCode::not_found, fmt::format("no reference case for '{}'", condition));
                for (const auto& hit : hits) {
                    GalleryEntry e;
                    e.condition = condition;
                    e.source = "dataset";
                    e.case_id = hit.record.case_id;
                    e.similarity = hit.similarity;
                    e.media = media_.put(encode_png(cases_.case_image(hit.record)));
                    g.entries.push_back(std::move(e));
                }
            } catch (const std::exception& e) {
                GalleryEntry entry;
                entry.condition = condition;
                entry.source = "dataset";
                entry.error = to_failure(e);
                g.entries.push_back(std::move(entry));
            }
        }
    } else {
        DemonstrationOptions options;
        options.seed = config_.seed;
        options.retrieval_k = config_.retrieval_k;
        options.retrieval_threshold = config_.retrieval_threshold;
        const DemonstrationSet set = generate_demonstrations(image, d, cases_, backends_, options);
        g.gallery_id = set.request_id;
        for (const auto& de : set.entries) {
            GalleryEntry e;
            e.condition = de.condition;
            e.source = "generated";
            e.strategy = std::string(to_string(de.strategy));
            e.case_id = de.case_id;
            e.seed = de.seed;
            if (de.image) e.media = media_.put(encode_png(*de.image));
            e.error = de.error;
            g.entries.push_back(std::move(e));
        }
    }

    Message m;
    m.kind = MessageKind::gallery;
    m.text = s.session.variant == SystemVariant::retrieval ? "Reference cases for each possible condition."
                                                          : "Generated examples for each possible condition.";
    m.gallery = std::move(g);
    return push_message(s, std::move(m));
}

std::vector<Message> ChatService::ask(const std::string& session_id, const std::string& text, bool demo_intent) {
    Slot& s = slot(session_id);
    std::lock_guard lock(s.mutex);
    if (!s.session.current_image)
        fail(ErrorCode::precondition_failed, "upload an image before asking");

    Message question;
    question.role = MessageRole::user;
    question.text = text;
    push_message(s, std::move(question));

    std::vector<Message> replies;
    std::optional<SkinImage> image;
    try {
        image = decode_image(media_.get(*s.session.current_image), *s.session.current_image,
                             ImageSource::user_upload);
    } catch (const std::exception& e) {
        replies.push_back(push_message(s, error_message("loading the image", e)));
        return replies;
    }

    const bool fresh = !s.session.diagnosis.has_value();
    if (fresh) {
        auto diagnosis_replies = run_diagnosis(s, *image);
        replies.insert(replies.end(), diagnosis_replies.begin(), diagnosis_replies.end());
        if (!s.session.diagnosis) return replies;
    }

    if (demo_intent) {
        try {
            replies.push_back(demonstrate(s, *image));
        } catch (const std::exception& e) {
            replies.push_back(push_message(s, error_message("generating examples", e)));
        }
    } else if (!fresh) {
        const Diagnosis& d = *s.session.diagnosis;
        Message m;
        m.text = fmt::format("My assessment remains {}.", d.primary.name);
        if (!d.alternatives.empty())
            m.text += fmt::format(" It could also be {}.", join(alternative_names(d), ", "));
        replies.push_back(push_message(s, std::move(m)));
    }
    return replies;
}

Gallery ChatService::get_gallery(const std::string& session_id) const {
    Slot& s = slot(session_id);
    std::lock_guard lock(s.mutex);
    if (!s.session.gallery) fail(ErrorCode::not_found, fmt::format("session '{}' has no gallery yet", session_id));
    return *s.session.gallery;
}

ChatSession ChatService::history(const std::string& session_id) const {
    Slot& s = slot(session_id);
    std::lock_guard lock(s.mutex);
    return s.session;
}

std::vector<std::string> ChatService::session_ids() const {
    std::shared_lock lock(sessions_mutex_);
    std::vector<std::string> ids;
    for (const auto& [id, _] : sessions_) ids.push_back(id);
    return ids;
}

}  // namespace skingen
