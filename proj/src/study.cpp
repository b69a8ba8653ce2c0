// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/study.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "skingen/core.hpp"
#include "skingen/hash.hpp"
#include "skingen/image_io.hpp"

namespace skingen {

using nlohmann::json;

std::string_view to_string(SystemCondition condition) {
    switch (condition) {
        case SystemCondition::sys1_text_only: return "SYS1";
        case SystemCondition::sys2_retrieval: return "SYS2";
        case SystemCondition::sys3_skingen: return "SYS3";
    }
    return "SYS1";
}

SystemCondition system_from_string(std::string_view text) {
    const std::string t = to_lower(text);
    if (t == "sys1" || t == "sys1_text_only") return SystemCondition::sys1_text_only;
    if (t == "sys2" || t == "sys2_retrieval") return SystemCondition::sys2_retrieval;
    if (t == "sys3" || t == "sys3_skingen") return SystemCondition::sys3_skingen;
    fail(ErrorCode::schema_error, fmt::format("unknown system condition '{}'", text));
}

const Question& find_question(std::string_view id) {
    for (const auto& q : kQuestions)
        if (q.id == id) return q;
    fail(ErrorCode::schema_error, fmt::format("unknown question '{}'", id));
}

std::string_view to_string(Gender gender) {
    switch (gender) {
        case Gender::male: return "male";
        case Gender::female: return "female";
        case Gender::other: return "other";
    }
    return "other";
}

Gender gender_from_string(std::string_view text) {
    const std::string t = to_lower(trim(text));
    if (t == "male" || t == "m") return Gender::male;
    if (t == "female" || t == "f") return Gender::female;
    if (t == "other") return Gender::other;
    fail(ErrorCode::schema_error, fmt::format("unknown gender '{}'", text));
}

namespace {

constexpr SystemOrder kPermutations[6] = {
    {SystemCondition::sys1_text_only, SystemCondition::sys2_retrieval, SystemCondition::sys3_skingen},
    {SystemCondition::sys1_text_only, SystemCondition::sys3_skingen, SystemCondition::sys2_retrieval},
    {SystemCondition::sys2_retrieval, SystemCondition::sys1_text_only, SystemCondition::sys3_skingen},
    {SystemCondition::sys2_retrieval, SystemCondition::sys3_skingen, SystemCondition::sys1_text_only},
    {SystemCondition::sys3_skingen, SystemCondition::sys1_text_only, SystemCondition::sys2_retrieval},
    {SystemCondition::sys3_skingen, SystemCondition::sys2_retrieval, SystemCondition::sys1_text_only},
};

}  // namespace

SystemOrder assign_order(std::size_t participant_index) { return kPermutations[participant_index % 6]; }

SystemOrder assign_order_random(std::size_t participant_index, std::uint64_t seed) {
    SplitMix64 rng(StableHasher(seed).add("study-order").add(std::uint64_t{participant_index}).digest());
    return kPermutations[rng.below(6)];
}

void record_response(StudySession& session, std::string_view question_id,
                     std::optional<SystemCondition> condition, int value) {
    require(value >= 1 && value <= 5, fmt::format("Likert value {} outside 1-5", value));
    const Question& q = find_question(question_id);
    if (q.repeated && !condition)
        fail(ErrorCode::schema_error, fmt::format("question '{}' needs a system condition", q.id));
    if (!q.repeated && condition)
        fail(ErrorCode::schema_error, fmt::format("question '{}' is rated once, without a condition", q.id));
    session.responses.insert_or_assign(ResponseKey{std::string(q.id), condition}, value);
}

std::string Summary::formatted() const { return fmt::format("{:.2f} ± {:.2f}", mean, sd); }

Summary summarize(std::span<const int> values) {
    if (values.size() < 2)
        fail(ErrorCode::insufficient_data, fmt::format("{} response(s); need at least 2", values.size()));
    // Integer sums are exact, so the result is independent of input order.
    long long sum = 0;
    for (int v : values) sum += v;
    const double n = static_cast<double>(values.size());
    const double mean = static_cast<double>(sum) / n;
    long long sum_sq = 0;
    for (int v : values) sum_sq += static_cast<long long>(v) * v;
    // sum((v - mean)^2) = sum_sq - sum^2 / n, computed on integers first.
    const double ss = (static_cast<double>(sum_sq) * n - static_cast<double>(sum) * static_cast<double>(sum)) / n;
    return {values.size(), mean, std::sqrt(std::max(0.0, ss / (n - 1.0)))};
}

std::vector<AggregateCell> aggregate(std::span<const StudySession> sessions) {
    std::vector<ResponseKey> keys;
    for (const auto& q : kQuestions)
        if (!q.repeated) keys.push_back({std::string(q.id), std::nullopt});
    for (const auto& q : kQuestions)
        if (q.repeated)
            for (SystemCondition c : kAllSystems) keys.push_back({std::string(q.id), c});

    std::vector<AggregateCell> cells;
    for (const auto& key : keys) {
        std::vector<int> values;
        for (const auto& s : sessions)
            if (auto it = s.responses.find(key); it != s.responses.end()) values.push_back(it->second);
        AggregateCell cell{key.question_id, key.condition, values.size(), std::nullopt};
        if (values.size() >= 2) cell.summary = summarize(values);
        cells.push_back(std::move(cell));
    }
    return cells;
}

std::vector<DemographicRow> demographics_table(std::span<const StudySession> sessions) {
    const std::size_t total = sessions.size();
    auto pct = [&](std::size_t count) {
        return total == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(total);
    };
    auto count_if = [&](auto pred) {
        return static_cast<std::size_t>(std::count_if(sessions.begin(), sessions.end(), pred));
    };
    std::vector<DemographicRow> rows;
    const std::size_t male = count_if([](const auto& s) { return s.gender == Gender::male; });
    const std::size_t female = count_if([](const auto& s) { return s.gender == Gender::female; });
    const std::size_t other = total - male - female;
    rows.push_back({"Gender", "Male", male, pct(male)});
    rows.push_back({"Gender", "Female", female, pct(female)});
    if (other > 0) rows.push_back({"Gender", "Other", other, pct(other)});
    const std::size_t medical = count_if([](const auto& s) { return s.medical_background; });
    rows.push_back({"Medical Background", "Yes", medical, pct(medical)});
    rows.push_back({"Medical Background", "No", total - medical, pct(total - medical)});
    return rows;
}

std::string format_percentage(double value) { return fmt::format("{:.2f}%", value); }

namespace {

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string aggregate_csv(std::span<const AggregateCell> cells) {
    std::string out = "question_id,condition,question,n,mean,sd,summary\n";
    for (const auto& c : cells) {
        const auto& q = find_question(c.question_id);
        const std::string cond = c.condition ? std::string(to_string(*c.condition)) : "";
        if (c.summary)
            out += fmt::format("{},{},{},{},{:.2f},{:.2f},{}\n", c.question_id, cond, csv_field(q.text), c.n,
                               c.summary->mean, c.summary->sd, c.summary->formatted());
        else
            out += fmt::format("{},{},{},{},,,insufficient data\n", c.question_id, cond, csv_field(q.text), c.n);
    }
    return out;
}

std::string demographics_csv(std::span<const DemographicRow> rows) {
    std::string out = "category,option,count,percentage\n";
    for (const auto& r : rows)
        out += fmt::format("{},{},{},{}\n", r.category, r.option, r.count, format_percentage(r.percentage));
    return out;
}

std::string session_to_json(const StudySession& s) {
    json order = json::array();
    for (auto c : s.order) order.push_back(to_string(c));
    json responses = json::array();
    for (const auto& [key, value] : s.responses) {
        json r = {{"question", key.question_id}, {"value", value}};
        r["condition"] = key.condition ? json(to_string(*key.condition)) : json(nullptr);
        responses.push_back(std::move(r));
    }
    return json{{"participant_id", s.participant_id},
                {"participant_index", s.participant_index},
                {"order", order},
                {"gender", to_string(s.gender)},
                {"medical_background", s.medical_background},
                {"responses", responses}}
        .dump();
}

StudySession session_from_json(std::string_view line) {
    StudySession s;
    try {
        auto j = json::parse(line);
        s.participant_id = j.at("participant_id").get<std::string>();
        s.participant_index = j.value("participant_index", std::size_t{0});
        const auto& order = j.at("order");
        if (!order.is_array() || order.size() != 3)
            fail(ErrorCode::schema_error, "order must list three systems");
        for (std::size_t i = 0; i < 3; ++i) s.order[i] = system_from_string(order[i].get<std::string>());
        s.gender = gender_from_string(j.at("gender").get<std::string>());
        s.medical_background = j.at("medical_background").get<bool>();
        for (const auto& r : j.value("responses", json::array())) {
            std::optional<SystemCondition> cond;
            if (r.contains("condition") && !r["condition"].is_null())
                cond = system_from_string(r["condition"].get<std::string>());
            record_response(s, r.at("question").get<std::string>(), cond, r.at("value").get<int>());
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::schema_error, fmt::format("malformed study session: {}", e.what()));
    }
    return s;
}

void save_sessions(const std::filesystem::path& jsonl, std::span<const StudySession> sessions) {
    std::string out;
    for (const auto& s : sessions) out += session_to_json(s) + "\n";
    write_file(jsonl, out);
}

std::vector<StudySession> load_sessions(const std::filesystem::path& jsonl) {
    std::ifstream in(jsonl);
    if (!in) fail(ErrorCode::io_error, fmt::format("cannot read sessions '{}'", jsonl.string()));
    std::vector<StudySession> sessions;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            sessions.push_back(session_from_json(line));
        } catch (const Error& e) {
            fail(e.code(), fmt::format("{}:{}: {}", jsonl.string(), line_no, e.what()));
        }
    }
    return sessions;
}

StudyRegistry::StudyRegistry(std::optional<std::filesystem::path> store,
                             std::optional<std::uint64_t> random_order_seed)
    : store_(std::move(store)), random_order_seed_(random_order_seed) {
    if (store_ && std::filesystem::exists(*store_)) sessions_ = load_sessions(*store_);
}

StudySession StudyRegistry::add_participant(Gender gender, bool medical_background) {
    std::lock_guard lock(mutex_);
    StudySession s;
    s.participant_index = sessions_.size();
    s.participant_id = fmt::format("p{:04}", s.participant_index + 1);
    s.order = random_order_seed_ ? assign_order_random(s.participant_index, *random_order_seed_)
                                 : assign_order(s.participant_index);
    s.gender = gender;
    s.medical_background = medical_background;
    sessions_.push_back(s);
    persist();
    return s;
}

StudySession StudyRegistry::record(std::string_view participant_id, std::string_view question_id,
                                   std::optional<SystemCondition> condition, int value) {
    std::lock_guard lock(mutex_);
    auto it = std::find_if(sessions_.begin(), sessions_.end(),
                           [&](const auto& s) { return s.participant_id == participant_id; });
    if (it == sessions_.end())
        fail(ErrorCode::not_found, fmt::format("unknown participant '{}'", participant_id));
    StudySession updated = *it;
    record_response(updated, question_id, condition, value);
    *it = updated;
    persist();
    return updated;
}

std::vector<StudySession> StudyRegistry::sessions() const {
    std::lock_guard lock(mutex_);
    return sessions_;
}

void StudyRegistry::persist() const {
    if (store_) save_sessions(*store_, sessions_);
}

}  // namespace skingen
