// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace skingen {

enum class SystemCondition { sys1_text_only, sys2_retrieval, sys3_skingen };

inline constexpr SystemCondition kAllSystems[] = {SystemCondition::sys1_text_only,
                                                  SystemCondition::sys2_retrieval,
                                                  SystemCondition::sys3_skingen};

std::string_view to_string(SystemCondition condition);  // "SYS1", "SYS2", "SYS3"
SystemCondition system_from_string(std::string_view text);

using SystemOrder = std::array<SystemCondition, 3>;

struct Question {
    std::string_view id;
    std::string_view text;
    bool repeated;  // asked once per system instead of once overall
};

// Repeated questions first, then the once-rated block, in questionnaire order.
inline constexpr Question kQuestions[] = {
    {"trust", "Perceived Trust: I can trust the system.", true},
    {"understanding", "Ease of Understanding: The conversation with the system is easy to understand.", true},
    {"effort", "Cognitive Effort: I easily found the information I was asking for.", true},
    {"correct", "SkinGEN’s diagnosis is correct or relevant.", false},
    {"informative", "The description provided by SkinGEN is informative.", false},
    {"suggestions", "The suggestions offered by SkinGEN are useful.", false},
    {"willing", "I would be willing to use SkinGEN in the future.", false},
    {"realistic", "The generated skin disease image looks realistic.", false},
    {"useful", "I find SkinGEN to be a useful system.", false},
};

// Throws schema_error for unknown ids.
const Question& find_question(std::string_view id);

enum class Gender { male, female, other };
std::string_view to_string(Gender gender);
Gender gender_from_string(std::string_view text);

struct ResponseKey {
    std::string question_id;
    std::optional<SystemCondition> condition;

    auto operator<=>(const ResponseKey&) const = default;
};

struct StudySession {
    std::string participant_id;
    std::size_t participant_index = 0;
    SystemOrder order{};
    Gender gender = Gender::other;
    bool medical_background = false;
    std::map<ResponseKey, int> responses;
};

// Lexicographic permutations of (SYS1, SYS2, SYS3), cycled by index.
SystemOrder assign_order(std::size_t participant_index);
// Uniform pick among the six permutations, keyed by (seed, index).
SystemOrder assign_order_random(std::size_t participant_index, std::uint64_t seed);

// value outside 1-5 -> invalid_argument; a repeated question without a
// condition, or a once-rated question with one -> schema_error. Replaces any
// previous answer for the same key.
void record_response(StudySession& session, std::string_view question_id,
                     std::optional<SystemCondition> condition, int value);

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;  // sample (n - 1) deviation

    std::string formatted() const;  // "4.16 ± 0.63"
};

// Throws insufficient_data for fewer than two values.
Summary summarize(std::span<const int> values);

struct AggregateCell {
    std::string question_id;
    std::optional<SystemCondition> condition;
    std::size_t n = 0;
    std::optional<Summary> summary;  // empty when n < 2
};

// Once-rated questions first (results table order), then each repeated
// question for SYS1, SYS2, SYS3.
std::vector<AggregateCell> aggregate(std::span<const StudySession> sessions);

struct DemographicRow {
    std::string category;  // "Gender" or "Medical Background"
    std::string option;
    std::size_t count = 0;
    double percentage = 0.0;
};

// Male and Female always listed; Other only when present. Medical background
// as Yes / No.
std::vector<DemographicRow> demographics_table(std::span<const StudySession> sessions);

std::string format_percentage(double value);  // "68.75%"

std::string aggregate_csv(std::span<const AggregateCell> cells);
std::string demographics_csv(std::span<const DemographicRow> rows);

void save_sessions(const std::filesystem::path& jsonl, std::span<const StudySession> sessions);
std::vector<StudySession> load_sessions(const std::filesystem::path& jsonl);
std::string session_to_json(const StudySession& session);
StudySession session_from_json(std::string_view line);

// Thread-safe participant store used by the service; persists to JSONL after
// every change when a path is set.
class StudyRegistry {
public:
    explicit StudyRegistry(std::optional<std::filesystem::path> store = std::nullopt,
                           std::optional<std::uint64_t> random_order_seed = std::nullopt);

    StudySession add_participant(Gender gender, bool medical_background);
    StudySession record(std::string_view participant_id, std::string_view question_id,
                        std::optional<SystemCondition> condition, int value);
    std::vector<StudySession> sessions() const;

private:
    void persist() const;

    mutable std::mutex mutex_;
    std::optional<std::filesystem::path> store_;
    std::optional<std::uint64_t> random_order_seed_;
    std::vector<StudySession> sessions_;
};

}  // namespace skingen
