// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "skingen/backends.hpp"
#include "skingen/core.hpp"

namespace skingen {

inline constexpr std::string_view kPrimaryPrompt =
    "Could you diagnose the skin disease in this image for me?";
inline constexpr std::string_view kAlternativesPrompt =
    "What's the other possible skin disease in this picture?";

inline constexpr std::size_t kMaxAlternatives = 5;

enum class PromptKind { primary, alternatives };

struct PromptTask {
    PromptKind kind;
    std::string_view text;
};

inline constexpr PromptTask kPrimaryTask{PromptKind::primary, kPrimaryPrompt};
inline constexpr PromptTask kAlternativesTask{PromptKind::alternatives, kAlternativesPrompt};

std::string_view to_string(PromptKind kind);

// Accepts bracketed/quoted lists, comma-separated lines and numbered or
// bulleted lines. Order is preserved; duplicates are kept; text with no items
// gives an empty list.
std::vector<NormalizedCondition> parse_condition_list(std::string_view text,
                                                      const ConditionVocabulary& vocab);

// Vocabulary label found in the response (earliest position, longest label on
// ties), else the first item of a bracketed or numbered/bulleted list in the
// response. Plain prose with no known label is a diagnosis_parse_error.
NormalizedCondition extract_primary(std::string_view text, const ConditionVocabulary& vocab);

// Runs both prompt tasks. Backend failures are rethrown as backend_error with
// the task kind in the message.
Diagnosis diagnose(const SkinImage& image, const DiagnoserBackend& backend,
                   const ConditionVocabulary& vocab);

// ["A", "B"] rendering used by stubs and round-trip tests.
std::string serialize_bracketed(const std::vector<std::string>& labels);

}  // namespace skingen
