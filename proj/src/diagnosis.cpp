// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/diagnosis.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <fmt/format.h>

namespace skingen {

std::string_view to_string(PromptKind kind) {
    return kind == PromptKind::primary ? "primary" : "alternatives";
}

namespace {

bool is_quote(char c) { return c == '"' || c == '\'' || c == '`'; }

// Strip list markers ("1.", "2)", "-", "*", "•") and surrounding quotes/periods.
std::string clean_item(std::string_view raw) {
    std::string item = trim(raw);
    std::size_t i = 0;
    while (i < item.size() && std::isdigit(static_cast<unsigned char>(item[i]))) ++i;
    if (i > 0 && i < item.size() && (item[i] == '.' || item[i] == ')'))
        item = trim(std::string_view(item).substr(i + 1));
    else if (item.starts_with("- ") || item.starts_with("* ") || item == "-" || item == "*")
        item = trim(std::string_view(item).substr(1));
    else if (item.starts_with("•"))
        item = trim(std::string_view(item).substr(3));
    while (!item.empty() && (is_quote(item.front()) || item.front() == '[')) item.erase(0, 1);
    while (!item.empty() && (is_quote(item.back()) || item.back() == ']' || item.back() == '.' ||
                             item.back() == ';'))
        item.pop_back();
    return trim(item);
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        auto pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

// Quoted strings inside the first [...] group, or its comma-split content when
// nothing is quoted.
std::optional<std::vector<std::string>> bracketed_items(std::string_view text) {
    auto open = text.find('[');
    if (open == std::string_view::npos) return std::nullopt;
    auto close = text.find(']', open);
    if (close == std::string_view::npos) return std::nullopt;
    std::string_view body = text.substr(open + 1, close - open - 1);

    std::vector<std::string> items;
    bool quoted = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '"' || body[i] == '\'') {
            const char q = body[i];
            auto end = body.find(q, i + 1);
            if (end == std::string_view::npos) break;
            items.emplace_back(body.substr(i + 1, end - i - 1));
            quoted = true;
            i = end;
        }
    }
    if (!quoted) items = split(body, ',');
    return items;
}

bool has_list_marker(std::string_view line) {
    std::string t = trim(line);
    std::size_t i = 0;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
    if (i > 0 && i < t.size() && (t[i] == '.' || t[i] == ')')) return true;
    return t.starts_with("- ") || t.starts_with("* ") || t.starts_with("•");
}

// With structured_only, free prose (no brackets, no list markers) yields
// nothing; otherwise every comma/newline-separated fragment is an item.
std::vector<NormalizedCondition> parse_items(std::string_view text, const ConditionVocabulary& vocab,
                                             bool structured_only) {
    std::vector<std::string> raw;
    if (auto items = bracketed_items(text)) {
        raw = std::move(*items);
    } else {
        for (const auto& line : split(text, '\n')) {
            if (structured_only && !has_list_marker(line)) continue;
            for (auto& part : split(line, ',')) raw.push_back(std::move(part));
        }
    }
    std::vector<NormalizedCondition> out;
    for (const auto& r : raw) {
        std::string item = clean_item(r);
        if (item.empty()) continue;
        out.push_back(normalize_condition(item, vocab));
    }
    return out;
}

}  // namespace

std::vector<NormalizedCondition> parse_condition_list(std::string_view text,
                                                      const ConditionVocabulary& vocab) {
    return parse_items(text, vocab, false);
}

NormalizedCondition extract_primary(std::string_view text, const ConditionVocabulary& vocab) {
    const std::string haystack = to_lower(text);
    const std::string* best = nullptr;
    std::size_t best_pos = std::string::npos;
    for (const auto& label : vocab.names()) {
        const std::string key = condition_key(label);
        const auto pos = haystack.find(key);
        if (pos == std::string::npos) continue;
        if (best == nullptr || pos < best_pos || (pos == best_pos && label.size() > best->size())) {
            best = &label;
            best_pos = pos;
        }
    }
    if (best) return {*best, true};

    auto items = parse_items(text, vocab, true);
    if (!items.empty()) return items.front();
    fail(ErrorCode::diagnosis_parse_error,
         fmt::format("no condition found in response: {}", std::string(text)));
}

namespace {

std::string ask(const DiagnoserBackend& backend, const SkinImage& image, const PromptTask& task) {
    try {
        return backend.answer(image, task.text);
    } catch (const Error& e) {
        fail(ErrorCode::backend_error, fmt::format("{} task: {}", to_string(task.kind), e.what()));
    } catch (const std::exception& e) {
        fail(ErrorCode::backend_error, fmt::format("{} task: {}", to_string(task.kind), e.what()));
    }
}

}  // namespace

Diagnosis diagnose(const SkinImage& image, const DiagnoserBackend& backend,
                   const ConditionVocabulary& vocab) {
    Diagnosis dx;
    dx.image_id = image.id();
    dx.narrative = ask(backend, image, kPrimaryTask);
    dx.primary = extract_primary(dx.narrative, vocab);

    const std::string listing = ask(backend, image, kAlternativesTask);
    std::vector<std::string> seen{condition_key(dx.primary.name)};
    for (auto& alt : parse_condition_list(listing, vocab)) {
        if (dx.alternatives.size() == kMaxAlternatives) break;
        std::string key = condition_key(alt.name);
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(std::move(key));
        dx.alternatives.push_back(std::move(alt));
    }
    dx.validate();
    return dx;
}

std::string serialize_bracketed(const std::vector<std::string>& labels) {
    std::string out = "[";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ", ";
        out += '"' + labels[i] + '"';
    }
    return out + "]";
}

}  // namespace skingen
