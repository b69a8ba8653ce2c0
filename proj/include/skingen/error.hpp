// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skingen {

enum class ErrorCode {
    invalid_argument,
    backend_error,
    diagnosis_parse_error,
    degenerate_region,
    lesion_not_found,
    empty_mask,
    generation_failed,
    invalid_record,
    missing_description,
    io_error,
    numeric_error,
    schema_error,
    insufficient_data,
    unsupported_media,
    not_found,
    precondition_failed,
};

std::string_view to_string(ErrorCode code);
// Inverse of to_string; unknown names map to backend_error.
ErrorCode error_code_from_string(std::string_view text);

// All library failures are reported as skingen::Error carrying a code the
// service and CLI layers map onto HTTP statuses / exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
    if (!condition) fail(ErrorCode::invalid_argument, message);
}

}  // namespace skingen
