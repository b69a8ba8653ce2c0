// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace skingen {

// Stable, platform-independent 64-bit hashing and PRNG used by every stub
// backend and by dataset sampling. Nothing here may depend on std::hash or on
// the standard library's distribution implementations.

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

std::uint64_t mix64(std::uint64_t x);

// Incremental keyed hash over a sequence of fields. Fields are length-prefixed
// so ("ab","c") and ("a","bc") differ.
class StableHasher {
public:
    explicit StableHasher(std::uint64_t seed = 0);

    StableHasher& add(std::string_view field);
    StableHasher& add(std::uint64_t value);
    StableHasher& add(std::int64_t value) { return add(static_cast<std::uint64_t>(value)); }
    StableHasher& add(int value) { return add(static_cast<std::uint64_t>(static_cast<std::int64_t>(value))); }
    StableHasher& add(double value);

    std::uint64_t digest() const { return mix64(state_); }

private:
    std::uint64_t state_;
};

// SplitMix64 generator.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    // Uniform in [0, 1) with 53 bits of precision.
    double uniform01();
    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    // Unbiased integer in [0, bound), bound > 0.
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

std::string to_hex(std::uint64_t value);

}  // namespace skingen
