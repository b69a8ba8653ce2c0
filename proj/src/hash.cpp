// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/hash.hpp"

#include <bit>
#include <cstring>

#include <fmt/format.h>

namespace skingen {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

StableHasher::StableHasher(std::uint64_t seed) : state_(mix64(seed ^ 0x5ca1ab1e0ddba11ULL)) {}

StableHasher& StableHasher::add(std::string_view field) {
    state_ = mix64(state_ ^ field.size());
    state_ = fnv1a64(field, state_);
    return *this;
}

StableHasher& StableHasher::add(std::uint64_t value) {
    state_ = mix64(state_ ^ mix64(value + 0x9e3779b97f4a7c15ULL));
    return *this;
}

StableHasher& StableHasher::add(double value) {
    return add(std::bit_cast<std::uint64_t>(value));
}

std::uint64_t SplitMix64::next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
}

double SplitMix64::uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    // Rejection sampling on the top of the range keeps the result unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t r = next();
    while (r >= limit) r = next();
    return r % bound;
}

std::string to_hex(std::uint64_t value) {
    return fmt::format("{:016x}", value);
}

}  // namespace skingen
