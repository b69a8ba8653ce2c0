// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "skingen/core.hpp"

namespace skingen {

using Bytes = std::vector<std::uint8_t>;

// Decodes PNG or JPEG (sniffed from magic bytes) into 8-bit RGB. Gray and
// alpha channels are converted; anything else raises unsupported_media.
SkinImage decode_image(std::span<const std::uint8_t> bytes, std::string id,
                       ImageSource source = ImageSource::dataset);

Bytes encode_png(const SkinImage& image);

SkinImage read_image_file(const std::filesystem::path& path, std::string id,
                          ImageSource source = ImageSource::dataset);
void write_png_file(const std::filesystem::path& path, const SkinImage& image);

// 1-bit grayscale PNG.
Bytes encode_mask_png(const MaskImage& mask);
MaskImage decode_mask_png(std::span<const std::uint8_t> bytes, std::string image_id);

// Bilinear resampling with pixel-center alignment. Returns a copy when the
// size already matches.
SkinImage resize(const SkinImage& image, int width, int height);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file(const std::filesystem::path& path, std::string_view text);

std::string sha256_hex(std::span<const std::uint8_t> bytes);

}  // namespace skingen
