// Copyright 2026 The SkinGen Authors
// SPDX-License-Identifier: Apache-2.0

#include "skingen/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <fmt/format.h>
#include <jpeglib.h>
#include <openssl/evp.h>
#include <png.h>

namespace skingen {
namespace {

bool is_png(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

bool is_jpeg(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

SkinImage decode_png(std::span<const std::uint8_t> bytes, std::string id, ImageSource source) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        fail(ErrorCode::unsupported_media, fmt::format("undecodable PNG: {}", image.message));
    image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
        png_image_free(&image);
        fail(ErrorCode::unsupported_media, fmt::format("undecodable PNG: {}", image.message));
    }
    return SkinImage(std::move(id), static_cast<int>(image.width), static_cast<int>(image.height),
                     std::move(pixels), source);
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

SkinImage decode_jpeg(std::span<const std::uint8_t> bytes, std::string id, ImageSource source) {
    jpeg_decompress_struct cinfo;
    JpegErrorManager err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    std::vector<std::uint8_t> pixels;
    int width = 0;
    int height = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        fail(ErrorCode::unsupported_media, fmt::format("undecodable JPEG: {}", err.message));
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    width = static_cast<int>(cinfo.output_width);
    height = static_cast<int>(cinfo.output_height);
    pixels.resize(static_cast<std::size_t>(width) * height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return SkinImage(std::move(id), width, height, std::move(pixels), source);
}

void png_append(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void png_abort(png_structp png, png_const_charp message) {
    auto* jump = static_cast<std::jmp_buf*>(png_get_error_ptr(png));
    (void)message;
    std::longjmp(*jump, 1);
}

}  // namespace

SkinImage decode_image(std::span<const std::uint8_t> bytes, std::string id, ImageSource source) {
    if (is_png(bytes)) return decode_png(bytes, std::move(id), source);
    if (is_jpeg(bytes)) return decode_jpeg(bytes, std::move(id), source);
    fail(ErrorCode::unsupported_media, "data is neither PNG nor JPEG");
}

Bytes encode_png(const SkinImage& image) {
    png_image desc;
    std::memset(&desc, 0, sizeof desc);
    desc.version = PNG_IMAGE_VERSION;
    desc.width = static_cast<png_uint_32>(image.width());
    desc.height = static_cast<png_uint_32>(image.height());
    desc.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    auto pixels = image.pixels();
    if (!png_image_write_to_memory(&desc, nullptr, &size, 0, pixels.data(), 0, nullptr))
        fail(ErrorCode::io_error, fmt::format("PNG encode failed: {}", desc.message));
    Bytes out(size);
    if (!png_image_write_to_memory(&desc, out.data(), &size, 0, pixels.data(), 0, nullptr))
        fail(ErrorCode::io_error, fmt::format("PNG encode failed: {}", desc.message));
    out.resize(size);
    return out;
}

SkinImage read_image_file(const std::filesystem::path& path, std::string id, ImageSource source) {
    return decode_image(read_file(path), std::move(id), source);
}

void write_png_file(const std::filesystem::path& path, const SkinImage& image) {
    write_file(path, encode_png(image));
}

Bytes encode_mask_png(const MaskImage& mask) {
    Bytes out;
    std::jmp_buf jump;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &jump, png_abort, nullptr);
    if (!png) fail(ErrorCode::io_error, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    std::vector<std::uint8_t> row((static_cast<std::size_t>(mask.width()) + 7) / 8);
    if (setjmp(jump)) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorCode::io_error, "mask PNG encode failed");
    }
    png_set_write_fn(png, &out, png_append, nullptr);
    png_set_IHDR(png, info, static_cast<png_uint_32>(mask.width()),
                 static_cast<png_uint_32>(mask.height()), 1, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < mask.height(); ++y) {
        std::fill(row.begin(), row.end(), 0);
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) row[x / 8] |= static_cast<std::uint8_t>(0x80u >> (x % 8));
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

MaskImage decode_mask_png(std::span<const std::uint8_t> bytes, std::string image_id) {
    if (!is_png(bytes)) fail(ErrorCode::unsupported_media, "mask is not a PNG");
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        fail(ErrorCode::unsupported_media, fmt::format("undecodable mask: {}", image.message));
    image.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> gray(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, gray.data(), 0, nullptr)) {
        png_image_free(&image);
        fail(ErrorCode::unsupported_media, fmt::format("undecodable mask: {}", image.message));
    }
    for (auto& v : gray) v = v >= 128 ? 1 : 0;
    return MaskImage(std::move(image_id), static_cast<int>(image.width),
                     static_cast<int>(image.height), std::move(gray));
}

SkinImage resize(const SkinImage& image, int width, int height) {
    require(width >= 1 && height >= 1, "resize target must be positive");
    if (image.width() == width && image.height() == height) return image;
    std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * height * 3);
    const double sx = static_cast<double>(image.width()) / width;
    const double sy = static_cast<double>(image.height()) / height;
    const int max_x = image.width() - 1;
    const int max_y = image.height() - 1;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(max_y));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, max_y);
        const double wy = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(max_x));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, max_x);
            const double wx = fx - x0;
            for (int c = 0; c < 3; ++c) {
                const double top = image.at(x0, y0, c) * (1 - wx) + image.at(x1, y0, c) * wx;
                const double bottom = image.at(x0, y1, c) * (1 - wx) + image.at(x1, y1, c) * wx;
                const double v = top * (1 - wy) + bottom * wy;
                out[(static_cast<std::size_t>(y) * width + x) * 3 + c] =
                    static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return SkinImage(image.id(), width, height, std::move(out), image.source(), image.label());
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io_error, fmt::format("cannot read '{}'", path.string()));
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io_error, fmt::format("cannot write '{}'", path.string()));
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::io_error, fmt::format("write to '{}' failed", path.string()));
}

void write_file(const std::filesystem::path& path, std::string_view text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr))
        fail(ErrorCode::io_error, "sha256 failed");
    std::string hex;
    hex.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

}  // namespace skingen
