// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CPBSP_IMAGE_IO_HPP
#define CPBSP_IMAGE_IO_HPP

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fnmatch.h>
#include <png.h>

#include "cpbsp/image.hpp"

namespace cpbsp {
namespace detail {

// --------------------------------------------------------------------------
// PNM (PGM P5 / PPM P6)
// --------------------------------------------------------------------------

inline bool pnm_skip_space(const std::string& buf, std::size_t& pos) {
    for (;;) {
        while (pos < buf.size() && std::isspace(static_cast<unsigned char>(buf[pos]))) ++pos;
        if (pos < buf.size() && buf[pos] == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
            continue;
        }
        return pos < buf.size();
    }
}

inline long pnm_read_int(const std::string& buf, std::size_t& pos, const std::string& name) {
    if (!pnm_skip_space(buf, pos) || !std::isdigit(static_cast<unsigned char>(buf[pos]))) {
        throw DecodeError(name + ": malformed PNM header");
    }
    long v = 0;
    while (pos < buf.size() && std::isdigit(static_cast<unsigned char>(buf[pos]))) {
        v = v * 10 + (buf[pos] - '0');
        if (v > 1'000'000'000L) throw DecodeError(name + ": PNM header value out of range");
        ++pos;
    }
    return v;
}

inline Frame decode_pnm(const std::string& buf, const std::string& name) {
    if (buf.size() < 2) throw DecodeError(name + ": truncated file");
    const bool color = buf[1] == '6';
    if (buf[0] != 'P' || (buf[1] != '5' && buf[1] != '6')) {
        throw DecodeError(name + ": only binary PGM (P5) and PPM (P6) are supported");
    }
    std::size_t pos = 2;
    const long w = pnm_read_int(buf, pos, name);
    const long h = pnm_read_int(buf, pos, name);
    const long maxval = pnm_read_int(buf, pos, name);
    if (w <= 0 || h <= 0) throw DecodeError(name + ": bad dimensions");
    if (maxval <= 0 || maxval > 255) throw DecodeError(name + ": only 8-bit PNM supported");
    if (pos >= buf.size() || !std::isspace(static_cast<unsigned char>(buf[pos]))) {
        throw DecodeError(name + ": malformed PNM header");
    }
    ++pos;  // single whitespace byte before the raster

    const std::size_t pixels = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    const std::size_t need = color ? 3 * pixels : pixels;
    if (buf.size() - pos < need) throw DecodeError(name + ": truncated raster");

    std::vector<std::uint8_t> raster(need);
    std::copy_n(reinterpret_cast<const unsigned char*>(buf.data()) + pos, need, raster.begin());
    return color ? Frame::from_color(static_cast<int>(w), static_cast<int>(h), std::move(raster))
                 : Frame::from_gray(static_cast<int>(w), static_cast<int>(h), std::move(raster));
}

inline void encode_pnm(std::string& out, const Frame& f, bool color) {
    out = color ? "P6\n" : "P5\n";
    out += std::to_string(f.width) + " " + std::to_string(f.height) + "\n255\n";
    const auto& plane = color ? f.color : f.gray;
    out.append(reinterpret_cast<const char*>(plane.data()), plane.size());
}

// --------------------------------------------------------------------------
// PNG via libpng
// --------------------------------------------------------------------------

struct FileHandle {
    std::FILE* fp = nullptr;
    explicit FileHandle(const std::filesystem::path& p, const char* mode)
        : fp(std::fopen(p.string().c_str(), mode)) {}
    ~FileHandle() {
        if (fp) std::fclose(fp);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

inline Frame decode_png(const std::filesystem::path& path) {
    const std::string name = path.filename().string();
    FileHandle file(path, "rb");
    if (!file.fp) throw DecodeError(name + ": cannot open file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError(name + ": libpng init failed");
    }

    Frame frame;
    std::vector<std::uint8_t> raster;
    std::vector<png_bytep> rows;
    bool failed = false;

    if (setjmp(png_jmpbuf(png))) {
        failed = true;
    } else {
        png_init_io(png, file.fp);
        png_read_info(png, info);

        const png_uint_32 w = png_get_image_width(png, info);
        const png_uint_32 h = png_get_image_height(png, info);
        const int depth = png_get_bit_depth(png, info);
        int color_type = png_get_color_type(png, info);

        if (depth == 16) {
            png_destroy_read_struct(&png, &info, nullptr);
            throw DecodeError(name + ": 16-bit PNG unsupported");
        }
        if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
        png_read_update_info(png, info);

        color_type = png_get_color_type(png, info);
        const int channels = png_get_channels(png, info);
        if (channels != 1 && channels != 3) {
            png_destroy_read_struct(&png, &info, nullptr);
            throw DecodeError(name + ": unsupported PNG channel layout");
        }

        raster.resize(static_cast<std::size_t>(w) * h * channels);
        rows.resize(h);
        const std::size_t stride = static_cast<std::size_t>(w) * channels;
        for (png_uint_32 y = 0; y < h; ++y) rows[y] = raster.data() + y * stride;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);

        frame = channels == 3
                    ? Frame::from_color(static_cast<int>(w), static_cast<int>(h), std::move(raster))
                    : Frame::from_gray(static_cast<int>(w), static_cast<int>(h), std::move(raster));
    }

    png_destroy_read_struct(&png, &info, nullptr);
    if (failed) throw DecodeError(name + ": corrupt PNG");
    return frame;
}

inline void encode_png(const Frame& f, const std::filesystem::path& path, bool color) {
    FileHandle file(path, "wb");
    if (!file.fp) throw WriteError(path.string() + ": cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw WriteError(path.string() + ": libpng init failed");
    }

    std::vector<png_const_bytep> rows(static_cast<std::size_t>(f.height));
    const auto& plane = color ? f.color : f.gray;
    const std::size_t stride = static_cast<std::size_t>(f.width) * (color ? 3 : 1);
    for (int y = 0; y < f.height; ++y) rows[static_cast<std::size_t>(y)] = plane.data() + y * stride;

    bool failed = false;
    if (setjmp(png_jmpbuf(png))) {
        failed = true;
    } else {
        png_init_io(png, file.fp);
        png_set_IHDR(png, info, static_cast<png_uint_32>(f.width), static_cast<png_uint_32>(f.height),
                     8, color ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                     PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        png_write_image(png, const_cast<png_bytepp>(rows.data()));
        png_write_end(png, nullptr);
    }
    png_destroy_write_struct(&png, &info);
    if (failed) throw WriteError(path.string() + ": PNG encode failed");
}

inline std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

}  // namespace detail

// ----------------------------------------------------------------------------
// Public API
// ----------------------------------------------------------------------------

/// Loads a single image, dispatching on file magic. Supported: PGM (P5),
/// PPM (P6), 8-bit PNG. Anything else (including JPEG) is a DecodeError.
inline Frame load_image(const std::filesystem::path& path) {
    const std::string name = path.filename().string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DecodeError(name + ": cannot open file");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() >= 8 && !png_sig_cmp(reinterpret_cast<png_const_bytep>(buf.data()), 0, 8)) {
        return detail::decode_png(path);
    }
    if (buf.size() >= 2 && buf[0] == 'P' && (buf[1] == '5' || buf[1] == '6')) {
        return detail::decode_pnm(buf, name);
    }
    if (buf.size() >= 2 && static_cast<unsigned char>(buf[0]) == 0xff &&
        static_cast<unsigned char>(buf[1]) == 0xd8) {
        throw DecodeError(name + ": JPEG input rejected (lossless formats only)");
    }
    throw DecodeError(name + ": unrecognized image format");
}

/// Saves a frame. The container comes from the extension (.pgm/.ppm/.png),
/// the stored plane from `mode`. PGM only holds gray, PPM only color.
inline void save_image(const Frame& frame, const std::filesystem::path& path, ImageMode mode) {
    if (mode == ImageMode::Color && !frame.has_color()) {
        throw ModeError("frame has no color plane to save");
    }
    const std::string ext = detail::lower_extension(path);
    const bool color = mode == ImageMode::Color;
    if (ext == ".png") {
        detail::encode_png(frame, path, color);
        return;
    }
    if (ext == ".pgm" || ext == ".ppm") {
        if (color != (ext == ".ppm")) {
            throw ModeError(ext + " cannot store " + (color ? "color" : "gray") + " data");
        }
        std::string payload;
        detail::encode_pnm(payload, frame, color);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw WriteError(path.string() + ": cannot open for writing");
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        if (!out) throw WriteError(path.string() + ": short write");
        return;
    }
    throw WriteError(path.string() + ": unsupported output extension");
}

/// Loads every file in `dir_path` whose *filename* matches the glob
/// `pattern`, sorted lexicographically. All frames must share dimensions.
inline FrameSequence load_sequence(const std::filesystem::path& dir_path,
                                   const std::string& pattern = "*") {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir_path)) {
        throw Error("not a directory: " + dir_path.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir_path)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (fnmatch(pattern.c_str(), name.c_str(), 0) == 0) files.push_back(entry.path());
    }
    if (files.empty()) {
        throw NoFrames("no files matching '" + pattern + "' in " + dir_path.string());
    }
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });

    FrameSequence seq;
    for (const auto& file : files) {
        Frame f = load_image(file);
        if (!seq.empty() && (f.width != seq.width() || f.height != seq.height())) {
            throw DimensionMismatch(file.filename().string() + ": expected " +
                                    std::to_string(seq.width()) + "x" + std::to_string(seq.height()) +
                                    ", got " + std::to_string(f.width) + "x" +
                                    std::to_string(f.height));
        }
        seq.append(std::move(f));
    }
    return seq;
}

}  // namespace cpbsp

#endif  // CPBSP_IMAGE_IO_HPP
