// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CPBSP_IMAGE_HPP
#define CPBSP_IMAGE_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "cpbsp/common.hpp"

namespace cpbsp {

enum class ImageMode { Gray, Color };

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
};

inline bool operator==(const Rgb& a, const Rgb& b) { return a.r == b.r && a.g == b.g && a.b == b.b; }

/// BT.601 luma, rounded to the nearest gray level.
inline std::uint8_t to_grayscale(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(std::clamp<long>(std::lround(y), 0, 255));
}

inline std::uint8_t to_grayscale(const Rgb& c) { return to_grayscale(c.r, c.g, c.b); }

// ----------------------------------------------------------------------------
// Frame
// ----------------------------------------------------------------------------

/// One raster: an 8-bit grayscale plane, plus an optional interleaved RGB
/// plane. `gray` is always populated; when `color` is present it is the
/// source of truth and `gray` holds its BT.601 luma.
struct Frame {
    int width = 0;
    int height = 0;
    int index = 0;                    // frame ordinal t within its sequence
    std::vector<std::uint8_t> gray;   // width*height, row-major
    std::vector<std::uint8_t> color;  // empty, or 3*width*height RGB

    Frame() = default;

    Frame(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), gray(static_cast<std::size_t>(w) * h, fill) {}

    static Frame from_gray(int w, int h, std::vector<std::uint8_t> pixels) {
        Frame f;
        f.width = w;
        f.height = h;
        f.gray = std::move(pixels);
        assert(f.gray.size() == f.pixel_count());
        return f;
    }

    static Frame from_color(int w, int h, std::vector<std::uint8_t> rgb) {
        Frame f;
        f.width = w;
        f.height = h;
        f.color = std::move(rgb);
        assert(f.color.size() == 3 * f.pixel_count());
        f.derive_gray();
        return f;
    }

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    bool has_color() const { return !color.empty(); }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    std::uint8_t at(int x, int y) const { return gray[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return gray[static_cast<std::size_t>(y) * width + x]; }

    Rgb rgb_at(int x, int y) const {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
        return Rgb{color[i], color[i + 1], color[i + 2]};
    }

    void set_rgb(int x, int y, Rgb c) {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
        color[i] = c.r;
        color[i + 1] = c.g;
        color[i + 2] = c.b;
    }

    void enable_color(std::uint8_t fill = 0) { color.assign(3 * pixel_count(), fill); }

    /// Recomputes the gray plane from the color plane.
    void derive_gray() {
        gray.resize(pixel_count());
        for (std::size_t i = 0; i < pixel_count(); ++i) {
            gray[i] = to_grayscale(color[3 * i], color[3 * i + 1], color[3 * i + 2]);
        }
    }
};

/// Pixel-data equality (dimensions and planes); the sequence index is
/// bookkeeping and deliberately excluded so that save/load round-trips
/// compare equal.
inline bool operator==(const Frame& a, const Frame& b) {
    return a.width == b.width && a.height == b.height && a.gray == b.gray && a.color == b.color;
}

// ----------------------------------------------------------------------------
// FrameSequence
// ----------------------------------------------------------------------------

struct FrameSequence {
    std::vector<Frame> frames;

    bool empty() const { return frames.empty(); }
    std::size_t size() const { return frames.size(); }
    int width() const { return frames.empty() ? 0 : frames.front().width; }
    int height() const { return frames.empty() ? 0 : frames.front().height; }

    const Frame& operator[](std::size_t i) const { return frames[i]; }
    Frame& operator[](std::size_t i) { return frames[i]; }

    /// True when every frame carries a color plane.
    bool all_color() const {
        return !frames.empty() &&
               std::all_of(frames.begin(), frames.end(), [](const Frame& f) { return f.has_color(); });
    }

    /// Appends a frame, enforcing uniform dimensions and assigning the next
    /// ordinal index.
    void append(Frame f) {
        if (!frames.empty() && (f.width != width() || f.height != height())) {
            throw DimensionMismatch("frame dimensions differ within sequence");
        }
        f.index = static_cast<int>(frames.size());
        frames.push_back(std::move(f));
    }
};

// ----------------------------------------------------------------------------
// BinaryMap
// ----------------------------------------------------------------------------

/// Per-pixel 0/1 map. Used for CPB foreground maps and motion masks.
struct BinaryMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // values in {0,1}, row-major

    BinaryMap() = default;
    BinaryMap(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

    std::size_t count_set() const {
        std::size_t n = 0;
        for (const auto v : data) n += v;
        return n;
    }

    /// Renders the map as a visible image (0 -> black, 1 -> white).
    Frame to_frame() const {
        Frame f(width, height);
        for (std::size_t i = 0; i < data.size(); ++i) f.gray[i] = data[i] ? 255 : 0;
        return f;
    }
};

inline bool operator==(const BinaryMap& a, const BinaryMap& b) {
    return a.width == b.width && a.height == b.height && a.data == b.data;
}

}  // namespace cpbsp

#endif  // CPBSP_IMAGE_HPP
