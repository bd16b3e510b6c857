// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic sequence generator with known ground truth, for testing the
// pipeline against the usual failure modes at desk scale: a moving object,
// a global illumination ramp, and camera jitter.

#ifndef CPBSP_SYNTH_HPP
#define CPBSP_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "cpbsp/image.hpp"

namespace cpbsp {

enum class SynthBackground { Gradient, TexturedNoise, Checker };

inline std::string to_string(SynthBackground b) {
    switch (b) {
        case SynthBackground::Gradient: return "gradient";
        case SynthBackground::TexturedNoise: return "noise";
        default: return "checker";
    }
}

inline SynthBackground synth_background_from_string(const std::string& s) {
    if (s == "gradient") return SynthBackground::Gradient;
    if (s == "noise" || s == "textured-noise") return SynthBackground::TexturedNoise;
    if (s == "checker") return SynthBackground::Checker;
    throw SpecError("unknown background '" + s + "' (expected gradient|noise|checker)");
}

struct SynthObject {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
    int intensity_offset = 0;
    double vel_x = 0.0;   // px/frame
    double vel_y = 0.0;
    int active_from = 0;  // inclusive
    int active_to = -1;   // inclusive; -1 = last frame
};

struct SynthRect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open [x0,x1) x [y0,y1)
};

struct SynthSpec {
    int width = 320;
    int height = 240;
    int frame_count = 120;
    SynthBackground background = SynthBackground::Gradient;
    int checker_cell = 16;
    int noise_base = 120;
    int noise_amplitude = 40;
    std::optional<SynthObject> object;
    double gain_slope = 0.0;   // g(t) = 1 + gain_slope * t
    int jitter_amplitude = 0;  // per-frame integer translation in [-amp, amp]
    std::uint64_t seed = 0;

    int last_active_frame() const {
        if (!object) return -1;
        return object->active_to < 0 ? frame_count - 1 : object->active_to;
    }

    void validate() const {
        if (width < 1 || height < 1) throw SpecError("frame dimensions must be >= 1");
        if (frame_count < 1) throw SpecError("frame_count must be >= 1");
        if (checker_cell < 1) throw SpecError("checker_cell must be >= 1");
        if (noise_amplitude < 0) throw SpecError("noise_amplitude must be >= 0");
        if (noise_base < 0 || noise_base > 255) throw SpecError("noise_base must be in [0,255]");
        if (jitter_amplitude < 0) throw SpecError("jitter_amplitude must be >= 0");
        if (1.0 + gain_slope * (frame_count - 1) <= 0.0) {
            throw SpecError("gain ramp drives intensities non-positive");
        }
        if (object) {
            const auto& o = *object;
            if (o.width < 1 || o.height < 1) throw SpecError("object dimensions must be >= 1");
            const int last = last_active_frame();
            if (o.active_from < 0 || o.active_from > last || last >= frame_count) {
                throw SpecError("object active range outside the sequence");
            }
            for (int t = o.active_from; t <= last; ++t) {
                const auto r = object_rect_at(t);
                if (r.x0 < 0 || r.y0 < 0 || r.x1 > width || r.y1 > height) {
                    throw SpecError("object leaves the frame at t=" + std::to_string(t));
                }
            }
        }
    }

    /// Object bounding box at frame t, or a degenerate rect when inactive.
    SynthRect object_rect_at(int t) const {
        if (!object || t < object->active_from || t > last_active_frame()) return SynthRect{};
        const auto& o = *object;
        const int ox = o.x + static_cast<int>(std::lround(o.vel_x * (t - o.active_from)));
        const int oy = o.y + static_cast<int>(std::lround(o.vel_y * (t - o.active_from)));
        return SynthRect{ox, oy, ox + o.width, oy + o.height};
    }
};

struct SynthResult {
    FrameSequence frames;
    Frame ground_truth;
};

namespace detail {

inline Frame synth_base(const SynthSpec& spec, std::mt19937_64& rng) {
    Frame gt(spec.width, spec.height);
    switch (spec.background) {
        case SynthBackground::Gradient:
            for (int y = 0; y < spec.height; ++y) {
                for (int x = 0; x < spec.width; ++x) {
                    const double fx = spec.width > 1 ? static_cast<double>(x) / (spec.width - 1) : 0.0;
                    const double fy =
                        spec.height > 1 ? static_cast<double>(y) / (spec.height - 1) : 0.0;
                    gt.at(x, y) = static_cast<std::uint8_t>(std::lround(40.0 + 160.0 * 0.5 * (fx + fy)));
                }
            }
            break;
        case SynthBackground::TexturedNoise: {
            const int span = 2 * spec.noise_amplitude + 1;
            for (auto& px : gt.gray) {
                const int noise = static_cast<int>(rng() % static_cast<std::uint64_t>(span)) -
                                  spec.noise_amplitude;
                px = static_cast<std::uint8_t>(std::clamp(spec.noise_base + noise, 0, 255));
            }
            break;
        }
        case SynthBackground::Checker:
            for (int y = 0; y < spec.height; ++y) {
                for (int x = 0; x < spec.width; ++x) {
                    gt.at(x, y) = (x / spec.checker_cell + y / spec.checker_cell) % 2 ? 180 : 60;
                }
            }
            break;
    }
    return gt;
}

}  // namespace detail

/// Renders the whole sequence plus the clean ground-truth background.
/// Composition per frame: ground truth, object offset, gain ramp, rounding,
/// then jitter translation (clamped at the borders). Deterministic in seed.
inline SynthResult synthesize(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    SynthResult out;
    out.ground_truth = detail::synth_base(spec, rng);

    Frame staged(spec.width, spec.height);
    for (int t = 0; t < spec.frame_count; ++t) {
        const double gain = 1.0 + spec.gain_slope * t;
        const SynthRect rect = spec.object_rect_at(t);
        const bool active = rect.x1 > rect.x0 && rect.y1 > rect.y0;
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                double v = out.ground_truth.at(x, y);
                if (active && x >= rect.x0 && x < rect.x1 && y >= rect.y0 && y < rect.y1) {
                    v += spec.object ? spec.object->intensity_offset : 0;
                }
                v *= gain;
                staged.at(x, y) = static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
            }
        }
        Frame frame(spec.width, spec.height);
        if (spec.jitter_amplitude > 0) {
            const int span = 2 * spec.jitter_amplitude + 1;
            const int jx = static_cast<int>(rng() % static_cast<std::uint64_t>(span)) -
                           spec.jitter_amplitude;
            const int jy = static_cast<int>(rng() % static_cast<std::uint64_t>(span)) -
                           spec.jitter_amplitude;
            for (int y = 0; y < spec.height; ++y) {
                for (int x = 0; x < spec.width; ++x) {
                    const int sx = std::clamp(x - jx, 0, spec.width - 1);
                    const int sy = std::clamp(y - jy, 0, spec.height - 1);
                    frame.at(x, y) = staged.at(sx, sy);
                }
            }
        } else {
            frame.gray = staged.gray;
        }
        out.frames.append(std::move(frame));
    }
    return out;
}

}  // namespace cpbsp

#endif  // CPBSP_SYNTH_HPP
