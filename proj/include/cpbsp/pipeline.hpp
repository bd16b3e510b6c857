// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end background initialization: CPB training, per-frame foreground
// detection, superpixel lifting of the foreground into a motion mask, and
// mask-region replacement with the trained background model.

#ifndef CPBSP_PIPELINE_HPP
#define CPBSP_PIPELINE_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cpbsp/cpb.hpp"
#include "cpbsp/image.hpp"
#include "cpbsp/slic.hpp"

namespace cpbsp {

enum class Aggregate { Last, Mean, Median };

inline std::string to_string(Aggregate a) {
    switch (a) {
        case Aggregate::Last: return "last";
        case Aggregate::Mean: return "mean";
        default: return "median";
    }
}

inline Aggregate aggregate_from_string(const std::string& s) {
    if (s == "last") return Aggregate::Last;
    if (s == "mean") return Aggregate::Mean;
    if (s == "median") return Aggregate::Median;
    throw ParamError("unknown aggregate '" + s + "' (expected last|mean|median)");
}

struct PipelineConfig {
    CpbParams cpb;
    SlicParams slic;
    double overlap_frac = 0.1;  // min foreground fraction for a region to join the mask
    Aggregate aggregate = Aggregate::Median;

    void validate() const {
        cpb.validate();
        slic.validate();
        if (!(overlap_frac > 0.0) || overlap_frac > 1.0) {
            throw ParamError("overlap_frac must be in (0,1]");
        }
    }
};

struct MotionMask {
    int frame_index = 0;
    BinaryMap mask;
};

// ----------------------------------------------------------------------------
// Motion mask (superpixel lifting)
// ----------------------------------------------------------------------------

/// Lifts a per-pixel foreground map onto superpixel regions: a region joins
/// the selected set V when its foreground fraction reaches overlap_frac;
/// the mask is then the indicator of membership in V.
inline MotionMask build_motion_mask(const BinaryMap& fg_map, const SuperpixelLabeling& labeling,
                                    double overlap_frac, int frame_index = 0) {
    if (fg_map.width != labeling.width || fg_map.height != labeling.height) {
        throw GeometryError("foreground map and labeling dimensions differ");
    }
    if (!(overlap_frac > 0.0) || overlap_frac > 1.0) {
        throw ParamError("overlap_frac must be in (0,1]");
    }
    const int regions = labeling.region_count();
    std::vector<int> fg_count(static_cast<std::size_t>(regions), 0);
    std::vector<int> total(static_cast<std::size_t>(regions), 0);
    for (std::size_t i = 0; i < fg_map.data.size(); ++i) {
        const auto r = static_cast<std::size_t>(labeling.labels[i]);
        ++total[r];
        fg_count[r] += fg_map.data[i];
    }
    std::vector<std::uint8_t> selected(static_cast<std::size_t>(regions), 0);
    for (int r = 0; r < regions; ++r) {
        const auto ri = static_cast<std::size_t>(r);
        selected[ri] =
            static_cast<double>(fg_count[ri]) / static_cast<double>(total[ri]) >= overlap_frac ? 1
                                                                                               : 0;
    }
    MotionMask out;
    out.frame_index = frame_index;
    out.mask = BinaryMap(fg_map.width, fg_map.height);
    for (std::size_t i = 0; i < out.mask.data.size(); ++i) {
        out.mask.data[i] = selected[static_cast<std::size_t>(labeling.labels[i])];
    }
    return out;
}

// ----------------------------------------------------------------------------
// Background generation
// ----------------------------------------------------------------------------

/// Replaces masked pixels with the trained model mean; everything else is a
/// bit-exact pass-through of the input frame.
inline Frame generate_background(const CpbModel& model, const Frame& frame, const MotionMask& mask,
                                 ImageMode mode) {
    if (frame.width != model.width || frame.height != model.height ||
        mask.mask.width != model.width || mask.mask.height != model.height) {
        throw GeometryError("frame/mask dimensions do not match the model");
    }
    auto round_u8 = [](double v) {
        return static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
    };
    Frame out(frame.width, frame.height);
    out.index = frame.index;
    if (mode == ImageMode::Color) {
        if (!model.has_color) throw ModeError("model was trained without color");
        if (!frame.has_color()) throw ModeError("frame has no color plane");
        out.enable_color();
        for (std::size_t i = 0; i < out.pixel_count(); ++i) {
            if (mask.mask.data[i]) {
                const auto& m = model.pixels[i].mean_rgb;
                out.color[3 * i] = round_u8(m[0]);
                out.color[3 * i + 1] = round_u8(m[1]);
                out.color[3 * i + 2] = round_u8(m[2]);
            } else {
                out.color[3 * i] = frame.color[3 * i];
                out.color[3 * i + 1] = frame.color[3 * i + 1];
                out.color[3 * i + 2] = frame.color[3 * i + 2];
            }
        }
        out.derive_gray();
    } else {
        for (std::size_t i = 0; i < out.pixel_count(); ++i) {
            out.gray[i] = mask.mask.data[i] ? round_u8(model.pixels[i].mean_intensity) : frame.gray[i];
        }
    }
    return out;
}

// ----------------------------------------------------------------------------
// Aggregation
// ----------------------------------------------------------------------------

/// Pixelwise combination of per-frame backgrounds (per channel for color).
/// Median of an even count averages the two middle values.
inline Frame aggregate_frames(const std::vector<Frame>& frames, Aggregate mode) {
    if (frames.empty()) throw NoFrames("nothing to aggregate");
    if (mode == Aggregate::Last) return frames.back();

    const bool color = std::all_of(frames.begin(), frames.end(),
                                   [](const Frame& f) { return f.has_color(); });
    const int w = frames.front().width;
    const int h = frames.front().height;
    for (const auto& f : frames) {
        if (f.width != w || f.height != h) throw DimensionMismatch("aggregation dimensions differ");
    }
    const std::size_t planes = color ? 3 : 1;
    const std::size_t n = static_cast<std::size_t>(w) * h * planes;
    auto plane_of = [&](const Frame& f) { return color ? f.color.data() : f.gray.data(); };

    Frame out(w, h);
    if (color) out.enable_color();
    auto* out_plane = color ? out.color.data() : out.gray.data();

    if (mode == Aggregate::Mean) {
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (const auto& f : frames) sum += plane_of(f)[i];
            out_plane[i] = static_cast<std::uint8_t>(
                std::clamp<long>(std::lround(sum / static_cast<double>(frames.size())), 0, 255));
        }
    } else {
        std::vector<std::uint8_t> values(frames.size());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < frames.size(); ++t) values[t] = plane_of(frames[t])[i];
            std::sort(values.begin(), values.end());
            const std::size_t mid = values.size() / 2;
            const double median =
                values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
            out_plane[i] = static_cast<std::uint8_t>(std::clamp<long>(std::lround(median), 0, 255));
        }
    }
    if (color) out.derive_gray();
    return out;
}

// ----------------------------------------------------------------------------
// Full run
// ----------------------------------------------------------------------------

struct FrameProducts {
    BinaryMap foreground;
    MotionMask mask;
    Frame background;
};

struct PipelineResult {
    Frame background;                     // final aggregated estimate
    std::vector<FrameProducts> per_frame; // one entry per detection frame
    std::vector<int> detect_indices;      // sequence indices that were processed
};

/// Detection pass with an already-trained model. Detection frames are the
/// frames after the training window when any exist, otherwise the training
/// window itself.
inline PipelineResult run_pipeline(const CpbModel& model, const FrameSequence& seq,
                                   const PipelineConfig& cfg) {
    cfg.validate();
    const int total = static_cast<int>(seq.size());
    const int T = model.params.train_frames;
    if (total < T) throw InsufficientTraining("sequence shorter than the training window");

    PipelineResult result;
    if (total > T) {
        for (int t = T; t < total; ++t) result.detect_indices.push_back(t);
    } else {
        for (int t = 0; t < T; ++t) result.detect_indices.push_back(t);
    }
    const bool color_out = model.has_color && seq.all_color();
    result.per_frame.resize(result.detect_indices.size());

    detail::parallel_for(0, static_cast<int>(result.detect_indices.size()), [&](int i) {
        const int t = result.detect_indices[static_cast<std::size_t>(i)];
        const Frame& frame = seq[static_cast<std::size_t>(t)];
        FrameProducts& p = result.per_frame[static_cast<std::size_t>(i)];
        p.foreground = detect_frame(model, frame);
        const SuperpixelLabeling labeling = segment(frame, cfg.slic);
        p.mask = build_motion_mask(p.foreground, labeling, cfg.overlap_frac, t);
        p.background = generate_background(model, frame, p.mask,
                                           color_out ? ImageMode::Color : ImageMode::Gray);
    });

    std::vector<Frame> backgrounds;
    backgrounds.reserve(result.per_frame.size());
    for (const auto& p : result.per_frame) backgrounds.push_back(p.background);
    result.background = aggregate_frames(backgrounds, cfg.aggregate);
    return result;
}

/// Trains on the first cfg.cpb.train_frames frames, then runs detection.
inline PipelineResult run_pipeline(const FrameSequence& seq, const PipelineConfig& cfg) {
    cfg.validate();
    const CpbModel model = train(seq, cfg.cpb);
    return run_pipeline(model, seq, cfg);
}

}  // namespace cpbsp

#endif  // CPBSP_PIPELINE_HPP
