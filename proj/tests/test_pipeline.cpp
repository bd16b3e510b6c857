// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cpbsp/metrics.hpp"
#include "cpbsp/pipeline.hpp"
#include "cpbsp/synth.hpp"
#include "test_support.hpp"

using cpbsp::Aggregate;
using cpbsp::BinaryMap;
using cpbsp::Frame;
using cpbsp::FrameSequence;
using cpbsp::MotionMask;
using cpbsp::SuperpixelLabeling;

namespace {

SuperpixelLabeling single_region(int w, int h) {
    SuperpixelLabeling lab;
    lab.width = w;
    lab.height = h;
    lab.labels.assign(static_cast<std::size_t>(w) * h, 0);
    lab.region_stats.resize(1);
    lab.region_stats[0].pixel_count = w * h;
    return lab;
}

}  // namespace

// ---------------------------------------------------------------------------
// build_motion_mask
// ---------------------------------------------------------------------------

TEST_CASE("an empty foreground map yields an empty mask", "[pipeline]") {
    std::mt19937 rng(71);
    const Frame f = testutil::random_gray(32, 24, rng);
    const auto lab = cpbsp::segment(f, cpbsp::SlicParams{});
    const auto mask = cpbsp::build_motion_mask(BinaryMap(32, 24), lab, 0.1);
    CHECK(mask.mask.count_set() == 0);
}

TEST_CASE("a full foreground map selects every region", "[pipeline]") {
    std::mt19937 rng(72);
    const Frame f = testutil::random_gray(32, 24, rng);
    const auto lab = cpbsp::segment(f, cpbsp::SlicParams{});
    const auto mask = cpbsp::build_motion_mask(BinaryMap(32, 24, 1), lab, 1.0);
    CHECK(mask.mask.count_set() == 32u * 24u);
}

TEST_CASE("region selection follows the overlap fraction", "[pipeline]") {
    const auto lab = single_region(10, 10);
    BinaryMap fg(10, 10);
    for (int i = 0; i < 30; ++i) fg.data[static_cast<std::size_t>(i)] = 1;  // 30 of 100 px

    CHECK(cpbsp::build_motion_mask(fg, lab, 0.25).mask.count_set() == 100);
    CHECK(cpbsp::build_motion_mask(fg, lab, 0.5).mask.count_set() == 0);
    CHECK(cpbsp::build_motion_mask(fg, lab, 0.3).mask.count_set() == 100);  // >= comparison
}

TEST_CASE("masks are dimension-checked and parameter-checked", "[pipeline]") {
    const auto lab = single_region(8, 8);
    CHECK_THROWS_AS(cpbsp::build_motion_mask(BinaryMap(4, 4), lab, 0.1), cpbsp::GeometryError);
    CHECK_THROWS_AS(cpbsp::build_motion_mask(BinaryMap(8, 8), lab, 0.0), cpbsp::ParamError);
    CHECK_THROWS_AS(cpbsp::build_motion_mask(BinaryMap(8, 8), lab, 1.5), cpbsp::ParamError);
}

TEST_CASE("a tiny overlap fraction makes the mask a superset of the foreground", "[pipeline]") {
    std::mt19937 rng(73);
    const Frame f = testutil::random_gray(48, 36, rng);
    const auto lab = cpbsp::segment(f, cpbsp::SlicParams{});
    BinaryMap fg(48, 36);
    for (auto& v : fg.data) v = (rng() % 10) == 0 ? 1 : 0;
    const auto mask = cpbsp::build_motion_mask(fg, lab, 1.0 / (48.0 * 36.0 + 1.0));
    for (std::size_t i = 0; i < fg.data.size(); ++i) {
        if (fg.data[i]) CHECK(mask.mask.data[i] == 1);
    }
}

TEST_CASE("masks are constant within each region", "[pipeline]") {
    std::mt19937 rng(74);
    const Frame f = testutil::random_gray(48, 36, rng);
    const auto lab = cpbsp::segment(f, cpbsp::SlicParams{});
    BinaryMap fg(48, 36);
    for (auto& v : fg.data) v = (rng() % 4) == 0 ? 1 : 0;
    const auto mask = cpbsp::build_motion_mask(fg, lab, 0.3);
    std::vector<int> region_value(static_cast<std::size_t>(lab.region_count()), -1);
    for (std::size_t i = 0; i < mask.mask.data.size(); ++i) {
        auto& rv = region_value[static_cast<std::size_t>(lab.labels[i])];
        if (rv < 0) rv = mask.mask.data[i];
        CHECK(rv == mask.mask.data[i]);
    }
}

// ---------------------------------------------------------------------------
// generate_background
// ---------------------------------------------------------------------------

namespace {

struct TrainedFixture {
    FrameSequence seq;
    cpbsp::CpbModel model;

    explicit TrainedFixture(bool color, std::uint32_t seed = 75) {
        std::mt19937 rng(seed);
        const Frame base =
            color ? testutil::random_color(24, 16, rng) : testutil::random_gray(24, 16, rng);
        for (int t = 0; t < 6; ++t) seq.append(base);
        cpbsp::CpbParams params;
        params.train_frames = 6;
        params.support_count = 3;
        params.block_w = 8;
        params.block_h = 8;
        model = cpbsp::train(seq, params);
    }
};

}  // namespace

TEST_CASE("an all-zero mask passes the frame through bit-exactly", "[pipeline]") {
    TrainedFixture fx(false);
    std::mt19937 rng(76);
    const Frame frame = testutil::random_gray(24, 16, rng);
    MotionMask mask{0, BinaryMap(24, 16)};
    const Frame out = cpbsp::generate_background(fx.model, frame, mask, cpbsp::ImageMode::Gray);
    CHECK(out.gray == frame.gray);
}

TEST_CASE("an all-one mask returns the rounded model mean image", "[pipeline]") {
    TrainedFixture fx(false);
    MotionMask mask{0, BinaryMap(24, 16, 1)};
    const Frame out =
        cpbsp::generate_background(fx.model, fx.seq[0], mask, cpbsp::ImageMode::Gray);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 24; ++x) {
            const double mean = fx.model.pixel(x, y).mean_intensity;
            CHECK(out.at(x, y) == static_cast<std::uint8_t>(std::lround(mean)));
        }
    }
}

TEST_CASE("partial masks follow the piecewise definition, including color", "[pipeline]") {
    TrainedFixture fx(true);
    std::mt19937 rng(77);
    const Frame frame = testutil::random_color(24, 16, rng);
    MotionMask mask{0, BinaryMap(24, 16)};
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 12; ++x) mask.mask.at(x, y) = 1;  // left half replaced
    }
    const Frame out = cpbsp::generate_background(fx.model, frame, mask, cpbsp::ImageMode::Color);
    REQUIRE(out.has_color());
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 24; ++x) {
            const auto got = out.rgb_at(x, y);
            if (mask.mask.at(x, y)) {
                const auto& m = fx.model.pixel(x, y).mean_rgb;
                CHECK(got.r == static_cast<std::uint8_t>(std::lround(m[0])));
                CHECK(got.g == static_cast<std::uint8_t>(std::lround(m[1])));
                CHECK(got.b == static_cast<std::uint8_t>(std::lround(m[2])));
            } else {
                CHECK(got == frame.rgb_at(x, y));
            }
        }
    }
}

TEST_CASE("generate_background is idempotent", "[pipeline]") {
    TrainedFixture fx(false);
    std::mt19937 rng(78);
    const Frame frame = testutil::random_gray(24, 16, rng);
    MotionMask mask{0, BinaryMap(24, 16)};
    for (auto& v : mask.mask.data) v = (rng() & 1u) ? 1 : 0;
    const Frame once = cpbsp::generate_background(fx.model, frame, mask, cpbsp::ImageMode::Gray);
    const Frame twice = cpbsp::generate_background(fx.model, once, mask, cpbsp::ImageMode::Gray);
    CHECK(once == twice);
}

TEST_CASE("color mode without a color model or color frame is a ModeError", "[pipeline]") {
    TrainedFixture gray_fx(false);
    std::mt19937 rng(79);
    const Frame color_frame = testutil::random_color(24, 16, rng);
    MotionMask mask{0, BinaryMap(24, 16)};
    CHECK_THROWS_AS(
        cpbsp::generate_background(gray_fx.model, color_frame, mask, cpbsp::ImageMode::Color),
        cpbsp::ModeError);

    TrainedFixture color_fx(true);
    const Frame gray_frame(24, 16);
    CHECK_THROWS_AS(
        cpbsp::generate_background(color_fx.model, gray_frame, mask, cpbsp::ImageMode::Color),
        cpbsp::ModeError);
}

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

TEST_CASE("aggregation modes combine pixels as documented", "[pipeline]") {
    std::vector<Frame> frames{Frame(2, 1, 10), Frame(2, 1, 20), Frame(2, 1, 90)};
    CHECK(cpbsp::aggregate_frames(frames, Aggregate::Last).at(0, 0) == 90);
    CHECK(cpbsp::aggregate_frames(frames, Aggregate::Mean).at(0, 0) == 40);
    CHECK(cpbsp::aggregate_frames(frames, Aggregate::Median).at(0, 0) == 20);

    frames.push_back(Frame(2, 1, 40));
    CHECK(cpbsp::aggregate_frames(frames, Aggregate::Median).at(0, 0) == 30);  // (20+40)/2

    CHECK_THROWS_AS(cpbsp::aggregate_frames({}, Aggregate::Mean), cpbsp::NoFrames);
}

// ---------------------------------------------------------------------------
// run_pipeline
// ---------------------------------------------------------------------------

TEST_CASE("a static sequence reproduces itself", "[pipeline]") {
    cpbsp::SynthSpec spec;
    spec.width = 48;
    spec.height = 48;
    spec.frame_count = 30;
    spec.background = cpbsp::SynthBackground::Checker;
    const auto synth = cpbsp::synthesize(spec);

    cpbsp::PipelineConfig cfg;
    cfg.cpb.train_frames = 20;
    cfg.cpb.support_count = 10;
    const auto result = cpbsp::run_pipeline(synth.frames, cfg);
    CHECK(result.detect_indices.front() == 20);
    CHECK(result.detect_indices.size() == 10);
    CHECK(cpbsp::metrics::age(synth.ground_truth, result.background) < 1.0);
    for (std::size_t i = 0; i < result.background.pixel_count(); ++i) {
        CHECK(std::abs(static_cast<int>(result.background.gray[i]) -
                       static_cast<int>(synth.ground_truth.gray[i])) <= 1);
    }
}

TEST_CASE("detection falls back to the training window when nothing follows", "[pipeline]") {
    cpbsp::SynthSpec spec;
    spec.width = 32;
    spec.height = 32;
    spec.frame_count = 8;
    const auto synth = cpbsp::synthesize(spec);
    cpbsp::PipelineConfig cfg;
    cfg.cpb.train_frames = 8;
    cfg.cpb.support_count = 4;
    const auto result = cpbsp::run_pipeline(synth.frames, cfg);
    CHECK(result.detect_indices.size() == 8);
    CHECK(result.detect_indices.front() == 0);
}

TEST_CASE("a moving object after training is removed from the background", "[pipeline]") {
    cpbsp::SynthSpec spec;
    spec.width = 64;
    spec.height = 64;
    spec.frame_count = 40;
    spec.background = cpbsp::SynthBackground::Gradient;
    cpbsp::SynthObject obj;
    obj.x = 0;
    obj.y = 24;
    obj.width = 16;
    obj.height = 16;
    obj.intensity_offset = 120;
    obj.vel_x = 4.0;
    obj.active_from = 30;
    spec.object = obj;
    const auto synth = cpbsp::synthesize(spec);

    cpbsp::PipelineConfig cfg;
    cfg.cpb.train_frames = 30;
    cfg.cpb.support_count = 10;
    cfg.aggregate = Aggregate::Median;
    const auto result = cpbsp::run_pipeline(synth.frames, cfg);
    CHECK(cpbsp::metrics::age(synth.ground_truth, result.background) < 2.0);
}

TEST_CASE("short sequences fail with InsufficientTraining", "[pipeline]") {
    cpbsp::SynthSpec spec;
    spec.width = 16;
    spec.height = 16;
    spec.frame_count = 3;
    const auto synth = cpbsp::synthesize(spec);
    cpbsp::PipelineConfig cfg;  // train_frames default 100
    CHECK_THROWS_AS(cpbsp::run_pipeline(synth.frames, cfg), cpbsp::InsufficientTraining);
}

TEST_CASE("color sequences produce color backgrounds", "[pipeline]") {
    std::mt19937 rng(80);
    FrameSequence seq;
    const Frame base = testutil::random_color(32, 32, rng);
    for (int t = 0; t < 10; ++t) seq.append(base);
    cpbsp::PipelineConfig cfg;
    cfg.cpb.train_frames = 10;
    cfg.cpb.support_count = 5;
    const auto result = cpbsp::run_pipeline(seq, cfg);
    REQUIRE(result.background.has_color());
    CHECK(result.background.color == base.color);
}
