// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cpbsp/synth.hpp"

using cpbsp::Frame;
using cpbsp::SynthBackground;
using cpbsp::SynthObject;
using cpbsp::SynthSpec;

TEST_CASE("a quiet spec reproduces the ground truth in every frame", "[synth]") {
    SynthSpec spec;
    spec.width = 40;
    spec.height = 30;
    spec.frame_count = 12;
    spec.background = SynthBackground::TexturedNoise;
    spec.seed = 3;
    const auto result = cpbsp::synthesize(spec);
    REQUIRE(result.frames.size() == 12);
    for (const auto& f : result.frames.frames) CHECK(f == result.ground_truth);
}

TEST_CASE("the object changes exactly its rectangle during active frames", "[synth]") {
    SynthSpec spec;
    spec.width = 48;
    spec.height = 32;
    spec.frame_count = 10;
    spec.background = SynthBackground::Checker;
    SynthObject obj;
    obj.x = 4;
    obj.y = 8;
    obj.width = 12;
    obj.height = 10;
    obj.intensity_offset = 120;
    obj.vel_x = 2.0;
    obj.active_from = 3;
    obj.active_to = 7;
    spec.object = obj;
    const auto result = cpbsp::synthesize(spec);

    for (int t = 0; t < 10; ++t) {
        const auto rect = spec.object_rect_at(t);
        const bool active = t >= 3 && t <= 7;
        for (int y = 0; y < 32; ++y) {
            for (int x = 0; x < 48; ++x) {
                const bool inside =
                    active && x >= rect.x0 && x < rect.x1 && y >= rect.y0 && y < rect.y1;
                const auto frame_px = result.frames[static_cast<std::size_t>(t)].at(x, y);
                const auto gt_px = result.ground_truth.at(x, y);
                if (inside) {
                    CHECK(frame_px != gt_px);
                } else {
                    CHECK(frame_px == gt_px);
                }
            }
        }
    }
}

TEST_CASE("the gain ramp follows clamp(round(gt * g(t)))", "[synth]") {
    SynthSpec spec;
    spec.width = 32;
    spec.height = 24;
    spec.frame_count = 100;
    spec.background = SynthBackground::Gradient;
    spec.gain_slope = 0.001;
    const auto result = cpbsp::synthesize(spec);
    const auto& last = result.frames[99];
    for (int y = 0; y < 24; ++y) {
        for (int x = 0; x < 32; ++x) {
            const long expect = std::lround(result.ground_truth.at(x, y) * 1.099);
            CHECK(last.at(x, y) == static_cast<std::uint8_t>(std::clamp(expect, 0L, 255L)));
        }
    }
}

TEST_CASE("synthesis is deterministic in the seed", "[synth]") {
    SynthSpec spec;
    spec.width = 24;
    spec.height = 24;
    spec.frame_count = 6;
    spec.background = SynthBackground::TexturedNoise;
    spec.jitter_amplitude = 2;
    spec.seed = 99;
    const auto a = cpbsp::synthesize(spec);
    const auto b = cpbsp::synthesize(spec);
    REQUIRE(a.frames.size() == b.frames.size());
    for (std::size_t t = 0; t < a.frames.size(); ++t) CHECK(a.frames[t] == b.frames[t]);

    spec.seed = 100;
    const auto c = cpbsp::synthesize(spec);
    bool any_diff = false;
    for (std::size_t t = 0; t < a.frames.size() && !any_diff; ++t) {
        any_diff = !(a.frames[t] == c.frames[t]);
    }
    CHECK(any_diff);
}

TEST_CASE("jittered frames are clamped translates of the clean frame", "[synth]") {
    SynthSpec spec;
    spec.width = 32;
    spec.height = 32;
    spec.frame_count = 8;
    spec.background = SynthBackground::Gradient;
    spec.jitter_amplitude = 3;
    spec.seed = 5;
    const auto jittered = cpbsp::synthesize(spec);

    SynthSpec calm = spec;
    calm.jitter_amplitude = 0;
    const auto clean = cpbsp::synthesize(calm);

    auto translate = [&](const Frame& src, int jx, int jy) {
        Frame out(src.width, src.height);
        for (int y = 0; y < src.height; ++y) {
            for (int x = 0; x < src.width; ++x) {
                out.at(x, y) = src.at(std::clamp(x - jx, 0, src.width - 1),
                                      std::clamp(y - jy, 0, src.height - 1));
            }
        }
        return out;
    };

    for (std::size_t t = 0; t < jittered.frames.size(); ++t) {
        bool matched = false;
        for (int jy = -3; jy <= 3 && !matched; ++jy) {
            for (int jx = -3; jx <= 3 && !matched; ++jx) {
                matched = translate(clean.frames[t], jx, jy) == jittered.frames[t];
            }
        }
        CHECK(matched);
    }
}

TEST_CASE("invalid specs are rejected", "[synth]") {
    SynthSpec spec;
    spec.frame_count = 0;
    CHECK_THROWS_AS(cpbsp::synthesize(spec), cpbsp::SpecError);

    SynthSpec escape;
    escape.width = 32;
    escape.height = 32;
    escape.frame_count = 20;
    SynthObject obj;
    obj.x = 20;
    obj.y = 10;
    obj.width = 10;
    obj.height = 10;
    obj.vel_x = 3.0;  // walks off the right edge
    escape.object = obj;
    CHECK_THROWS_AS(cpbsp::synthesize(escape), cpbsp::SpecError);

    SynthSpec dark;
    dark.frame_count = 100;
    dark.gain_slope = -0.02;  // gain hits zero mid-sequence
    CHECK_THROWS_AS(cpbsp::synthesize(dark), cpbsp::SpecError);
}
