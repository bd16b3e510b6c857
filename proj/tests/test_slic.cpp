// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <queue>
#include <random>
#include <set>

#include "cpbsp/slic.hpp"
#include "test_support.hpp"

using cpbsp::Frame;
using cpbsp::Point;
using cpbsp::SlicParams;
using cpbsp::SuperpixelLabeling;

namespace {

// Naive full-search k-means in the same joint space: same seeding and
// distance, but every pixel checks every cluster. No connectivity pass.
std::vector<int> kmeans_oracle(const Frame& frame, int k, double compactness, int iters) {
    const int w = frame.width;
    const int h = frame.height;
    const int n = w * h;
    const double step = std::sqrt(static_cast<double>(n) / k);
    const int nx = std::max(1, static_cast<int>(std::lround(w / step)));
    const int ny = std::max(1, static_cast<int>(std::lround(h / step)));
    struct C {
        double x, y, i;
    };
    std::vector<C> centers;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            C c{(i + 0.5) * w / nx, (j + 0.5) * h / ny, 0.0};
            c.i = frame.at(std::clamp(static_cast<int>(c.x), 0, w - 1),
                           std::clamp(static_cast<int>(c.y), 0, h - 1));
            centers.push_back(c);
        }
    }
    const double sw = compactness * compactness / (step * step);
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    for (int iter = 0; iter < iters; ++iter) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double best = std::numeric_limits<double>::infinity();
                int best_c = 0;
                for (std::size_t c = 0; c < centers.size(); ++c) {
                    const double di = frame.at(x, y) - centers[c].i;
                    const double dx = x - centers[c].x;
                    const double dy = y - centers[c].y;
                    const double d = di * di + (dx * dx + dy * dy) * sw;
                    if (d < best) {
                        best = d;
                        best_c = static_cast<int>(c);
                    }
                }
                labels[static_cast<std::size_t>(y) * w + x] = best_c;
            }
        }
        std::vector<double> sx(centers.size(), 0), sy(centers.size(), 0), si(centers.size(), 0);
        std::vector<int> cnt(centers.size(), 0);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(y) * w + x]);
                sx[c] += x;
                sy[c] += y;
                si[c] += frame.at(x, y);
                ++cnt[c];
            }
        }
        for (std::size_t c = 0; c < centers.size(); ++c) {
            if (cnt[c] == 0) continue;
            centers[c] = C{sx[c] / cnt[c], sy[c] / cnt[c], si[c] / cnt[c]};
        }
    }
    return labels;
}

// 4-connected flood fill size from one seed within a single region.
int flood_size(const SuperpixelLabeling& lab, int sx, int sy) {
    const int w = lab.width;
    const int h = lab.height;
    const std::int32_t target = lab.label_at(sx, sy);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
    std::queue<std::pair<int, int>> q;
    q.emplace(sx, sy);
    seen[static_cast<std::size_t>(sy) * w + sx] = 1;
    int count = 0;
    while (!q.empty()) {
        const auto [x, y] = q.front();
        q.pop();
        ++count;
        const int dx[4] = {-1, 1, 0, 0};
        const int dy[4] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
            const int nx = x + dx[k];
            const int ny = y + dy[k];
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            const std::size_t i = static_cast<std::size_t>(ny) * w + nx;
            if (seen[i] || lab.label_at(nx, ny) != target) continue;
            seen[i] = 1;
            q.emplace(nx, ny);
        }
    }
    return count;
}

}  // namespace

TEST_CASE("uniform frame with k=16 tiles into near-equal regions", "[slic]") {
    const Frame f(64, 64, 128);
    SlicParams params;
    params.region_count = 16;
    const auto lab = cpbsp::segment(f, params);
    REQUIRE(lab.region_count() == 16);
    for (const auto& rs : lab.region_stats) {
        CHECK(rs.pixel_count >= 128);  // within +-50% of 4096/16 = 256
        CHECK(rs.pixel_count <= 384);
    }

    // independent naive full-search k-means settles on the same tiling sizes
    const auto oracle = kmeans_oracle(f, 16, params.compactness, params.max_iters);
    std::map<int, int> sizes;
    for (const int l : oracle) ++sizes[l];
    REQUIRE(sizes.size() == 16);
    for (const auto& [label, count] : sizes) {
        CHECK(count >= 128);
        CHECK(count <= 384);
    }
}

TEST_CASE("k=1 yields a single region covering the frame", "[slic]") {
    std::mt19937 rng(61);
    const Frame f = testutil::random_gray(32, 20, rng);
    SlicParams params;
    params.region_count = 1;
    const auto lab = cpbsp::segment(f, params);
    REQUIRE(lab.region_count() == 1);
    CHECK(lab.region_stats[0].pixel_count == 32 * 20);
}

TEST_CASE("regions adhere to a strong intensity boundary", "[slic]") {
    Frame f(64, 64);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) f.at(x, y) = x < 32 ? 0 : 255;
    }
    SlicParams params;
    params.region_count = 16;
    params.compactness = 10.0;
    const auto lab = cpbsp::segment(f, params);

    // no region may hold pixels on both sides outside a 2-pixel band at x=32
    for (int r = 0; r < lab.region_count(); ++r) {
        bool left = false;
        bool right = false;
        for (int y = 0; y < 64; ++y) {
            for (int x = 0; x < 64; ++x) {
                if (lab.label_at(x, y) != r) continue;
                if (x <= 29) left = true;
                if (x >= 34) right = true;
            }
        }
        CHECK_FALSE((left && right));
    }
}

TEST_CASE("labels partition the frame and ids are dense", "[slic]") {
    std::mt19937 rng(62);
    for (int trial = 0; trial < 5; ++trial) {
        const Frame f = testutil::random_gray(48, 36, rng);
        const auto lab = cpbsp::segment(f, SlicParams{});
        int total = 0;
        for (const auto& rs : lab.region_stats) {
            CHECK(rs.pixel_count > 0);
            total += rs.pixel_count;
        }
        CHECK(total == 48 * 36);
        for (const auto l : lab.labels) {
            CHECK(l >= 0);
            CHECK(l < lab.region_count());
        }
    }
}

TEST_CASE("every region is 4-connected after enforcement", "[slic]") {
    std::mt19937 rng(63);
    for (int trial = 0; trial < 5; ++trial) {
        const Frame f = testutil::random_gray(64, 64, rng);
        const auto lab = cpbsp::segment(f, SlicParams{});
        std::vector<std::uint8_t> checked(static_cast<std::size_t>(lab.region_count()), 0);
        for (int y = 0; y < 64; ++y) {
            for (int x = 0; x < 64; ++x) {
                const auto l = static_cast<std::size_t>(lab.label_at(x, y));
                if (checked[l]) continue;
                checked[l] = 1;
                CHECK(flood_size(lab, x, y) == lab.region_stats[l].pixel_count);
            }
        }
    }
}

TEST_CASE("the assignment objective is non-increasing across iterations", "[slic]") {
    std::mt19937 rng(64);
    for (int trial = 0; trial < 10; ++trial) {
        const Frame f = testutil::random_gray(64, 64, rng);
        cpbsp::SlicTrace trace;
        cpbsp::segment(f, SlicParams{}, &trace);
        REQUIRE(trace.iterations >= 1);
        for (std::size_t i = 1; i < trace.objective.size(); ++i) {
            CHECK(trace.objective[i] <= trace.objective[i - 1] + 1e-9);
        }
    }
}

TEST_CASE("segmentation is deterministic", "[slic]") {
    std::mt19937 rng(65);
    const Frame f = testutil::random_gray(48, 48, rng);
    const auto a = cpbsp::segment(f, SlicParams{});
    const auto b = cpbsp::segment(f, SlicParams{});
    CHECK(a.labels == b.labels);
}

TEST_CASE("oversized region counts are rejected", "[slic]") {
    SlicParams params;
    params.region_count = 10 * 10 + 1;
    CHECK_THROWS_AS(cpbsp::segment(Frame(10, 10), params), cpbsp::ParamError);
}

TEST_CASE("regions_touching equals a brute-force scan", "[slic]") {
    std::mt19937 rng(66);
    const Frame f = testutil::random_gray(40, 30, rng);
    const auto lab = cpbsp::segment(f, SlicParams{});

    CHECK(cpbsp::regions_touching(lab, {}).empty());

    // all pixels from one region -> singleton
    std::vector<Point> inside;
    for (int y = 0; y < 30 && inside.size() < 4; ++y) {
        for (int x = 0; x < 40 && inside.size() < 4; ++x) {
            if (lab.label_at(x, y) == 0) inside.push_back(Point{x, y});
        }
    }
    CHECK(cpbsp::regions_touching(lab, inside) == std::set<std::int32_t>{0});

    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Point> pts;
        for (int i = 0; i < 25; ++i) {
            pts.push_back(Point{static_cast<int>(rng() % 40), static_cast<int>(rng() % 30)});
        }
        std::set<std::int32_t> expected;
        for (const auto& p : pts) expected.insert(lab.label_at(p.x, p.y));
        CHECK(cpbsp::regions_touching(lab, pts) == expected);
    }

    CHECK_THROWS_AS(cpbsp::regions_touching(lab, {{Point{40, 0}}}), cpbsp::BoundsError);
    CHECK_THROWS_AS(cpbsp::regions_touching(lab, {{Point{0, -1}}}), cpbsp::BoundsError);
}

TEST_CASE("debug renderings have the right shape", "[slic]") {
    std::mt19937 rng(67);
    const Frame f = testutil::random_gray(32, 24, rng);
    const auto lab = cpbsp::segment(f, SlicParams{});
    const Frame colors = cpbsp::label_visualization(lab);
    CHECK(colors.has_color());
    CHECK(colors.width == 32);
    const Frame overlay = cpbsp::boundary_overlay(f, lab);
    CHECK(overlay.has_color());
    // some boundary pixels exist and are red
    bool found_red = false;
    for (int y = 0; y < 24 && !found_red; ++y) {
        for (int x = 0; x < 32 && !found_red; ++x) {
            const auto c = overlay.rgb_at(x, y);
            found_red = c.r == 255 && c.g == 0 && c.b == 0;
        }
    }
    CHECK(found_red);
}
