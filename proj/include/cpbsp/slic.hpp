// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0
//
// SLIC superpixels: grid-seeded, locality-restricted k-means in joint
// intensity-position space, followed by connectivity enforcement. Grayscale
// distance only; color frames are segmented on their luma plane.

#ifndef CPBSP_SLIC_HPP
#define CPBSP_SLIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "cpbsp/image.hpp"

namespace cpbsp {

struct SlicParams {
    int region_count = 0;          // desired superpixels k; 0 derives from region_size
    int region_size = 8;           // target region side in pixels (used when region_count == 0)
    double compactness = 10.0;     // spatial-vs-intensity weight m
    int max_iters = 10;
    double min_region_frac = 0.25; // regions below this fraction of the average size get merged

    void validate() const {
        if (region_count < 0) throw ParamError("region_count must be >= 0");
        if (region_size < 1) throw ParamError("region_size must be >= 1");
        if (!(compactness > 0.0)) throw ParamError("compactness must be > 0");
        if (max_iters < 1) throw ParamError("max_iters must be >= 1");
        if (!(min_region_frac > 0.0) || !(min_region_frac < 1.0)) {
            throw ParamError("min_region_frac must be in (0,1)");
        }
    }

    int effective_region_count(int pixel_count) const {
        if (region_count > 0) return region_count;
        return (pixel_count + region_size * region_size - 1) / (region_size * region_size);
    }
};

struct RegionStats {
    int pixel_count = 0;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    double mean_intensity = 0.0;
};

struct SuperpixelLabeling {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;       // region id per pixel, dense 0..R-1
    std::vector<RegionStats> region_stats;  // one entry per region id

    int region_count() const { return static_cast<int>(region_stats.size()); }
    std::int32_t label_at(int x, int y) const {
        return labels[static_cast<std::size_t>(y) * width + x];
    }
};

/// Per-iteration diagnostics: the k-means objective (sum of squared joint
/// distances) recorded after each assignment pass.
struct SlicTrace {
    std::vector<double> objective;
    int iterations = 0;
};

namespace detail {

struct SlicCenter {
    double x = 0.0;
    double y = 0.0;
    double intensity = 0.0;
};

// Relabels stray (non-dominant) connected components of each label to the
// dominant adjacent label, smallest strays first. A stray only merges into
// pixels that are already final (dominant components or previously merged
// strays); that keeps every label's pixel set connected as it grows.
inline void enforce_connectivity(std::vector<std::int32_t>& labels, int w, int h) {
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<std::int32_t> comp(n, -1);
    struct Component {
        std::int32_t label;
        std::vector<int> pixels;  // linear indices, in discovery (scan) order
    };
    std::vector<Component> comps;
    std::vector<int> stack;

    for (std::size_t start = 0; start < n; ++start) {
        if (comp[start] != -1) continue;
        const std::int32_t label = labels[start];
        const auto id = static_cast<std::int32_t>(comps.size());
        comps.push_back(Component{label, {}});
        stack.push_back(static_cast<int>(start));
        comp[start] = id;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            comps[static_cast<std::size_t>(id)].pixels.push_back(i);
            const int x = i % w;
            const int y = i / w;
            const int neighbors[4] = {x > 0 ? i - 1 : -1, x + 1 < w ? i + 1 : -1,
                                      y > 0 ? i - w : -1, y + 1 < h ? i + w : -1};
            for (const int nb : neighbors) {
                if (nb >= 0 && comp[static_cast<std::size_t>(nb)] == -1 &&
                    labels[static_cast<std::size_t>(nb)] == label) {
                    comp[static_cast<std::size_t>(nb)] = id;
                    stack.push_back(nb);
                }
            }
        }
    }

    // dominant component per label = the largest one (ties: first seen)
    std::map<std::int32_t, std::size_t> dominant;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const auto it = dominant.find(comps[c].label);
        if (it == dominant.end() || comps[c].pixels.size() > comps[it->second].pixels.size()) {
            dominant[comps[c].label] = c;
        }
    }

    std::vector<std::uint8_t> final_px(n, 0);
    std::vector<std::size_t> pending;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        if (dominant[comps[c].label] == c) {
            for (const int i : comps[c].pixels) final_px[static_cast<std::size_t>(i)] = 1;
        } else {
            pending.push_back(c);
        }
    }
    std::sort(pending.begin(), pending.end(), [&](std::size_t a, std::size_t b) {
        if (comps[a].pixels.size() != comps[b].pixels.size()) {
            return comps[a].pixels.size() < comps[b].pixels.size();
        }
        return comps[a].pixels.front() < comps[b].pixels.front();
    });

    // Every pass merges at least the strays on the boundary of the stray
    // union, so this terminates within |pending| passes.
    while (!pending.empty()) {
        bool progressed = false;
        std::vector<std::size_t> deferred;
        for (const std::size_t c : pending) {
            std::map<std::int32_t, int> adjacency;  // label -> shared boundary, final pixels only
            for (const int i : comps[c].pixels) {
                const int x = i % w;
                const int y = i / w;
                const int neighbors[4] = {x > 0 ? i - 1 : -1, x + 1 < w ? i + 1 : -1,
                                          y > 0 ? i - w : -1, y + 1 < h ? i + w : -1};
                for (const int nb : neighbors) {
                    if (nb >= 0 && final_px[static_cast<std::size_t>(nb)]) {
                        ++adjacency[labels[static_cast<std::size_t>(nb)]];
                    }
                }
            }
            if (adjacency.empty()) {
                deferred.push_back(c);  // surrounded by other strays; retry next pass
                continue;
            }
            std::int32_t best = adjacency.begin()->first;
            int best_count = adjacency.begin()->second;
            for (const auto& [label, count] : adjacency) {
                if (count > best_count) {
                    best = label;
                    best_count = count;
                }
            }
            for (const int i : comps[c].pixels) {
                labels[static_cast<std::size_t>(i)] = best;
                final_px[static_cast<std::size_t>(i)] = 1;
            }
            progressed = true;
        }
        if (!progressed) break;  // degenerate map with no dominant pixels at all
        pending = std::move(deferred);
    }
}

// Merges undersized regions (below frac * average size) into their largest
// adjacent region, smallest region first. Threshold is fixed up front.
inline void merge_small_regions(std::vector<std::int32_t>& labels, int w, int h, double frac) {
    const std::size_t n = static_cast<std::size_t>(w) * h;
    auto region_sizes = [&] {
        std::map<std::int32_t, int> sizes;
        for (const auto l : labels) ++sizes[l];
        return sizes;
    };
    const auto initial = region_sizes();
    const double threshold = frac * static_cast<double>(n) / static_cast<double>(initial.size());

    for (;;) {
        const auto sizes = region_sizes();
        std::int32_t victim = -1;
        int victim_size = std::numeric_limits<int>::max();
        for (const auto& [label, size] : sizes) {
            if (size < threshold && size < victim_size) {
                victim = label;
                victim_size = size;
            }
        }
        if (victim < 0 || sizes.size() <= 1) break;

        std::set<std::int32_t> adjacent;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] != victim) continue;
            const int x = static_cast<int>(i) % w;
            const int y = static_cast<int>(i) / w;
            if (x > 0 && labels[i - 1] != victim) adjacent.insert(labels[i - 1]);
            if (x + 1 < w && labels[i + 1] != victim) adjacent.insert(labels[i + 1]);
            if (y > 0 && labels[i - w] != victim) adjacent.insert(labels[i - w]);
            if (y + 1 < h && labels[i + w] != victim) adjacent.insert(labels[i + w]);
        }
        if (adjacent.empty()) break;
        std::int32_t target = *adjacent.begin();
        for (const auto candidate : adjacent) {
            if (sizes.at(candidate) > sizes.at(target)) target = candidate;
        }
        for (auto& l : labels) {
            if (l == victim) l = target;
        }
    }
}

}  // namespace detail

/// Segments a frame into superpixels. Deterministic: fixed seed grid,
/// clusters visited in id order, equal distances resolved toward the lower
/// region id. Iteration stops at max_iters or when total center movement
/// drops below 0.5 px.
inline SuperpixelLabeling segment(const Frame& frame, const SlicParams& params,
                                  SlicTrace* trace = nullptr) {
    params.validate();
    const int w = frame.width;
    const int h = frame.height;
    const int n = w * h;
    if (n <= 0) throw ParamError("empty frame");
    const int k = params.effective_region_count(n);
    if (k > n) throw ParamError("region_count exceeds pixel count");

    const double grid_step = std::sqrt(static_cast<double>(n) / k);
    const int nx = std::max(1, static_cast<int>(std::lround(w / grid_step)));
    const int ny = std::max(1, static_cast<int>(std::lround(h / grid_step)));
    const int clusters = nx * ny;

    std::vector<detail::SlicCenter> centers(static_cast<std::size_t>(clusters));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            auto& c = centers[static_cast<std::size_t>(j) * nx + i];
            c.x = (i + 0.5) * w / nx;
            c.y = (j + 0.5) * h / ny;
            const int sx = std::clamp(static_cast<int>(c.x), 0, w - 1);
            const int sy = std::clamp(static_cast<int>(c.y), 0, h - 1);
            c.intensity = frame.at(sx, sy);
        }
    }

    const double spatial_weight =
        (params.compactness * params.compactness) / (grid_step * grid_step);
    std::vector<std::int32_t> labels(static_cast<std::size_t>(n), -1);
    std::vector<double> best(static_cast<std::size_t>(n));

    auto joint_dist2 = [&](int x, int y, const detail::SlicCenter& c) {
        const double di = frame.at(x, y) - c.intensity;
        const double dx = x - c.x;
        const double dy = y - c.y;
        return di * di + (dx * dx + dy * dy) * spatial_weight;
    };

    if (trace) {
        trace->objective.clear();
        trace->iterations = 0;
    }

    for (int iter = 0; iter < params.max_iters; ++iter) {
        // assignment: incumbent label (against moved centers) is the baseline
        if (iter == 0) {
            std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
        } else {
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    const std::size_t i = static_cast<std::size_t>(y) * w + x;
                    best[i] = joint_dist2(x, y, centers[static_cast<std::size_t>(labels[i])]);
                }
            }
        }
        for (std::int32_t c = 0; c < clusters; ++c) {
            const auto& center = centers[static_cast<std::size_t>(c)];
            const int x0 = std::max(0, static_cast<int>(std::floor(center.x - grid_step)));
            const int x1 = std::min(w - 1, static_cast<int>(std::ceil(center.x + grid_step)));
            const int y0 = std::max(0, static_cast<int>(std::floor(center.y - grid_step)));
            const int y1 = std::min(h - 1, static_cast<int>(std::ceil(center.y + grid_step)));
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    const std::size_t i = static_cast<std::size_t>(y) * w + x;
                    const double d = joint_dist2(x, y, center);
                    if (d < best[i] || (d == best[i] && c < labels[i])) {
                        best[i] = d;
                        labels[i] = c;
                    }
                }
            }
        }
        // windowed search leaves no pixel unassigned (every pixel sits within
        // grid_step of its nearest seed), but stay safe against degenerate
        // geometry: fall back to a full scan for any straggler.
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                if (labels[i] >= 0) continue;
                for (std::int32_t c = 0; c < clusters; ++c) {
                    const double d = joint_dist2(x, y, centers[static_cast<std::size_t>(c)]);
                    if (labels[i] < 0 || d < best[i]) {
                        best[i] = d;
                        labels[i] = c;
                    }
                }
            }
        }
        if (trace) {
            double objective = 0.0;
            for (const double d : best) objective += d;
            trace->objective.push_back(objective);
            trace->iterations = iter + 1;
        }

        // update: centers move to the mean of their pixels
        std::vector<double> sx(static_cast<std::size_t>(clusters), 0.0);
        std::vector<double> sy(static_cast<std::size_t>(clusters), 0.0);
        std::vector<double> si(static_cast<std::size_t>(clusters), 0.0);
        std::vector<int> count(static_cast<std::size_t>(clusters), 0);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(y) * w + x]);
                sx[c] += x;
                sy[c] += y;
                si[c] += frame.at(x, y);
                ++count[c];
            }
        }
        double movement = 0.0;
        for (int c = 0; c < clusters; ++c) {
            if (count[static_cast<std::size_t>(c)] == 0) continue;  // empty cluster keeps its center
            auto& center = centers[static_cast<std::size_t>(c)];
            const double inv = 1.0 / count[static_cast<std::size_t>(c)];
            const double nx_pos = sx[static_cast<std::size_t>(c)] * inv;
            const double ny_pos = sy[static_cast<std::size_t>(c)] * inv;
            movement += std::hypot(nx_pos - center.x, ny_pos - center.y);
            center.x = nx_pos;
            center.y = ny_pos;
            center.intensity = si[static_cast<std::size_t>(c)] * inv;
        }
        if (movement < 0.5) break;
    }

    detail::enforce_connectivity(labels, w, h);
    detail::merge_small_regions(labels, w, h, params.min_region_frac);

    // dense relabel in scan order of first appearance
    SuperpixelLabeling out;
    out.width = w;
    out.height = h;
    out.labels.resize(static_cast<std::size_t>(n));
    std::map<std::int32_t, std::int32_t> remap;
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
        const auto [it, inserted] =
            remap.try_emplace(labels[i], static_cast<std::int32_t>(remap.size()));
        out.labels[i] = it->second;
    }
    out.region_stats.resize(remap.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto& rs = out.region_stats[static_cast<std::size_t>(out.label_at(x, y))];
            ++rs.pixel_count;
            rs.centroid_x += x;
            rs.centroid_y += y;
            rs.mean_intensity += frame.at(x, y);
        }
    }
    for (auto& rs : out.region_stats) {
        rs.centroid_x /= rs.pixel_count;
        rs.centroid_y /= rs.pixel_count;
        rs.mean_intensity /= rs.pixel_count;
    }
    return out;
}

/// The set of region ids containing any of the given pixels.
inline std::set<std::int32_t> regions_touching(const SuperpixelLabeling& labeling,
                                               std::span<const Point> pixels) {
    std::set<std::int32_t> out;
    for (const auto& p : pixels) {
        if (p.x < 0 || p.x >= labeling.width || p.y < 0 || p.y >= labeling.height) {
            throw BoundsError("pixel (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                              ") outside labeling");
        }
        out.insert(labeling.label_at(p.x, p.y));
    }
    return out;
}

// ----------------------------------------------------------------------------
// Debug rendering
// ----------------------------------------------------------------------------

/// False-color rendering of the label map (golden-angle hue stepping).
inline Frame label_visualization(const SuperpixelLabeling& labeling) {
    Frame out(labeling.width, labeling.height);
    out.enable_color();
    auto hue_rgb = [](double hue) {
        const double h6 = hue * 6.0;
        const int sector = static_cast<int>(h6) % 6;
        const double f = h6 - std::floor(h6);
        const auto q = static_cast<std::uint8_t>(255 * (1.0 - f));
        const auto t = static_cast<std::uint8_t>(255 * f);
        switch (sector) {
            case 0: return Rgb{255, t, 0};
            case 1: return Rgb{q, 255, 0};
            case 2: return Rgb{0, 255, t};
            case 3: return Rgb{0, q, 255};
            case 4: return Rgb{t, 0, 255};
            default: return Rgb{255, 0, q};
        }
    };
    for (int y = 0; y < labeling.height; ++y) {
        for (int x = 0; x < labeling.width; ++x) {
            const double hue = std::fmod(0.61803398875 * labeling.label_at(x, y), 1.0);
            out.set_rgb(x, y, hue_rgb(hue));
        }
    }
    out.derive_gray();
    return out;
}

/// The source frame with region boundaries marked in red.
inline Frame boundary_overlay(const Frame& frame, const SuperpixelLabeling& labeling) {
    if (frame.width != labeling.width || frame.height != labeling.height) {
        throw GeometryError("frame and labeling dimensions differ");
    }
    Frame out(frame.width, frame.height);
    out.enable_color();
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            const auto l = labeling.label_at(x, y);
            const bool boundary = (x + 1 < frame.width && labeling.label_at(x + 1, y) != l) ||
                                  (y + 1 < frame.height && labeling.label_at(x, y + 1) != l);
            if (boundary) {
                out.set_rgb(x, y, Rgb{255, 0, 0});
            } else if (frame.has_color()) {
                out.set_rgb(x, y, frame.rgb_at(x, y));
            } else {
                const auto g = frame.at(x, y);
                out.set_rgb(x, y, Rgb{g, g, g});
            }
        }
    }
    out.derive_gray();
    return out;
}

}  // namespace cpbsp

#endif  // CPBSP_SLIC_HPP
