// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0
//
// Co-occurrence pixel-block background model: every pixel is tied to the K
// image blocks whose mean-intensity series correlates best with the pixel's
// own series over a training window; each pair carries a Gaussian model of
// the intensity difference, and detection is a consistency vote over pairs.

#ifndef CPBSP_CPB_HPP
#define CPBSP_CPB_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "cpbsp/image.hpp"

namespace cpbsp {

// ----------------------------------------------------------------------------
// Parameters
// ----------------------------------------------------------------------------

struct CpbParams {
    int support_count = 20;   // K supporting blocks per pixel
    double eta = 2.5;         // Gaussian gate multiplier
    double lambda = 0.5;      // background vote threshold in [0,1]
    int block_w = 8;
    int block_h = 8;
    int train_frames = 100;   // T
    double sigma_floor = 1.0; // minimum gate width in gray levels
    int pool_radius = 0;      // candidate window in blocks; 0 = whole frame

    void validate() const {
        if (support_count < 1) throw ParamError("support_count must be >= 1");
        if (!(eta > 0.0)) throw ParamError("eta must be > 0");
        if (lambda < 0.0 || lambda > 1.0) throw ParamError("lambda must be in [0,1]");
        if (block_w < 1 || block_h < 1) throw ParamError("block dimensions must be >= 1");
        if (train_frames < 2) throw ParamError("train_frames must be >= 2");
        if (sigma_floor < 0.0) throw ParamError("sigma_floor must be >= 0");
        if (pool_radius < 0) throw ParamError("pool_radius must be >= 0");
    }
};

// ----------------------------------------------------------------------------
// Block grid
// ----------------------------------------------------------------------------

/// Partition of a frame into blocks. Residual edge pixels (when the frame
/// dimension is not divisible by the block size) fold into the last block
/// of each axis, so every pixel belongs to exactly one block.
struct BlockGeometry {
    int width = 0;
    int height = 0;
    int block_w = 0;
    int block_h = 0;
    int cols = 0;
    int rows = 0;

    static BlockGeometry for_frame(int width, int height, int block_w, int block_h) {
        if (block_w > width || block_h > height) {
            throw GeometryError("block size exceeds frame size");
        }
        BlockGeometry g;
        g.width = width;
        g.height = height;
        g.block_w = block_w;
        g.block_h = block_h;
        g.cols = width / block_w;
        g.rows = height / block_h;
        return g;
    }

    int block_count() const { return cols * rows; }
    int col_of(int x) const { return std::min(x / block_w, cols - 1); }
    int row_of(int y) const { return std::min(y / block_h, rows - 1); }

    // pixel extent of block column c / row r, residuals folded into the last one
    int x_begin(int c) const { return c * block_w; }
    int x_end(int c) const { return c + 1 == cols ? width : (c + 1) * block_w; }
    int y_begin(int r) const { return r * block_h; }
    int y_end(int r) const { return r + 1 == rows ? height : (r + 1) * block_h; }
};

inline bool operator==(const BlockGeometry& a, const BlockGeometry& b) {
    return a.width == b.width && a.height == b.height && a.block_w == b.block_w &&
           a.block_h == b.block_h && a.cols == b.cols && a.rows == b.rows;
}

/// Per-frame block mean intensities over a sequence prefix.
struct BlockGrid {
    BlockGeometry geom;
    int frame_count = 0;
    std::vector<double> means;  // [t * geom.block_count() + r * cols + c]

    double at(int t, int r, int c) const {
        return means[static_cast<std::size_t>(t) * geom.block_count() + r * geom.cols + c];
    }
    std::span<const double> frame_means(int t) const {
        return {means.data() + static_cast<std::size_t>(t) * geom.block_count(),
                static_cast<std::size_t>(geom.block_count())};
    }
};

/// Mean gray intensity of every block of one frame, row-major over blocks.
inline std::vector<double> frame_block_means(const Frame& frame, const BlockGeometry& geom) {
    if (frame.width != geom.width || frame.height != geom.height) {
        throw GeometryError("frame dimensions do not match block geometry");
    }
    std::vector<double> out(static_cast<std::size_t>(geom.block_count()));
    for (int r = 0; r < geom.rows; ++r) {
        for (int c = 0; c < geom.cols; ++c) {
            double sum = 0.0;
            int n = 0;
            for (int y = geom.y_begin(r); y < geom.y_end(r); ++y) {
                for (int x = geom.x_begin(c); x < geom.x_end(c); ++x) {
                    sum += frame.at(x, y);
                    ++n;
                }
            }
            out[static_cast<std::size_t>(r) * geom.cols + c] = sum / n;
        }
    }
    return out;
}

/// Block means for the first `frame_limit` frames (0 = all frames).
inline BlockGrid compute_block_means(const FrameSequence& seq, int block_w, int block_h,
                                     int frame_limit = 0) {
    if (seq.empty()) throw NoFrames("empty sequence");
    BlockGrid grid;
    grid.geom = BlockGeometry::for_frame(seq.width(), seq.height(), block_w, block_h);
    grid.frame_count = frame_limit > 0 ? std::min<int>(frame_limit, static_cast<int>(seq.size()))
                                       : static_cast<int>(seq.size());
    grid.means.resize(static_cast<std::size_t>(grid.frame_count) * grid.geom.block_count());
    detail::parallel_for(0, grid.frame_count, [&](int t) {
        const auto frame_means = frame_block_means(seq[static_cast<std::size_t>(t)], grid.geom);
        std::copy(frame_means.begin(), frame_means.end(),
                  grid.means.begin() + static_cast<std::size_t>(t) * grid.geom.block_count());
    });
    return grid;
}

// ----------------------------------------------------------------------------
// Correlation and support selection
// ----------------------------------------------------------------------------

/// Pearson product-moment correlation over population moments. A constant
/// series has undefined correlation; the sentinel 0 is returned (ranking
/// code treats such candidates separately).
inline double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ParamError("series lengths differ");
    if (xs.size() < 2) throw ParamError("correlation needs at least two samples");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// One ranked candidate block. `degenerate` marks pairs whose correlation
/// is undefined (constant pixel or block series); those rank below every
/// finite correlation and carry the sentinel value 0.
struct SupportCandidate {
    int u = 0;  // block column
    int v = 0;  // block row
    double corr = 0.0;
    bool degenerate = false;
};

namespace detail {

// Centered per-block mean series, the reusable half of the correlation.
struct BlockSeriesStats {
    int frame_count = 0;
    int blocks = 0;
    std::vector<double> mean;      // per block
    std::vector<double> centered;  // block-major: [j * frame_count + t]
    std::vector<double> norm;      // sqrt(sum of squared deviations)

    static BlockSeriesStats build(const BlockGrid& grid) {
        BlockSeriesStats s;
        s.frame_count = grid.frame_count;
        s.blocks = grid.geom.block_count();
        s.mean.resize(static_cast<std::size_t>(s.blocks));
        s.centered.resize(static_cast<std::size_t>(s.blocks) * s.frame_count);
        s.norm.resize(static_cast<std::size_t>(s.blocks));
        for (int j = 0; j < s.blocks; ++j) {
            double m = 0.0;
            for (int t = 0; t < s.frame_count; ++t) {
                m += grid.means[static_cast<std::size_t>(t) * s.blocks + j];
            }
            m /= s.frame_count;
            double ss = 0.0;
            double* cj = s.centered.data() + static_cast<std::size_t>(j) * s.frame_count;
            for (int t = 0; t < s.frame_count; ++t) {
                const double d = grid.means[static_cast<std::size_t>(t) * s.blocks + j] - m;
                cj[t] = d;
                ss += d * d;
            }
            s.mean[static_cast<std::size_t>(j)] = m;
            s.norm[static_cast<std::size_t>(j)] = std::sqrt(ss);
        }
        return s;
    }
};

struct RankedCandidate {
    double corr = 0.0;
    int j = 0;
    bool eligible = false;
};

// Ranking order: finite correlations first (descending), degenerates last,
// ties broken by block scan order (v ascending, then u ascending).
inline bool candidate_better(const RankedCandidate& a, const RankedCandidate& b) {
    if (a.eligible != b.eligible) return a.eligible;
    if (a.corr != b.corr) return a.corr > b.corr;
    return a.j < b.j;
}

inline void keep_top_k(std::vector<RankedCandidate>& cands, int k) {
    if (static_cast<int>(cands.size()) > k) {
        std::partial_sort(cands.begin(), cands.begin() + k, cands.end(), candidate_better);
        cands.resize(static_cast<std::size_t>(k));
    } else {
        std::sort(cands.begin(), cands.end(), candidate_better);
    }
}

// Centers `series` into `centered` and returns the deviation norm.
inline double center_series(std::span<const double> series, std::vector<double>& centered) {
    const double n = static_cast<double>(series.size());
    double mean = 0.0;
    for (const double v : series) mean += v;
    mean /= n;
    centered.resize(series.size());
    double ss = 0.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        const double d = series[t] - mean;
        centered[t] = d;
        ss += d * d;
    }
    return std::sqrt(ss);
}

}  // namespace detail

/// Ranks every block of the grid by correlation with the pixel series and
/// returns the best K (all candidates when fewer exist). Deterministic
/// total order; see SupportCandidate for the degenerate-series rule.
inline std::vector<SupportCandidate> select_supporting_blocks(std::span<const double> pixel_series,
                                                              const BlockGrid& grid, int k) {
    if (k < 1) throw ParamError("k must be >= 1");
    if (static_cast<int>(pixel_series.size()) != grid.frame_count) {
        throw ParamError("pixel series length must equal the grid frame count");
    }
    const auto stats = detail::BlockSeriesStats::build(grid);
    std::vector<double> centered;
    const double pixel_norm = detail::center_series(pixel_series, centered);

    std::vector<detail::RankedCandidate> cands(static_cast<std::size_t>(stats.blocks));
    for (int j = 0; j < stats.blocks; ++j) {
        auto& c = cands[static_cast<std::size_t>(j)];
        c.j = j;
        const double bn = stats.norm[static_cast<std::size_t>(j)];
        if (pixel_norm == 0.0 || bn == 0.0) {
            c.corr = 0.0;
            c.eligible = false;
            continue;
        }
        const double* cj = stats.centered.data() + static_cast<std::size_t>(j) * stats.frame_count;
        double dot = 0.0;
        for (int t = 0; t < stats.frame_count; ++t) dot += centered[static_cast<std::size_t>(t)] * cj[t];
        c.corr = std::clamp(dot / (pixel_norm * bn), -1.0, 1.0);
        c.eligible = true;
    }
    detail::keep_top_k(cands, k);

    std::vector<SupportCandidate> out;
    out.reserve(cands.size());
    for (const auto& c : cands) {
        out.push_back(SupportCandidate{c.j % grid.geom.cols, c.j / grid.geom.cols, c.corr, !c.eligible});
    }
    return out;
}

// ----------------------------------------------------------------------------
// Pair Gaussians and the per-pixel model
// ----------------------------------------------------------------------------

struct SupportEntry {
    int u = 0;
    int v = 0;
    double bias = 0.0;   // b_k: mean of the pixel-minus-block difference
    double sigma = 0.0;  // population standard deviation of the difference
    double corr = 0.0;
};

/// Fits the difference Gaussian for each chosen pixel-block pair using
/// population moments over the training window.
inline std::vector<SupportEntry> fit_pair_gaussians(std::span<const double> pixel_series,
                                                    const BlockGrid& grid,
                                                    std::span<const SupportCandidate> chosen) {
    if (static_cast<int>(pixel_series.size()) != grid.frame_count) {
        throw ParamError("pixel series length must equal the grid frame count");
    }
    const int T = grid.frame_count;
    const int blocks = grid.geom.block_count();
    std::vector<SupportEntry> out;
    out.reserve(chosen.size());
    for (const auto& cand : chosen) {
        if (cand.u < 0 || cand.u >= grid.geom.cols || cand.v < 0 || cand.v >= grid.geom.rows) {
            throw BoundsError("support block outside the grid");
        }
        const int j = cand.v * grid.geom.cols + cand.u;
        double bias = 0.0;
        for (int t = 0; t < T; ++t) {
            bias += pixel_series[static_cast<std::size_t>(t)] -
                    grid.means[static_cast<std::size_t>(t) * blocks + j];
        }
        bias /= T;
        double ss = 0.0;
        for (int t = 0; t < T; ++t) {
            const double delta = pixel_series[static_cast<std::size_t>(t)] -
                                 grid.means[static_cast<std::size_t>(t) * blocks + j];
            const double d = delta - bias;
            ss += d * d;
        }
        out.push_back(SupportEntry{cand.u, cand.v, bias, std::sqrt(ss / T), cand.corr});
    }
    return out;
}

struct PixelModel {
    double mean_intensity = 0.0;          // I^P over the training window
    std::array<double, 3> mean_rgb{};     // per-channel means; valid when the model has color
    std::vector<SupportEntry> supports;   // sorted by the selection order (corr descending)
};

struct CpbModel {
    int width = 0;
    int height = 0;
    BlockGeometry geom;
    CpbParams params;
    bool has_color = false;
    std::vector<PixelModel> pixels;  // row-major

    const PixelModel& pixel(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
};

// ----------------------------------------------------------------------------
// Training
// ----------------------------------------------------------------------------

/// Trains the model on the first params.train_frames frames of the
/// sequence. Per-pixel work is data-parallel and bit-deterministic.
inline CpbModel train(const FrameSequence& seq, const CpbParams& params) {
    if (params.train_frames < 2) {
        throw InsufficientTraining("training needs at least two frames");
    }
    params.validate();
    if (static_cast<int>(seq.size()) < params.train_frames) {
        throw InsufficientTraining("sequence has " + std::to_string(seq.size()) +
                                   " frames, need " + std::to_string(params.train_frames));
    }
    const int T = params.train_frames;
    const BlockGrid grid = compute_block_means(seq, params.block_w, params.block_h, T);
    const auto stats = detail::BlockSeriesStats::build(grid);

    CpbModel model;
    model.width = seq.width();
    model.height = seq.height();
    model.geom = grid.geom;
    model.params = params;
    model.has_color = true;
    for (int t = 0; t < T; ++t) model.has_color = model.has_color && seq[static_cast<std::size_t>(t)].has_color();
    model.pixels.resize(static_cast<std::size_t>(model.width) * model.height);

    const int k = params.support_count;
    const int cols = grid.geom.cols;
    const int rows = grid.geom.rows;

    detail::parallel_for(0, model.height, [&](int y) {
        std::vector<double> series(static_cast<std::size_t>(T));
        std::vector<double> centered;
        std::vector<detail::RankedCandidate> cands;
        for (int x = 0; x < model.width; ++x) {
            const std::size_t pixel_index = static_cast<std::size_t>(y) * model.width + x;
            for (int t = 0; t < T; ++t) {
                series[static_cast<std::size_t>(t)] = seq[static_cast<std::size_t>(t)].gray[pixel_index];
            }
            const double pixel_norm = detail::center_series(series, centered);

            // candidate pool: whole frame, or a block window around the pixel
            cands.clear();
            int u0 = 0, u1 = cols - 1, v0 = 0, v1 = rows - 1;
            if (params.pool_radius > 0) {
                const int uc = grid.geom.col_of(x);
                const int vc = grid.geom.row_of(y);
                u0 = std::max(0, uc - params.pool_radius);
                u1 = std::min(cols - 1, uc + params.pool_radius);
                v0 = std::max(0, vc - params.pool_radius);
                v1 = std::min(rows - 1, vc + params.pool_radius);
            }
            for (int v = v0; v <= v1; ++v) {
                for (int u = u0; u <= u1; ++u) {
                    const int j = v * cols + u;
                    detail::RankedCandidate c;
                    c.j = j;
                    const double bn = stats.norm[static_cast<std::size_t>(j)];
                    if (pixel_norm == 0.0 || bn == 0.0) {
                        cands.push_back(c);
                        continue;
                    }
                    const double* cj =
                        stats.centered.data() + static_cast<std::size_t>(j) * stats.frame_count;
                    double dot = 0.0;
                    for (int t = 0; t < T; ++t) dot += centered[static_cast<std::size_t>(t)] * cj[t];
                    c.corr = std::clamp(dot / (pixel_norm * bn), -1.0, 1.0);
                    c.eligible = true;
                    cands.push_back(c);
                }
            }
            detail::keep_top_k(cands, k);

            std::vector<SupportCandidate> chosen;
            chosen.reserve(cands.size());
            for (const auto& c : cands) {
                chosen.push_back(SupportCandidate{c.j % cols, c.j / cols, c.corr, !c.eligible});
            }

            PixelModel& pm = model.pixels[pixel_index];
            pm.supports = fit_pair_gaussians(series, grid, chosen);
            double mean = 0.0;
            for (const double v : series) mean += v;
            pm.mean_intensity = mean / T;
            if (model.has_color) {
                double r = 0.0, g = 0.0, b = 0.0;
                for (int t = 0; t < T; ++t) {
                    const auto& f = seq[static_cast<std::size_t>(t)];
                    r += f.color[3 * pixel_index];
                    g += f.color[3 * pixel_index + 1];
                    b += f.color[3 * pixel_index + 2];
                }
                pm.mean_rgb = {r / T, g / T, b / T};
            }
        }
    });
    return model;
}

// ----------------------------------------------------------------------------
// Detection
// ----------------------------------------------------------------------------

/// Correlation-dependent decision for one pixel: a support votes
/// "consistent" when the observed difference falls inside its eta-scaled
/// Gaussian gate (never narrower than sigma_floor); the pixel is background
/// when the consistent fraction reaches lambda. Returns true = foreground.
inline bool classify_pixel(const PixelModel& entry, std::span<const double> block_means,
                           int grid_cols, double intensity, const CpbParams& params) {
    if (entry.supports.empty()) return false;
    int votes = 0;
    for (const auto& s : entry.supports) {
        const double delta = intensity - block_means[static_cast<std::size_t>(s.v) * grid_cols + s.u];
        const double gate = params.eta * std::max(s.sigma, params.sigma_floor);
        if (std::abs(delta - s.bias) <= gate) ++votes;
    }
    const double fraction = static_cast<double>(votes) / static_cast<double>(entry.supports.size());
    return fraction < params.lambda;
}

/// Per-pixel foreground map for one frame (1 = foreground). `eta` and
/// `lambda` override the trained decision parameters when given.
inline BinaryMap detect_frame(const CpbModel& model, const Frame& frame, double eta,
                              double lambda) {
    if (frame.width != model.width || frame.height != model.height) {
        throw GeometryError("frame dimensions do not match the model");
    }
    CpbParams decision = model.params;
    decision.eta = eta;
    decision.lambda = lambda;
    decision.validate();

    const std::vector<double> means = frame_block_means(frame, model.geom);
    BinaryMap fg(model.width, model.height);
    detail::parallel_for(0, model.height, [&](int y) {
        for (int x = 0; x < model.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * model.width + x;
            fg.data[i] = classify_pixel(model.pixels[i], means, model.geom.cols,
                                        static_cast<double>(frame.gray[i]), decision)
                             ? 1
                             : 0;
        }
    });
    return fg;
}

inline BinaryMap detect_frame(const CpbModel& model, const Frame& frame) {
    return detect_frame(model, frame, model.params.eta, model.params.lambda);
}

// ----------------------------------------------------------------------------
// Model serialization
// ----------------------------------------------------------------------------
//
// Versioned little-endian binary format. Per-pixel records follow the model
// list convention [I^P, then per support u_k, v_k, b_k, sigma_k] with the
// selection correlation appended to each support. Round-trips are exact:
// doubles are stored as raw IEEE-754 bit patterns.

namespace detail {

inline constexpr char kModelMagic[4] = {'C', 'P', 'B', 'M'};
inline constexpr std::uint32_t kModelVersion = 1;

inline void put_f64(std::string& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

struct ModelReader {
    const unsigned char* p;
    const unsigned char* end;

    template <typename T>
    T scalar() {
        if (static_cast<std::size_t>(end - p) < sizeof(T)) {
            throw DecodeError("model file truncated");
        }
        const T v = get_le<T>(p);
        p += sizeof(T);
        return v;
    }
    double f64() { return std::bit_cast<double>(scalar<std::uint64_t>()); }
};

}  // namespace detail

inline void save_model(const CpbModel& model, const std::filesystem::path& path) {
    std::string out;
    out.reserve(64 + model.pixels.size() * 64);
    out.append(detail::kModelMagic, 4);
    detail::put_le<std::uint32_t>(out, detail::kModelVersion);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.width));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.height));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.geom.block_w));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.geom.block_h));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.params.support_count));
    detail::put_f64(out, model.params.eta);
    detail::put_f64(out, model.params.lambda);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.params.train_frames));
    detail::put_f64(out, model.params.sigma_floor);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.params.pool_radius));
    out.push_back(model.has_color ? '\1' : '\0');

    for (const auto& pm : model.pixels) {
        detail::put_f64(out, pm.mean_intensity);
        if (model.has_color) {
            detail::put_f64(out, pm.mean_rgb[0]);
            detail::put_f64(out, pm.mean_rgb[1]);
            detail::put_f64(out, pm.mean_rgb[2]);
        }
        detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(pm.supports.size()));
        for (const auto& s : pm.supports) {
            detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(s.u));
            detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(s.v));
            detail::put_f64(out, s.bias);
            detail::put_f64(out, s.sigma);
            detail::put_f64(out, s.corr);
        }
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw WriteError(path.string() + ": cannot open for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw WriteError(path.string() + ": short write");
}

inline CpbModel load_model(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw DecodeError(path.string() + ": cannot open model file");
    std::string buf((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

    detail::ModelReader r{reinterpret_cast<const unsigned char*>(buf.data()),
                          reinterpret_cast<const unsigned char*>(buf.data()) + buf.size()};
    if (buf.size() < 4 || std::memcmp(buf.data(), detail::kModelMagic, 4) != 0) {
        throw DecodeError(path.string() + ": not a CPB model file");
    }
    r.p += 4;
    const auto version = r.scalar<std::uint32_t>();
    if (version != detail::kModelVersion) {
        throw DecodeError(path.string() + ": unsupported model version " + std::to_string(version));
    }

    CpbModel model;
    model.width = static_cast<int>(r.scalar<std::uint32_t>());
    model.height = static_cast<int>(r.scalar<std::uint32_t>());
    const int block_w = static_cast<int>(r.scalar<std::uint32_t>());
    const int block_h = static_cast<int>(r.scalar<std::uint32_t>());
    model.params.block_w = block_w;
    model.params.block_h = block_h;
    model.params.support_count = static_cast<int>(r.scalar<std::uint32_t>());
    model.params.eta = r.f64();
    model.params.lambda = r.f64();
    model.params.train_frames = static_cast<int>(r.scalar<std::uint32_t>());
    model.params.sigma_floor = r.f64();
    model.params.pool_radius = static_cast<int>(r.scalar<std::uint32_t>());
    model.geom = BlockGeometry::for_frame(model.width, model.height, block_w, block_h);

    if (r.p >= r.end) throw DecodeError(path.string() + ": model file truncated");
    model.has_color = *r.p++ != 0;

    model.pixels.resize(static_cast<std::size_t>(model.width) * model.height);
    for (auto& pm : model.pixels) {
        pm.mean_intensity = r.f64();
        if (model.has_color) {
            pm.mean_rgb[0] = r.f64();
            pm.mean_rgb[1] = r.f64();
            pm.mean_rgb[2] = r.f64();
        }
        const auto n = r.scalar<std::uint16_t>();
        pm.supports.resize(n);
        for (auto& s : pm.supports) {
            s.u = r.scalar<std::uint16_t>();
            s.v = r.scalar<std::uint16_t>();
            if (s.u >= model.geom.cols || s.v >= model.geom.rows) {
                throw DecodeError(path.string() + ": support coordinates out of range");
            }
            s.bias = r.f64();
            s.sigma = r.f64();
            s.corr = r.f64();
        }
    }
    if (r.p != r.end) throw DecodeError(path.string() + ": trailing bytes in model file");
    return model;
}

}  // namespace cpbsp

#endif  // CPBSP_CPB_HPP
