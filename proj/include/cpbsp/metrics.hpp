// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CPBSP_METRICS_HPP
#define CPBSP_METRICS_HPP

#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "cpbsp/image.hpp"

namespace cpbsp::metrics {

/// PSNR reported for a zero-MSE (identical) pair, per SBMnet convention.
inline constexpr double kPsnrCap = 100.0;

/// Default error-pixel threshold tau for pEPs / pCEPs.
inline constexpr int kDefaultTau = 20;

// CQM channel weights from Yalman & Erturk, "A new color image quality
// measure based on YUV transformation and PSNR for human vision system"
// (2013): the rod/cone population ratio of the human retina,
// ~120M rods vs ~7M cones.
inline constexpr double kCqmRodWeight = 0.9449;   // luminance (Y)
inline constexpr double kCqmConeWeight = 0.0551;  // chrominance (U, V)

// MS-SSIM parameterization from Wang, Simoncelli & Bovik (2003).
inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = (0.01 * 255) * (0.01 * 255);
inline constexpr double kSsimC2 = (0.03 * 255) * (0.03 * 255);
inline constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

struct MetricReport {
    double age = 0.0;
    double peps = 0.0;
    double pceps = 0.0;
    double psnr = 0.0;
    double ms_ssim = 0.0;
    double cqm = 0.0;
    bool cqm_luma_only = false;  // set when CQM fell back to PSNR_Y (gray inputs)
};

namespace detail {

inline void require_same_dims(const Frame& a, const Frame& b) {
    if (a.width != b.width || a.height != b.height) {
        throw GeometryError("image dimensions differ: " + std::to_string(a.width) + "x" +
                            std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                            std::to_string(b.height));
    }
    if (a.width <= 0 || a.height <= 0) throw GeometryError("empty image");
}

struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    Plane() = default;
    Plane(int w, int h) : width(w), height(h), v(static_cast<std::size_t>(w) * h, 0.0) {}
    double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
};

inline Plane gray_plane(const Frame& f) {
    Plane p(f.width, f.height);
    for (std::size_t i = 0; i < f.pixel_count(); ++i) p.v[i] = f.gray[i];
    return p;
}

inline std::vector<double> gaussian_kernel(int taps, double sigma) {
    std::vector<double> k(static_cast<std::size_t>(taps));
    const int radius = taps / 2;
    double sum = 0.0;
    for (int i = 0; i < taps; ++i) {
        const double d = i - radius;
        k[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += k[static_cast<std::size_t>(i)];
    }
    for (auto& w : k) w /= sum;
    return k;
}

/// Separable valid-mode convolution; output shrinks by taps-1 per axis.
inline Plane filter_valid(const Plane& p, const std::vector<double>& kernel) {
    const int taps = static_cast<int>(kernel.size());
    Plane horiz(p.width - taps + 1, p.height);
    for (int y = 0; y < p.height; ++y) {
        for (int x = 0; x < horiz.width; ++x) {
            double acc = 0.0;
            for (int i = 0; i < taps; ++i) acc += kernel[static_cast<std::size_t>(i)] * p.at(x + i, y);
            horiz.at(x, y) = acc;
        }
    }
    Plane out(horiz.width, p.height - taps + 1);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            double acc = 0.0;
            for (int i = 0; i < taps; ++i) acc += kernel[static_cast<std::size_t>(i)] * horiz.at(x, y + i);
            out.at(x, y) = acc;
        }
    }
    return out;
}

/// 2x2 mean downsampling with stride 2; trailing odd row/column dropped.
inline Plane downsample2(const Plane& p) {
    Plane out(p.width / 2, p.height / 2);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            out.at(x, y) = 0.25 * (p.at(2 * x, 2 * y) + p.at(2 * x + 1, 2 * y) +
                                   p.at(2 * x, 2 * y + 1) + p.at(2 * x + 1, 2 * y + 1));
        }
    }
    return out;
}

inline Plane multiply(const Plane& a, const Plane& b) {
    Plane out(a.width, a.height);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
    return out;
}

inline double mse_planes(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

inline double psnr_from_mse(double mse) {
    return mse == 0.0 ? kPsnrCap : 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace detail

// ----------------------------------------------------------------------------
// AGE / pEPs / pCEPs / PSNR
// ----------------------------------------------------------------------------

/// Average gray-level error: mean absolute difference of the gray planes.
inline double age(const Frame& gt, const Frame& bi) {
    detail::require_same_dims(gt, bi);
    double acc = 0.0;
    for (std::size_t i = 0; i < gt.pixel_count(); ++i) {
        acc += std::abs(static_cast<int>(gt.gray[i]) - static_cast<int>(bi.gray[i]));
    }
    return acc / static_cast<double>(gt.pixel_count());
}

/// Fraction of pixels whose absolute error exceeds tau (strictly).
inline double peps(const Frame& gt, const Frame& bi, int tau = kDefaultTau) {
    detail::require_same_dims(gt, bi);
    std::size_t count = 0;
    for (std::size_t i = 0; i < gt.pixel_count(); ++i) {
        if (std::abs(static_cast<int>(gt.gray[i]) - static_cast<int>(bi.gray[i])) > tau) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(gt.pixel_count());
}

/// Fraction of clustered error pixels: error pixels whose in-bounds
/// 4-neighbors are all error pixels. Out-of-bounds neighbors are ignored,
/// so border pixels qualify on their existing neighbors alone.
inline double pceps(const Frame& gt, const Frame& bi, int tau = kDefaultTau) {
    detail::require_same_dims(gt, bi);
    const int w = gt.width;
    const int h = gt.height;
    std::vector<std::uint8_t> err(gt.pixel_count());
    for (std::size_t i = 0; i < gt.pixel_count(); ++i) {
        err[i] = std::abs(static_cast<int>(gt.gray[i]) - static_cast<int>(bi.gray[i])) > tau ? 1 : 0;
    }
    auto at = [&](int x, int y) { return err[static_cast<std::size_t>(y) * w + x]; };
    std::size_t count = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!at(x, y)) continue;
            if (x > 0 && !at(x - 1, y)) continue;
            if (x + 1 < w && !at(x + 1, y)) continue;
            if (y > 0 && !at(x, y - 1)) continue;
            if (y + 1 < h && !at(x, y + 1)) continue;
            ++count;
        }
    }
    return static_cast<double>(count) / static_cast<double>(gt.pixel_count());
}

/// Peak signal-to-noise ratio in dB over the gray planes; identical images
/// report the 100 dB cap.
inline double psnr(const Frame& gt, const Frame& bi) {
    detail::require_same_dims(gt, bi);
    double acc = 0.0;
    for (std::size_t i = 0; i < gt.pixel_count(); ++i) {
        const double d = static_cast<int>(gt.gray[i]) - static_cast<int>(bi.gray[i]);
        acc += d * d;
    }
    return detail::psnr_from_mse(acc / static_cast<double>(gt.pixel_count()));
}

// ----------------------------------------------------------------------------
// SSIM / MS-SSIM
// ----------------------------------------------------------------------------

struct SsimStats {
    double ssim = 0.0;  // mean of the luminance * contrast-structure map
    double cs = 0.0;    // mean of the contrast-structure map alone
};

namespace detail {

inline SsimStats ssim_stats(const Plane& x, const Plane& y) {
    const auto kernel = gaussian_kernel(kSsimWindow, kSsimSigma);
    const Plane mu1 = filter_valid(x, kernel);
    const Plane mu2 = filter_valid(y, kernel);
    const Plane xx = filter_valid(multiply(x, x), kernel);
    const Plane yy = filter_valid(multiply(y, y), kernel);
    const Plane xy = filter_valid(multiply(x, y), kernel);

    double ssim_sum = 0.0;
    double cs_sum = 0.0;
    for (std::size_t i = 0; i < mu1.v.size(); ++i) {
        const double m1 = mu1.v[i];
        const double m2 = mu2.v[i];
        const double s11 = xx.v[i] - m1 * m1;
        const double s22 = yy.v[i] - m2 * m2;
        const double s12 = xy.v[i] - m1 * m2;
        const double cs = (2.0 * s12 + kSsimC2) / (s11 + s22 + kSsimC2);
        const double lum = (2.0 * m1 * m2 + kSsimC1) / (m1 * m1 + m2 * m2 + kSsimC1);
        cs_sum += cs;
        ssim_sum += lum * cs;
    }
    const double n = static_cast<double>(mu1.v.size());
    return SsimStats{ssim_sum / n, cs_sum / n};
}

}  // namespace detail

/// Single-scale SSIM (11x11 Gaussian window, sigma 1.5) over the gray
/// planes. Requires both sides of the window to fit: min dimension >= 11.
inline SsimStats ssim(const Frame& gt, const Frame& bi) {
    detail::require_same_dims(gt, bi);
    if (std::min(gt.width, gt.height) < kSsimWindow) {
        throw GeometryError("image too small for the 11x11 SSIM window");
    }
    return detail::ssim_stats(detail::gray_plane(gt), detail::gray_plane(bi));
}

struct MsSsimDetails {
    int scales = 0;
    std::vector<double> mean_cs;   // per scale, scales entries (last one unused in the product)
    double final_ssim = 0.0;       // mean luminance*cs at the coarsest scale
    std::vector<double> weights;   // renormalized weights actually applied
    double value = 0.0;
};

/// Multi-scale SSIM: contrast-structure at every scale, luminance at the
/// coarsest, combined as prod(mcs_j^w_j) * mssim_M^w_M. Images too small
/// for all five scales use the largest feasible count with renormalized
/// weights. Negative component means are clamped to zero before the power.
inline MsSsimDetails ms_ssim_details(const Frame& gt, const Frame& bi) {
    detail::require_same_dims(gt, bi);
    int feasible = 0;
    {
        int w = gt.width;
        int h = gt.height;
        while (feasible < static_cast<int>(kMsSsimWeights.size()) && std::min(w, h) >= kSsimWindow) {
            ++feasible;
            w /= 2;
            h /= 2;
        }
    }
    if (feasible == 0) throw GeometryError("image too small for the 11x11 SSIM window");

    MsSsimDetails out;
    out.scales = feasible;
    double wsum = 0.0;
    for (int s = 0; s < feasible; ++s) wsum += kMsSsimWeights[static_cast<std::size_t>(s)];
    for (int s = 0; s < feasible; ++s) {
        out.weights.push_back(kMsSsimWeights[static_cast<std::size_t>(s)] / wsum);
    }

    detail::Plane x = detail::gray_plane(gt);
    detail::Plane y = detail::gray_plane(bi);
    double value = 1.0;
    for (int s = 0; s < feasible; ++s) {
        const SsimStats stats = detail::ssim_stats(x, y);
        out.mean_cs.push_back(stats.cs);
        if (s + 1 == feasible) {
            out.final_ssim = stats.ssim;
            value *= std::pow(std::max(stats.ssim, 0.0), out.weights[static_cast<std::size_t>(s)]);
        } else {
            value *= std::pow(std::max(stats.cs, 0.0), out.weights[static_cast<std::size_t>(s)]);
            x = detail::downsample2(x);
            y = detail::downsample2(y);
        }
    }
    out.value = value;
    return out;
}

inline double ms_ssim(const Frame& gt, const Frame& bi) { return ms_ssim_details(gt, bi).value; }

// ----------------------------------------------------------------------------
// CQM
// ----------------------------------------------------------------------------

struct CqmResult {
    double value = 0.0;
    bool luma_only = false;
};

/// Combines YUV channel PSNRs with the published rod/cone weights.
inline double cqm_from_channel_psnrs(double psnr_y, double psnr_u, double psnr_v) {
    return psnr_y * kCqmRodWeight + 0.5 * (psnr_u + psnr_v) * kCqmConeWeight;
}

/// Color quality measure on BT.601 YUV planes. Grayscale-only inputs fall
/// back to PSNR over luma with the full combined weight, flagged in the
/// result.
inline CqmResult cqm(const Frame& gt, const Frame& bi) {
    detail::require_same_dims(gt, bi);
    if (!gt.has_color() || !bi.has_color()) {
        return CqmResult{psnr(gt, bi) * (kCqmRodWeight + kCqmConeWeight), true};
    }
    const std::size_t n = gt.pixel_count();
    std::vector<double> y1(n), u1(n), v1(n), y2(n), u2(n), v2(n);
    auto fill = [n](const Frame& f, std::vector<double>& y, std::vector<double>& u,
                    std::vector<double>& v) {
        for (std::size_t i = 0; i < n; ++i) {
            const double r = f.color[3 * i];
            const double g = f.color[3 * i + 1];
            const double b = f.color[3 * i + 2];
            const double luma = 0.299 * r + 0.587 * g + 0.114 * b;
            y[i] = luma;
            u[i] = 0.492 * (b - luma);
            v[i] = 0.877 * (r - luma);
        }
    };
    fill(gt, y1, u1, v1);
    fill(bi, y2, u2, v2);
    const double psnr_y = detail::psnr_from_mse(detail::mse_planes(y1, y2));
    const double psnr_u = detail::psnr_from_mse(detail::mse_planes(u1, u2));
    const double psnr_v = detail::psnr_from_mse(detail::mse_planes(v1, v2));
    return CqmResult{cqm_from_channel_psnrs(psnr_y, psnr_u, psnr_v), false};
}

// ----------------------------------------------------------------------------
// Aggregate evaluation and report writers
// ----------------------------------------------------------------------------

/// Computes all six metrics. Gray metrics run on luma; CQM runs on color
/// when both frames carry it.
inline MetricReport evaluate(const Frame& gt, const Frame& bi) {
    MetricReport r;
    r.age = age(gt, bi);
    r.peps = peps(gt, bi);
    r.pceps = pceps(gt, bi);
    r.psnr = psnr(gt, bi);
    r.ms_ssim = ms_ssim(gt, bi);
    const CqmResult c = cqm(gt, bi);
    r.cqm = c.value;
    r.cqm_luma_only = c.luma_only;
    return r;
}

inline std::string csv_header() { return "sequence,method,age,peps,pceps,psnr,ms_ssim,cqm"; }

inline std::string csv_row(const std::string& sequence, const std::string& method,
                           const MetricReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f", sequence.c_str(),
                  method.c_str(), r.age, r.peps, r.pceps, r.psnr, r.ms_ssim, r.cqm);
    return buf;
}

}  // namespace cpbsp::metrics

#endif  // CPBSP_METRICS_HPP
