#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "meshcs/error.hpp"
#include "meshcs/image.hpp"

namespace meshcs {

/// PSNR reported for a perfect reconstruction (MSE == 0).
inline constexpr double kPsnrExact = std::numeric_limits<double>::infinity();

inline bool is_exact_psnr(double db) noexcept { return db == kPsnrExact; }

namespace detail {
inline void require_same_shape(const GrayImage& a, const GrayImage& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw ValidationError("image dimensions differ: " + std::to_string(a.width()) + "x" +
                              std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                              "x" + std::to_string(b.height()));
}
}  // namespace detail

inline double mse(const GrayImage& a, const GrayImage& b) {
    detail::require_same_shape(a, b);
    const auto pa = a.pixels();
    const auto pb = b.pixels();
    double sum = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const double d = pa[i] - pb[i];
        sum += d * d;
    }
    return sum / static_cast<double>(pa.size());
}

/// 20 log10(peak / sqrt(MSE)) with peak = 2^p - 1; kPsnrExact when MSE is zero.
inline double psnr(const GrayImage& a, const GrayImage& b) {
    if (a.precision_bits() != b.precision_bits())
        throw ValidationError("precision mismatch in psnr");
    const double e = mse(a, b);
    if (e == 0.0) return kPsnrExact;
    return 20.0 * std::log10(a.peak() / std::sqrt(e));
}

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    /// Dynamic range; <= 0 means 2^p - 1 of the inputs.
    double dynamic_range = 0.0;

    void validate() const {
        if (window < 3 || window % 2 == 0) throw ValidationError("SSIM window must be odd and >= 3");
        if (!(sigma > 0.0)) throw ValidationError("SSIM sigma must be positive");
        if (!(k1 > 0.0) || !(k2 > 0.0)) throw ValidationError("SSIM k1, k2 must be positive");
    }
};

struct SsimResult {
    double mean_ssim = 0.0;
    /// Local SSIM, same shape as the inputs, row-major.
    std::vector<double> map;
    std::size_t width = 0;
    std::size_t height = 0;
};

/// Gaussian-weighted local statistics at one pixel (reflective borders).
struct LocalStats {
    double mu_x, mu_y, var_x, var_y, cov_xy;
};

namespace detail {

// Symmetric padding: -1 -> 0, -2 -> 1, n -> n-1.
inline std::ptrdiff_t reflect(std::ptrdiff_t i, std::ptrdiff_t n) {
    while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
    return i;
}

inline std::vector<double> gaussian_window(int size, double sigma) {
    const int r = size / 2;
    std::vector<double> w(static_cast<std::size_t>(size) * size);
    double total = 0.0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            w[static_cast<std::size_t>((dy + r) * size + dx + r)] = v;
            total += v;
        }
    for (double& v : w) v /= total;
    return w;
}

}  // namespace detail

/// Local statistics at every pixel. Variances are computed from centered
/// samples, so they are never negative.
inline std::vector<LocalStats> local_statistics(const GrayImage& a, const GrayImage& b,
                                                const SsimParams& params) {
    params.validate();
    detail::require_same_shape(a, b);
    const auto w = static_cast<std::ptrdiff_t>(a.width());
    const auto h = static_cast<std::ptrdiff_t>(a.height());
    if (std::min(w, h) < params.window) throw ValidationError("image smaller than SSIM window");

    const auto kernel = detail::gaussian_window(params.window, params.sigma);
    const int r = params.window / 2;
    const auto pa = a.pixels();
    const auto pb = b.pixels();
    std::vector<LocalStats> out(static_cast<std::size_t>(w * h));
    std::vector<double> xs(kernel.size()), ys(kernel.size());

    for (std::ptrdiff_t i = 0; i < h; ++i) {
        for (std::ptrdiff_t j = 0; j < w; ++j) {
            double mx = 0.0, my = 0.0;
            std::size_t k = 0;
            for (int dy = -r; dy <= r; ++dy) {
                const std::ptrdiff_t row = detail::reflect(i + dy, h) * w;
                for (int dx = -r; dx <= r; ++dx, ++k) {
                    const std::ptrdiff_t idx = row + detail::reflect(j + dx, w);
                    xs[k] = pa[static_cast<std::size_t>(idx)];
                    ys[k] = pb[static_cast<std::size_t>(idx)];
                    mx += kernel[k] * xs[k];
                    my += kernel[k] * ys[k];
                }
            }
            double vx = 0.0, vy = 0.0, cxy = 0.0;
            for (k = 0; k < kernel.size(); ++k) {
                const double ex = xs[k] - mx;
                const double ey = ys[k] - my;
                vx += kernel[k] * ex * ex;
                vy += kernel[k] * ey * ey;
                cxy += kernel[k] * ex * ey;
            }
            out[static_cast<std::size_t>(i * w + j)] = {mx, my, vx, vy, cxy};
        }
    }
    return out;
}

inline double ssim_at(const LocalStats& s, double c1, double c2) {
    const double num = (2.0 * s.mu_x * s.mu_y + c1) * (2.0 * s.cov_xy + c2);
    const double den = (s.mu_x * s.mu_x + s.mu_y * s.mu_y + c1) * (s.var_x + s.var_y + c2);
    // Rounding in the covariance can push |num| a few ulps past den.
    return std::clamp(num / den, -1.0, 1.0);
}

inline SsimResult ssim(const GrayImage& a, const GrayImage& b, const SsimParams& params = {}) {
    if (a.precision_bits() != b.precision_bits())
        throw ValidationError("precision mismatch in ssim");
    const auto stats = local_statistics(a, b, params);
    const double range = params.dynamic_range > 0.0 ? params.dynamic_range : a.peak();
    const double c1 = (params.k1 * range) * (params.k1 * range);
    const double c2 = (params.k2 * range) * (params.k2 * range);

    SsimResult res;
    res.width = a.width();
    res.height = a.height();
    res.map.resize(stats.size());
    double total = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        res.map[i] = ssim_at(stats[i], c1, c2);
        total += res.map[i];
    }
    res.mean_ssim = total / static_cast<double>(stats.size());
    return res;
}

/// Affine map of local SSIM from [-1, 1] onto [0, 255] for export as PGM.
struct SsimMapScaling {
    double offset = 1.0;
    double scale = 127.5;
};

inline GrayImage ssim_map_image(const SsimResult& r, SsimMapScaling s = {}) {
    std::vector<double> v(r.map.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (r.map[i] + s.offset) * s.scale;
    return GrayImage::clamped(r.width, r.height, std::move(v), 8);
}

}  // namespace meshcs
