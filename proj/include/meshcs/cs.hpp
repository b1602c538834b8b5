#pragma once

// Compressive sampling: random coefficient-selection sensing, ISTA with a
// Haar prior, and equality-constrained total-variation minimization.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "meshcs/error.hpp"
#include "meshcs/image.hpp"
#include "meshcs/random.hpp"
#include "meshcs/transforms.hpp"

namespace meshcs {

/// How coefficient indices are drawn. Variable density favours low
/// frequencies with probability proportional to (1 - r)^8, r the normalized
/// radial frequency; uniform draws every index with equal probability.
enum class SamplingScheme { uniform, variable_density };

inline std::string to_string(SamplingScheme s) {
    return s == SamplingScheme::uniform ? "uniform" : "variable_density";
}

inline SamplingScheme sampling_scheme_from_string(const std::string& s) {
    if (s == "uniform") return SamplingScheme::uniform;
    if (s == "variable_density") return SamplingScheme::variable_density;
    throw ValidationError("unsupported sampling scheme '" + s + "'");
}

struct MeasurementOp {
    SensingDomain domain = SensingDomain::fourier;
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::size_t> kept;  // sorted, distinct

    std::size_t size() const noexcept { return width * height; }
    std::size_t m() const noexcept { return kept.size(); }
    double density() const noexcept { return static_cast<double>(m()) / static_cast<double>(size()); }

    void validate() const {
        if (width < 2 || height < 2) throw ValidationError("measurement dimensions must be at least 2x2");
        if (kept.empty() || kept.size() > size()) throw ValidationError("measurement count out of range");
        for (std::size_t i = 0; i < kept.size(); ++i) {
            if (kept[i] >= size()) throw ValidationError("measurement index out of range");
            if (i > 0 && kept[i] <= kept[i - 1]) throw ValidationError("measurement indices must be sorted and distinct");
        }
        if (kept.front() != 0) throw ValidationError("DC coefficient must be measured");
        if (domain == SensingDomain::fourier) {
            for (std::size_t k : kept)
                if (!std::binary_search(kept.begin(), kept.end(), conjugate_partner(k, width, height)))
                    throw ValidationError("fourier index set is not conjugate-symmetric");
        }
    }

    friend bool operator==(const MeasurementOp&, const MeasurementOp&) = default;
};

struct Measurements {
    MeasurementOp op;
    std::vector<double> values;
    std::uint64_t seed = 0;

    friend bool operator==(const Measurements&, const Measurements&) = default;
};

struct SolverConfig {
    int max_iterations = 500;
    double tolerance = 1e-6;  // relative change between iterates
    // ISTA: initial threshold as a fraction of the largest detail coefficient
    // of the zero-filled estimate, scaled by `continuation_factor` every
    // `continuation_interval` iterations.
    double threshold_fraction = 0.02;
    int continuation_interval = 50;
    double continuation_factor = 0.5;
    // TVeq: primal step; the dual step is 1 / (8 * tv_primal_step).
    double tv_primal_step = 20.0;
    // Record per-iteration objective (ISTA) or constraint residual (TVeq).
    bool record_history = false;

    static SolverConfig ista_defaults() { return SolverConfig{}; }
    static SolverConfig tveq_defaults() {
        SolverConfig c;
        c.max_iterations = 300;
        return c;
    }

    void validate() const {
        if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
        if (!(tolerance > 0)) throw ValidationError("tolerance must be positive");
        if (!(threshold_fraction >= 0)) throw ValidationError("threshold_fraction must be non-negative");
        if (continuation_interval < 1) throw ValidationError("continuation_interval must be >= 1");
        if (!(continuation_factor > 0 && continuation_factor <= 1))
            throw ValidationError("continuation_factor must lie in (0, 1]");
        if (!(tv_primal_step > 0)) throw ValidationError("tv_primal_step must be positive");
    }
};

struct SolverReport {
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;
};

struct Reconstruction {
    GrayImage image;
    SolverReport report;
};

namespace detail {

/// Normalized radial frequency in [0, 1] of flat coefficient index k.
inline double radial_frequency(std::size_t k, std::size_t w, std::size_t h, SensingDomain d) {
    const double ky = static_cast<double>(k / w), kx = static_cast<double>(k % w);
    double fy, fx;
    if (d == SensingDomain::fourier) {
        fy = std::min(ky, static_cast<double>(h) - ky) / static_cast<double>(h);
        fx = std::min(kx, static_cast<double>(w) - kx) / static_cast<double>(w);
    } else {
        fy = ky / (2.0 * static_cast<double>(h));
        fx = kx / (2.0 * static_cast<double>(w));
    }
    return std::min(1.0, std::sqrt((fx * fx + fy * fy) / 0.5));
}

}  // namespace detail

/// Selects round(density * N) coefficients. Fourier selections are unions of
/// conjugate classes; when one slot remains and only pairs are left, the
/// count ends one short of the target rather than breaking symmetry.
inline MeasurementOp build_measurement_op(std::size_t width, std::size_t height, double density,
                                          SensingDomain domain, std::uint64_t seed,
                                          SamplingScheme scheme = SamplingScheme::variable_density) {
    if (width < 2 || height < 2) throw ValidationError("measurement dimensions must be at least 2x2");
    if (!(density > 0 && density <= 1)) throw ValidationError("density must lie in (0, 1]");
    const std::size_t n = width * height;
    const auto m = static_cast<std::size_t>(std::llround(density * static_cast<double>(n)));
    if (m < 1) throw ValidationError("density yields no measurements");

    // Units: conjugate classes (fourier) or single coefficients (dct).
    struct Unit {
        std::size_t rep, partner;
        double weight;
        std::size_t count() const { return rep == partner ? 1 : 2; }
    };
    std::vector<Unit> units;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t p = domain == SensingDomain::fourier ? conjugate_partner(k, width, height) : k;
        if (p < k) continue;
        double w = 1.0;
        if (scheme == SamplingScheme::variable_density)
            w = std::max(std::pow(1.0 - detail::radial_frequency(k, width, height, domain), 8.0), 1e-12);
        units.push_back({k, p, w});
    }

    // Inclusion probabilities min(1, s * w) with s set by bisection so the
    // expected count matches m.
    auto expected = [&](double s) {
        double e = 0;
        for (const auto& u : units) e += static_cast<double>(u.count()) * std::min(1.0, s * u.weight);
        return e;
    };
    double lo = 0, hi = 1;
    while (expected(hi) < static_cast<double>(m) && hi < 1e300) hi *= 2;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (expected(mid) < static_cast<double>(m) ? lo : hi) = mid;
    }

    // Weighted sampling without replacement by exponential race keys; DC and
    // certain units get key 0 and are taken first.
    Rng rng(seed);
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        const double p = std::min(1.0, hi * units[i].weight);
        const double u = rng.uniform_open0();
        const bool certain = units[i].rep == 0 || p >= 1.0;
        order.emplace_back(certain ? 0.0 : -std::log(u) / p, i);
    }
    std::sort(order.begin(), order.end());

    MeasurementOp op{domain, width, height, {}};
    for (const auto& [key, i] : order) {
        if (op.kept.size() == m) break;
        const Unit& u = units[i];
        if (op.kept.size() + u.count() > m) continue;
        op.kept.push_back(u.rep);
        if (u.count() == 2) op.kept.push_back(u.partner);
    }
    std::sort(op.kept.begin(), op.kept.end());
    return op;
}

inline Measurements measure(const GrayImage& img, const MeasurementOp& op, std::uint64_t seed = 0) {
    if (img.width() != op.width || img.height() != op.height)
        throw ValidationError("image dimensions do not match the measurement operator");
    SensingTransform t(op.width, op.height, op.domain);
    const auto coeffs = t.forward(img.pixels());
    Measurements out{op, {}, seed};
    out.values.reserve(op.m());
    for (std::size_t k : op.kept) out.values.push_back(coeffs[k]);
    return out;
}

/// A x for a raw pixel vector.
inline std::vector<double> apply_op(const MeasurementOp& op, std::span<const double> x) {
    SensingTransform t(op.width, op.height, op.domain);
    const auto c = t.forward(x);
    std::vector<double> y;
    y.reserve(op.m());
    for (std::size_t k : op.kept) y.push_back(c[k]);
    return y;
}

/// A^T y: zero-filled inverse transform.
inline std::vector<double> adjoint(const MeasurementOp& op, std::span<const double> y) {
    if (y.size() != op.m()) throw ValidationError("measurement length mismatch");
    std::vector<double> c(op.size(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) c[op.kept[i]] = y[i];
    SensingTransform t(op.width, op.height, op.domain);
    return t.inverse(c);
}

inline std::vector<double> soft_threshold(std::span<const double> v, double lambda) {
    if (!(lambda >= 0)) throw ValidationError("threshold must be non-negative");
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]) - lambda;
        out[i] = a > 0 ? std::copysign(a, v[i]) : 0.0;
    }
    return out;
}

namespace detail {

inline void check_measurements(const Measurements& meas) {
    meas.op.validate();
    if (meas.values.size() != meas.op.m()) throw ValidationError("measurement values do not match operator");
}

/// Projection onto {x : A x = y}: overwrite measured coefficients.
class ConstraintProjector {
public:
    explicit ConstraintProjector(const Measurements& meas)
        : meas_(meas), t_(meas.op.width, meas.op.height, meas.op.domain), c_(meas.op.size()) {}

    void project(std::span<const double> x, std::span<double> out) {
        t_.forward(x, c_);
        for (std::size_t i = 0; i < meas_.values.size(); ++i) c_[meas_.op.kept[i]] = meas_.values[i];
        t_.inverse(c_, out);
    }

    /// ||A x - y||_2.
    double residual(std::span<const double> x) {
        t_.forward(x, c_);
        double s = 0;
        for (std::size_t i = 0; i < meas_.values.size(); ++i) {
            const double d = c_[meas_.op.kept[i]] - meas_.values[i];
            s += d * d;
        }
        return std::sqrt(s);
    }

private:
    const Measurements& meas_;
    SensingTransform t_;
    std::vector<double> c_;
};

inline double relative_change(std::span<const double> a, std::span<const double> b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), std::numeric_limits<double>::min());
}

}  // namespace detail

/// ISTA on 1/2 ||A x - y||^2 + lambda ||W_d x||_1, W_d the Haar detail bands.
/// The coarsest approximation band carries the image mean and is left
/// unpenalized. With unit step and orthonormal selection, the gradient step
/// reduces to the constraint projection. The threshold follows the
/// configured continuation schedule of at most max_iterations/interval stages.
inline Reconstruction reconstruct_ista(const Measurements& meas, const SolverConfig& cfg = SolverConfig::ista_defaults()) {
    cfg.validate();
    detail::check_measurements(meas);
    const std::size_t w = meas.op.width, h = meas.op.height, n = w * h;
    detail::ConstraintProjector proj(meas);
    HaarTransform haar(w, h);

    std::vector<double> x = adjoint(meas.op, meas.values);
    std::vector<double> z(n), coef(n), next(n);

    haar.forward(x, coef);
    double max_detail = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (!haar.is_approximation(k)) max_detail = std::max(max_detail, std::abs(coef[k]));
    double lambda = cfg.threshold_fraction * max_detail;

    auto penalty = [&](std::span<const double> c) {
        double s = 0;
        for (std::size_t k = 0; k < n; ++k)
            if (!haar.is_approximation(k)) s += std::abs(c[k]);
        return s;
    };

    Reconstruction out{GrayImage(w, h), {}};
    if (cfg.record_history) out.report.history.push_back(lambda * penalty(coef));

    const int last_stage = (cfg.max_iterations - 1) / cfg.continuation_interval;
    int stage = 0, stage_start = 0;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        proj.project(x, z);
        haar.forward(z, coef);
        for (std::size_t k = 0; k < n; ++k) {
            if (haar.is_approximation(k)) continue;
            const double a = std::abs(coef[k]) - lambda;
            coef[k] = a > 0 ? std::copysign(a, coef[k]) : 0.0;
        }
        haar.inverse(coef, next);
        out.report.iterations = it;
        if (cfg.record_history) {
            const double r = proj.residual(next);
            out.report.history.push_back(0.5 * r * r + lambda * penalty(coef));
        }
        const double change = detail::relative_change(next, x);
        std::swap(x, next);
        // A stage ends after `continuation_interval` iterations or once it
        // stalls; the final stage runs until it stalls, which is convergence.
        const bool stalled = change < cfg.tolerance;
        if (stalled && (stage == last_stage || cfg.continuation_factor == 1.0)) {
            out.report.converged = true;
            break;
        }
        if (stage < last_stage && (stalled || it - stage_start == cfg.continuation_interval)) {
            lambda *= cfg.continuation_factor;
            ++stage;
            stage_start = it;
        }
    }
    out.image = GrayImage::clamped(w, h, std::move(x), 8);
    return out;
}

struct GradientField {
    std::vector<double> dx, dy;
};

/// Forward differences; the last column of dx and last row of dy are zero.
inline void gradient(std::span<const double> u, std::size_t w, std::size_t h, std::span<double> dx, std::span<double> dy) {
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t k = i * w + j;
            dx[k] = j + 1 < w ? u[k + 1] - u[k] : 0.0;
            dy[k] = i + 1 < h ? u[k + w] - u[k] : 0.0;
        }
}

/// Negative adjoint of `gradient`.
inline void divergence(std::span<const double> px, std::span<const double> py, std::size_t w, std::size_t h,
                       std::span<double> out) {
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t k = i * w + j;
            double d = 0;
            if (j + 1 < w) d += px[k];
            if (j > 0) d -= px[k - 1];
            if (i + 1 < h) d += py[k];
            if (i > 0) d -= py[k - w];
            out[k] = d;
        }
}

inline GradientField tv_gradient_pair(const GrayImage& img) {
    GradientField g{std::vector<double>(img.size()), std::vector<double>(img.size())};
    gradient(img.pixels(), img.width(), img.height(), g.dx, g.dy);
    return g;
}

inline double tv_value(std::span<const double> u, std::size_t w, std::size_t h) {
    std::vector<double> dx(u.size()), dy(u.size());
    gradient(u, w, h, dx, dy);
    double s = 0;
    for (std::size_t k = 0; k < u.size(); ++k) s += std::hypot(dx[k], dy[k]);
    return s;
}

inline double tv_value(const GrayImage& img) { return tv_value(img.pixels(), img.width(), img.height()); }

/// min TV(x) s.t. A x = y by a primal-dual splitting: a projected ascent step
/// on the dual gradient field (pointwise unit-ball projection) alternates
/// with a primal step that ends in the exact constraint projection.
inline Reconstruction reconstruct_tveq(const Measurements& meas, const SolverConfig& cfg = SolverConfig::tveq_defaults()) {
    cfg.validate();
    detail::check_measurements(meas);
    const std::size_t w = meas.op.width, h = meas.op.height, n = w * h;
    detail::ConstraintProjector proj(meas);
    const double tau = cfg.tv_primal_step, sigma = 1.0 / (8.0 * tau);

    std::vector<double> x = adjoint(meas.op, meas.values);
    std::vector<double> bar = x, next(n), px(n, 0.0), py(n, 0.0), gx(n), gy(n), div(n);

    Reconstruction out{GrayImage(w, h), {}};
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        gradient(bar, w, h, gx, gy);
        for (std::size_t k = 0; k < n; ++k) {
            const double ax = px[k] + sigma * gx[k], ay = py[k] + sigma * gy[k];
            const double s = std::max(1.0, std::hypot(ax, ay));
            px[k] = ax / s;
            py[k] = ay / s;
        }
        divergence(px, py, w, h, div);
        for (std::size_t k = 0; k < n; ++k) div[k] = x[k] + tau * div[k];
        proj.project(div, next);
        for (std::size_t k = 0; k < n; ++k) bar[k] = 2.0 * next[k] - x[k];
        out.report.iterations = it;
        if (cfg.record_history) out.report.history.push_back(proj.residual(next));
        const double change = detail::relative_change(next, x);
        std::swap(x, next);
        if (change < cfg.tolerance) {
            out.report.converged = true;
            break;
        }
    }
    out.image = GrayImage::clamped(w, h, std::move(x), 8);
    return out;
}

// Flat little-endian record: u32 domain tag, u64 width, u64 height, u64 m,
// u64 seed, m u64 indices, m f64 values.
namespace detail {

inline void put_u64(std::string& s, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline std::uint64_t get_u64(const std::string& s, std::size_t& pos) {
    if (pos + 8 > s.size()) throw IoError("truncated measurement record");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[pos + i])) << (8 * i);
    pos += 8;
    return v;
}

}  // namespace detail

inline std::string serialize_measurements(const Measurements& meas) {
    std::string s;
    const std::uint32_t tag = meas.op.domain == SensingDomain::fourier ? 0 : 1;
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((tag >> (8 * i)) & 0xffu));
    detail::put_u64(s, meas.op.width);
    detail::put_u64(s, meas.op.height);
    detail::put_u64(s, meas.op.m());
    detail::put_u64(s, meas.seed);
    for (std::size_t k : meas.op.kept) detail::put_u64(s, k);
    for (double v : meas.values) detail::put_u64(s, std::bit_cast<std::uint64_t>(v));
    return s;
}

inline Measurements deserialize_measurements(const std::string& s) {
    if (s.size() < 4) throw IoError("truncated measurement record");
    std::uint32_t tag = 0;
    for (int i = 0; i < 4; ++i) tag |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[i])) << (8 * i);
    if (tag > 1) throw ValidationError("unsupported sensing domain tag");
    std::size_t pos = 4;
    Measurements meas;
    meas.op.domain = tag == 0 ? SensingDomain::fourier : SensingDomain::dct;
    meas.op.width = detail::get_u64(s, pos);
    meas.op.height = detail::get_u64(s, pos);
    const std::uint64_t m = detail::get_u64(s, pos);
    meas.seed = detail::get_u64(s, pos);
    if (m > (s.size() - pos) / 16 || s.size() - pos != m * 16) throw IoError("measurement record length mismatch");
    meas.op.kept.resize(m);
    meas.values.resize(m);
    for (auto& k : meas.op.kept) k = detail::get_u64(s, pos);
    for (auto& v : meas.values) v = std::bit_cast<double>(detail::get_u64(s, pos));
    meas.op.validate();
    return meas;
}

inline void save_measurements(const Measurements& meas, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    const auto s = serialize_measurements(meas);
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw IoError("failed writing '" + path + "'");
}

inline Measurements load_measurements(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return deserialize_measurements(s);
}

}  // namespace meshcs
