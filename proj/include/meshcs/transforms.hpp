#pragma once

// Orthonormal 2D transforms on row-major real images.
//
// Sensing transforms (Fourier, DCT) are backed by FFTW. The Fourier transform
// is exposed through a real orthonormal basis: a conjugate pair {k, k'} with
// k < k' maps to sqrt(2) Re X_k at index k and sqrt(2) Im X_k at index k';
// self-conjugate frequencies keep Re X_k. Selecting coefficients in this
// basis is the same as selecting conjugate-symmetric DFT samples, and every
// reconstruction stays real.

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <fftw3.h>

#include "meshcs/error.hpp"
#include "meshcs/image.hpp"

namespace meshcs {

enum class SensingDomain { fourier, dct };

inline std::string to_string(SensingDomain d) { return d == SensingDomain::fourier ? "fourier" : "dct"; }

inline SensingDomain sensing_domain_from_string(const std::string& s) {
    if (s == "fourier") return SensingDomain::fourier;
    if (s == "dct") return SensingDomain::dct;
    throw ValidationError("unsupported sensing domain '" + s + "'");
}

namespace detail {

// The FFTW planner is not thread-safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
    if (!p) throw std::bad_alloc();
    return FftwBuffer<T>(p);
}

class FftwPlan {
public:
    FftwPlan() = default;
    explicit FftwPlan(fftw_plan p) : p_(p) {}
    FftwPlan(FftwPlan&& o) noexcept : p_(std::exchange(o.p_, nullptr)) {}
    FftwPlan& operator=(FftwPlan&& o) noexcept {
        std::swap(p_, o.p_);
        return *this;
    }
    ~FftwPlan() {
        if (p_) {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(p_);
        }
    }
    void execute() const { fftw_execute(p_); }

private:
    fftw_plan p_ = nullptr;
};

}  // namespace detail

/// Index of the conjugate partner of flat frequency index k on an h x w grid.
inline std::size_t conjugate_partner(std::size_t k, std::size_t width, std::size_t height) {
    const std::size_t ky = k / width, kx = k % width;
    return ((height - ky) % height) * width + (width - kx) % width;
}

/// Orthonormal sensing transform for fixed dimensions. Owns FFTW plans and
/// scratch buffers, so an instance must not be shared between threads.
class SensingTransform {
public:
    SensingTransform(std::size_t width, std::size_t height, SensingDomain domain)
        : w_(width), h_(height), domain_(domain) {
        if (w_ < 2 || h_ < 2) throw ValidationError("transform dimensions must be at least 2x2");
        const int H = static_cast<int>(h_), W = static_cast<int>(w_);
        real_ = detail::fftw_buffer<double>(w_ * h_);
        std::lock_guard lock(detail::fftw_planner_mutex());
        if (domain_ == SensingDomain::fourier) {
            half_ = detail::fftw_buffer<fftw_complex>(h_ * (w_ / 2 + 1));
            fwd_ = detail::FftwPlan(fftw_plan_dft_r2c_2d(H, W, real_.get(), half_.get(), FFTW_ESTIMATE));
            inv_ = detail::FftwPlan(fftw_plan_dft_c2r_2d(H, W, half_.get(), real_.get(), FFTW_ESTIMATE));
        } else {
            coef_ = detail::fftw_buffer<double>(w_ * h_);
            fwd_ = detail::FftwPlan(
                fftw_plan_r2r_2d(H, W, real_.get(), coef_.get(), FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE));
            inv_ = detail::FftwPlan(
                fftw_plan_r2r_2d(H, W, coef_.get(), real_.get(), FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE));
        }
    }

    std::size_t width() const noexcept { return w_; }
    std::size_t height() const noexcept { return h_; }
    std::size_t size() const noexcept { return w_ * h_; }
    SensingDomain domain() const noexcept { return domain_; }

    void forward(std::span<const double> x, std::span<double> out) {
        check(x.size());
        check(out.size());
        std::copy(x.begin(), x.end(), real_.get());
        fwd_.execute();
        if (domain_ == SensingDomain::fourier)
            unpack_fourier(out);
        else
            scale_dct_forward(out);
    }

    void inverse(std::span<const double> c, std::span<double> out) {
        check(c.size());
        check(out.size());
        if (domain_ == SensingDomain::fourier) {
            pack_fourier(c);
            inv_.execute();
            const double s = 1.0 / std::sqrt(static_cast<double>(size()));
            for (std::size_t i = 0; i < size(); ++i) out[i] = real_[i] * s;
        } else {
            scale_dct_inverse(c);
            inv_.execute();
            std::copy(real_.get(), real_.get() + size(), out.begin());
        }
    }

    std::vector<double> forward(std::span<const double> x) {
        std::vector<double> out(size());
        forward(x, out);
        return out;
    }
    std::vector<double> inverse(std::span<const double> c) {
        std::vector<double> out(size());
        inverse(c, out);
        return out;
    }

private:
    void check(std::size_t n) const {
        if (n != size()) throw ValidationError("transform length mismatch");
    }

    std::complex<double> half_at(std::size_t ky, std::size_t kx) const {
        const std::size_t hw = w_ / 2 + 1;
        if (kx < hw) return {half_[ky * hw + kx][0], half_[ky * hw + kx][1]};
        return std::conj(std::complex<double>(half_[((h_ - ky) % h_) * hw + (w_ - kx)][0],
                                              half_[((h_ - ky) % h_) * hw + (w_ - kx)][1]));
    }

    void unpack_fourier(std::span<double> out) const {
        const double s = 1.0 / std::sqrt(static_cast<double>(size()));
        const double r2 = std::sqrt(2.0);
        for (std::size_t k = 0; k < size(); ++k) {
            const std::size_t p = conjugate_partner(k, w_, h_);
            if (p == k) {
                out[k] = half_at(k / w_, k % w_).real() * s;
            } else if (k < p) {
                out[k] = r2 * half_at(k / w_, k % w_).real() * s;
            } else {
                out[k] = r2 * half_at(p / w_, p % w_).imag() * s;
            }
        }
    }

    void pack_fourier(std::span<const double> c) {
        const std::size_t hw = w_ / 2 + 1;
        const double ir2 = 1.0 / std::sqrt(2.0);
        for (std::size_t ky = 0; ky < h_; ++ky) {
            for (std::size_t kx = 0; kx < hw; ++kx) {
                const std::size_t k = ky * w_ + kx;
                const std::size_t p = conjugate_partner(k, w_, h_);
                std::complex<double> v;
                if (p == k)
                    v = c[k];
                else if (k < p)
                    v = {c[k] * ir2, c[p] * ir2};
                else
                    v = {c[p] * ir2, -c[k] * ir2};
                half_[ky * hw + kx][0] = v.real();
                half_[ky * hw + kx][1] = v.imag();
            }
        }
    }

    // FFTW's REDFT10 is unnormalized: orthonormal DCT-II scales row k by
    // sqrt(1/(4n)) for k = 0 and sqrt(1/(2n)) otherwise, per dimension.
    double dct_scale(std::size_t k, std::size_t n) const {
        return k == 0 ? std::sqrt(1.0 / (4.0 * static_cast<double>(n))) : std::sqrt(1.0 / (2.0 * static_cast<double>(n)));
    }

    void scale_dct_forward(std::span<double> out) const {
        for (std::size_t ky = 0; ky < h_; ++ky)
            for (std::size_t kx = 0; kx < w_; ++kx)
                out[ky * w_ + kx] = coef_[ky * w_ + kx] * dct_scale(ky, h_) * dct_scale(kx, w_);
    }

    // REDFT01 computes Z_0 + 2 sum Z_k cos(..); the orthonormal inverse needs
    // Z_0 = X_0 / sqrt(n) and Z_k = X_k / sqrt(2n), per dimension.
    void scale_dct_inverse(std::span<const double> c) {
        auto s = [](std::size_t k, std::size_t n) {
            return k == 0 ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0 / std::sqrt(2.0 * static_cast<double>(n));
        };
        for (std::size_t ky = 0; ky < h_; ++ky)
            for (std::size_t kx = 0; kx < w_; ++kx) coef_[ky * w_ + kx] = c[ky * w_ + kx] * s(ky, h_) * s(kx, w_);
    }

    std::size_t w_, h_;
    SensingDomain domain_;
    detail::FftwBuffer<double> real_;
    detail::FftwBuffer<double> coef_;
    detail::FftwBuffer<fftw_complex> half_;
    detail::FftwPlan fwd_, inv_;
};

inline std::vector<double> transform_forward(const GrayImage& img, SensingDomain domain) {
    SensingTransform t(img.width(), img.height(), domain);
    return t.forward(img.pixels());
}

/// Inverse transform; the result is clamped into the 8-bit intensity range.
inline GrayImage transform_inverse(std::span<const double> coeffs, std::size_t width, std::size_t height,
                                   SensingDomain domain) {
    SensingTransform t(width, height, domain);
    return GrayImage::clamped(width, height, t.inverse(coeffs), 8);
}

/// Multi-level orthonormal 2D Haar transform (Mallat layout). Levels continue
/// while both dimensions of the approximation band are even.
class HaarTransform {
public:
    HaarTransform(std::size_t width, std::size_t height, int max_levels = 64) : w_(width), h_(height) {
        if (w_ < 2 || h_ < 2) throw ValidationError("Haar transform needs at least 2x2");
        std::size_t cw = w_, ch = h_;
        while (levels_ < max_levels && cw % 2 == 0 && ch % 2 == 0) {
            cw /= 2;
            ch /= 2;
            ++levels_;
        }
        approx_w_ = cw;
        approx_h_ = ch;
        tmp_.resize(std::max(w_, h_));
    }

    int levels() const noexcept { return levels_; }

    /// True for coefficients in the coarsest approximation band.
    bool is_approximation(std::size_t k) const noexcept {
        return (k / w_) < approx_h_ && (k % w_) < approx_w_;
    }

    void forward(std::span<const double> x, std::span<double> out) {
        std::copy(x.begin(), x.end(), out.begin());
        std::size_t cw = w_, ch = h_;
        for (int l = 0; l < levels_; ++l) {
            for (std::size_t i = 0; i < ch; ++i) step_forward(out.data() + i * w_, cw, 1);
            for (std::size_t j = 0; j < cw; ++j) step_forward(out.data() + j, ch, w_);
            cw /= 2;
            ch /= 2;
        }
    }

    void inverse(std::span<const double> c, std::span<double> out) {
        std::copy(c.begin(), c.end(), out.begin());
        std::size_t cw = approx_w_, ch = approx_h_;
        for (int l = 0; l < levels_; ++l) {
            cw *= 2;
            ch *= 2;
            for (std::size_t j = 0; j < cw; ++j) step_inverse(out.data() + j, ch, w_);
            for (std::size_t i = 0; i < ch; ++i) step_inverse(out.data() + i * w_, cw, 1);
        }
    }

private:
    void step_forward(double* p, std::size_t n, std::size_t stride) {
        const double s = 1.0 / std::sqrt(2.0);
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) {
            const double a = p[(2 * i) * stride], b = p[(2 * i + 1) * stride];
            tmp_[i] = (a + b) * s;
            tmp_[half + i] = (a - b) * s;
        }
        for (std::size_t i = 0; i < n; ++i) p[i * stride] = tmp_[i];
    }

    void step_inverse(double* p, std::size_t n, std::size_t stride) {
        const double s = 1.0 / std::sqrt(2.0);
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) {
            const double a = p[i * stride], d = p[(half + i) * stride];
            tmp_[2 * i] = (a + d) * s;
            tmp_[2 * i + 1] = (a - d) * s;
        }
        for (std::size_t i = 0; i < n; ++i) p[i * stride] = tmp_[i];
    }

    std::size_t w_, h_;
    int levels_ = 0;
    std::size_t approx_w_ = 0, approx_h_ = 0;
    std::vector<double> tmp_;
};

}  // namespace meshcs
