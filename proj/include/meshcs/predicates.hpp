#pragma once

// Exact orientation and in-circle tests.
//
// Each predicate first evaluates the determinant in double precision together
// with a forward error bound. Only when the sign cannot be certified does it
// recompute the determinant exactly using floating-point expansions
// (non-overlapping sums of doubles, Priest/Shewchuk style). Inputs are plain
// doubles; results are the exact sign of the real determinant.

#include <cmath>
#include <limits>
#include <vector>

namespace meshcs {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

namespace exact {

/// A real number represented exactly as a sum of non-overlapping doubles,
/// ordered by increasing magnitude. Zero components are eliminated.
class Expansion {
public:
    Expansion() = default;
    explicit Expansion(double v) {
        if (v != 0.0) c_.push_back(v);
    }

    static Expansion diff(double a, double b) {
        Expansion e;
        const double x = a - b;
        const double y = two_diff_tail(a, b, x);
        if (y != 0.0) e.c_.push_back(y);
        if (x != 0.0) e.c_.push_back(x);
        return e;
    }

    int sign() const noexcept { return c_.empty() ? 0 : (c_.back() > 0.0 ? 1 : -1); }
    double estimate() const noexcept {
        double s = 0.0;
        for (double v : c_) s += v;
        return s;
    }

    friend Expansion operator+(const Expansion& e, const Expansion& f) {
        Expansion r = e;
        for (double v : f.c_) r.grow(v);
        return r;
    }
    friend Expansion operator-(const Expansion& e, const Expansion& f) {
        Expansion r = e;
        for (double v : f.c_) r.grow(-v);
        return r;
    }
    friend Expansion operator*(const Expansion& e, const Expansion& f) {
        Expansion r;
        for (double v : f.c_) r = r + e.scaled(v);
        return r;
    }

private:
    static double two_sum_tail(double a, double b, double x) {
        const double bv = x - a;
        const double av = x - bv;
        return (a - av) + (b - bv);
    }
    static double two_diff_tail(double a, double b, double x) {
        const double bv = a - x;
        const double av = x + bv;
        return (a - av) + (bv - b);
    }

    // Adds a single double (Shewchuk's GROW-EXPANSION with zero elimination).
    void grow(double b) {
        std::vector<double> out;
        out.reserve(c_.size() + 1);
        double q = b;
        for (double e : c_) {
            const double sum = q + e;
            const double tail = two_sum_tail(q, e, sum);
            q = sum;
            if (tail != 0.0) out.push_back(tail);
        }
        if (q != 0.0) out.push_back(q);
        c_ = std::move(out);
    }

    // SCALE-EXPANSION with zero elimination; products split exactly via fma.
    Expansion scaled(double b) const {
        Expansion r;
        if (c_.empty() || b == 0.0) return r;
        double q = c_[0] * b;
        double tail = std::fma(c_[0], b, -q);
        if (tail != 0.0) r.c_.push_back(tail);
        for (std::size_t i = 1; i < c_.size(); ++i) {
            const double p = c_[i] * b;
            const double ptail = std::fma(c_[i], b, -p);
            double sum = q + ptail;
            tail = two_sum_tail(q, ptail, sum);
            if (tail != 0.0) r.c_.push_back(tail);
            const double nq = p + sum;
            tail = two_sum_tail(p, sum, nq);
            if (tail != 0.0) r.c_.push_back(tail);
            q = nq;
        }
        if (q != 0.0) r.c_.push_back(q);
        return r;
    }

    std::vector<double> c_;
};

inline constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;

}  // namespace exact

/// Exact determinant sign of (a - c) x (b - c): +1 when a, b, c turn
/// counterclockwise, -1 clockwise, 0 collinear.
inline int orient2d(const Point2& a, const Point2& b, const Point2& c) {
    const double detl = (a.x - c.x) * (b.y - c.y);
    const double detr = (a.y - c.y) * (b.x - c.x);
    const double det = detl - detr;
    const double bound = (3.0 + 16.0 * exact::kEps) * exact::kEps * (std::fabs(detl) + std::fabs(detr));
    if (det > bound) return 1;
    if (-det > bound) return -1;

    using exact::Expansion;
    const Expansion acx = Expansion::diff(a.x, c.x), bcx = Expansion::diff(b.x, c.x);
    const Expansion acy = Expansion::diff(a.y, c.y), bcy = Expansion::diff(b.y, c.y);
    return (acx * bcy - acy * bcx).sign();
}

/// Exact sign of the in-circle determinant: +1 when d lies strictly inside the
/// circle through a, b, c (given counterclockwise), 0 on it, -1 outside.
inline int incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double alift = adx * adx + ady * ady;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double blift = bdx * bdx + bdy * bdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double clift = cdx * cdx + cdy * cdy;

    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                             (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                             (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
    const double bound = (10.0 + 96.0 * exact::kEps) * exact::kEps * permanent;
    if (det > bound) return 1;
    if (-det > bound) return -1;

    using exact::Expansion;
    const Expansion ex = Expansion::diff(a.x, d.x), ey = Expansion::diff(a.y, d.y);
    const Expansion fx = Expansion::diff(b.x, d.x), fy = Expansion::diff(b.y, d.y);
    const Expansion gx = Expansion::diff(c.x, d.x), gy = Expansion::diff(c.y, d.y);
    const Expansion al = ex * ex + ey * ey;
    const Expansion bl = fx * fx + fy * fy;
    const Expansion cl = gx * gx + gy * gy;
    const Expansion full = al * (fx * gy - gx * fy) + bl * (gx * ey - ex * gy) + cl * (ex * fy - fx * ey);
    return full.sign();
}

/// Twice the signed area of triangle abc (floating point, not exact).
inline double signed_area2(const Point2& a, const Point2& b, const Point2& c) noexcept {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

}  // namespace meshcs
