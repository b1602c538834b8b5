#include <meshcs/predicates.hpp>

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <random>

#include "oracles.hpp"

using namespace meshcs;
using Rational = boost::multiprecision::cpp_rational;

namespace {

int orient_oracle(Point2 a, Point2 b, Point2 c) {
    const Rational ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    const Rational d = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx);
    return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

int incircle_oracle(Point2 a, Point2 b, Point2 c, Point2 d) { return oracle::incircle_rational(a, b, c, d); }

}  // namespace

TEST(Orient2d, Basic) {
    EXPECT_EQ(orient2d({0, 0}, {1, 0}, {0, 1}), 1);
    EXPECT_EQ(orient2d({0, 0}, {0, 1}, {1, 0}), -1);
    EXPECT_EQ(orient2d({0, 0}, {1, 1}, {2, 2}), 0);
}

TEST(Incircle, Basic) {
    EXPECT_EQ(incircle({0, 0}, {1, 0}, {0, 1}, {0.5, 0.5}), 1);
    EXPECT_EQ(incircle({0, 0}, {1, 0}, {0, 1}, {1, 1}), 0);
    EXPECT_EQ(incircle({0, 0}, {1, 0}, {0, 1}, {2, 2}), -1);
}

// Nearly collinear points along a line with irrational-looking slope, where the
// naive double determinant frequently has the wrong sign.
TEST(Orient2d, MatchesRationalOracleNearDegeneracy) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int disagreements_with_naive = 0;
    for (int trial = 0; trial < 4000; ++trial) {
        const Point2 a{u(rng) * 100, u(rng) * 100};
        const Point2 b{u(rng) * 100, u(rng) * 100};
        const double t = u(rng);
        Point2 c{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        c.x = std::nextafter(c.x, (trial % 3 == 0) ? 1e9 : -1e9);
        const int expect = orient_oracle(a, b, c);
        EXPECT_EQ(orient2d(a, b, c), expect);
        const double naive = (a.x - c.x) * (b.y - c.y) - (a.y - c.y) * (b.x - c.x);
        if ((naive > 0) - (naive < 0) != expect) ++disagreements_with_naive;
    }
    // The test is only meaningful if it reaches the exact fallback.
    EXPECT_GT(disagreements_with_naive, 0);
}

TEST(Incircle, MatchesRationalOracleOnPerturbedCocircularPoints) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 3000; ++trial) {
        const double cx = u(rng) * 50, cy = u(rng) * 50, r = 1 + u(rng) * 20;
        auto on = [&](double th) { return Point2{cx + r * std::cos(th), cy + r * std::sin(th)}; };
        const double t0 = u(rng) * 2.0, t1 = t0 + 1.0 + u(rng), t2 = t1 + 1.0 + u(rng);
        const Point2 a = on(t0), b = on(t1), c = on(t2);
        Point2 d = on(u(rng) * 6.283);
        if (trial % 2) d.y = std::nextafter(d.y, 1e9);
        EXPECT_EQ(incircle(a, b, c, d), incircle_oracle(a, b, c, d));
    }
}

TEST(Incircle, ExactOnIntegerLatticeSquares) {
    // Pixel lattices produce exact cocircular quadruples.
    for (int x = 0; x < 20; ++x)
        for (int y = 0; y < 20; ++y) {
            const double X = x, Y = y;
            EXPECT_EQ(incircle({X, Y}, {X + 1, Y}, {X + 1, Y + 1}, {X, Y + 1}), 0);
        }
}

// The filtered oracle must agree with pure rationals, including near-cocircular
// inputs where the double determinant is unreliable.
TEST(Incircle, FilteredOracleMatchesRational) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 5000; ++k) {
        const double r = 1 + u(rng) * 0.5, cx = u(rng) * 100, cy = u(rng) * 100;
        auto on_circle = [&] {
            const double t = u(rng) * M_PI;
            return Point2{cx + r * std::cos(t), cy + r * std::sin(t)};
        };
        const Point2 a = on_circle(), b = on_circle(), c = on_circle();
        Point2 d = on_circle();
        if (k % 2) d = {d.x + u(rng) * 1e-3, d.y};
        EXPECT_EQ(oracle::incircle_filtered(a, b, c, d), oracle::incircle_rational(a, b, c, d)) << k;
    }
}
