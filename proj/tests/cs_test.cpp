#include <meshcs/cs.hpp>
#include <meshcs/metrics.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace meshcs;

namespace {

GrayImage random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 255.0);
    std::vector<double> d(w * h);
    for (auto& v : d) v = u(rng);
    return GrayImage(w, h, d);
}

// Two-region piecewise-constant test image: a disc on a flat background.
GrayImage disc_phantom(std::size_t n) {
    std::vector<double> d(n * n);
    const double c = (static_cast<double>(n) - 1) / 2, r = static_cast<double>(n) * 0.3;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double y = static_cast<double>(i) - c, x = static_cast<double>(j) - c + 4;
            d[i * n + j] = x * x + y * y < r * r ? 200.0 : 50.0;
        }
    return GrayImage(n, n, d);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double max_abs_diff(const GrayImage& a, const GrayImage& b) {
    double m = 0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.pixels()[k] - b.pixels()[k]));
    return m;
}

// Direct O(N^2) DFT of one coefficient, independent of the library's packing.
std::complex<double> dft_coefficient(const GrayImage& img, std::size_t ky, std::size_t kx) {
    const double w = static_cast<double>(img.width()), h = static_cast<double>(img.height());
    std::complex<double> s = 0;
    for (std::size_t i = 0; i < img.height(); ++i)
        for (std::size_t j = 0; j < img.width(); ++j) {
            const double ph = -2 * M_PI * (static_cast<double>(ky * i) / h + static_cast<double>(kx * j) / w);
            s += img.at(i, j) * std::complex<double>(std::cos(ph), std::sin(ph));
        }
    return s / std::sqrt(w * h);
}

constexpr SensingDomain kDomains[] = {SensingDomain::fourier, SensingDomain::dct};

}  // namespace

TEST(Transforms, ConstantImageHasOnlyDc) {
    const GrayImage img(16, 12, std::vector<double>(16 * 12, 77.0));
    for (auto d : kDomains) {
        const auto c = transform_forward(img, d);
        EXPECT_NEAR(c[0], 77.0 * std::sqrt(16.0 * 12.0), 1e-10);
        for (std::size_t k = 1; k < c.size(); ++k) EXPECT_NEAR(c[k], 0.0, 1e-10) << to_string(d) << " k=" << k;
    }
}

TEST(Transforms, RoundTripAndParseval) {
    for (auto d : kDomains)
        for (auto [w, h] : {std::pair<std::size_t, std::size_t>{16, 16}, {15, 8}, {7, 9}}) {
            const GrayImage img = random_image(w, h, 3);
            SensingTransform t(w, h, d);
            const auto c = t.forward(img.pixels());
            const auto back = t.inverse(c);
            for (std::size_t k = 0; k < back.size(); ++k) EXPECT_NEAR(back[k], img.pixels()[k], 1e-10);
            EXPECT_NEAR(std::sqrt(dot(c, c)), std::sqrt(dot(img.pixels(), img.pixels())), 1e-9);
        }
}

TEST(Transforms, FourierPackingMatchesDirectDft) {
    const GrayImage img = random_image(6, 5, 4);
    const auto c = transform_forward(img, SensingDomain::fourier);
    for (std::size_t k = 0; k < c.size(); ++k) {
        const std::size_t p = conjugate_partner(k, 6, 5);
        const std::size_t r = std::min(k, p);
        const auto x = dft_coefficient(img, r / 6, r % 6);
        const double expect = p == k ? x.real() : (k < p ? std::sqrt(2.0) * x.real() : std::sqrt(2.0) * x.imag());
        EXPECT_NEAR(c[k], expect, 1e-9) << "k=" << k;
    }
}

TEST(Transforms, InverseOfUnitCoefficientIsUnitNorm) {
    // Orthonormal basis vectors: each inverse of e_k has norm 1 and they are
    // mutually orthogonal (checked on a small grid).
    for (auto d : kDomains) {
        SensingTransform t(4, 6, d);
        std::vector<std::vector<double>> basis;
        for (std::size_t k = 0; k < 24; ++k) {
            std::vector<double> e(24, 0.0);
            e[k] = 1;
            basis.push_back(t.inverse(e));
        }
        for (std::size_t a = 0; a < 24; ++a)
            for (std::size_t b = 0; b < 24; ++b) EXPECT_NEAR(dot(basis[a], basis[b]), a == b ? 1.0 : 0.0, 1e-12);
    }
}

TEST(Transforms, HaarRoundTripParsevalAndOddDimensions) {
    for (auto [w, h] : {std::pair<std::size_t, std::size_t>{16, 16}, {12, 20}, {9, 6}}) {
        HaarTransform haar(w, h);
        const GrayImage img = random_image(w, h, 5);
        std::vector<double> c(w * h), back(w * h);
        haar.forward(img.pixels(), c);
        haar.inverse(c, back);
        for (std::size_t k = 0; k < back.size(); ++k) EXPECT_NEAR(back[k], img.pixels()[k], 1e-10);
        EXPECT_NEAR(dot(c, c), dot(img.pixels(), img.pixels()), 1e-6);
    }
    EXPECT_EQ(HaarTransform(16, 16).levels(), 4);
    EXPECT_EQ(HaarTransform(12, 20).levels(), 2);  // 12x20 -> 6x10 -> 3x5
    EXPECT_EQ(HaarTransform(9, 6).levels(), 0);
}

TEST(Transforms, RejectsBadInput) {
    EXPECT_THROW(sensing_domain_from_string("wavelet"), ValidationError);
    EXPECT_THROW(SensingTransform(1, 8, SensingDomain::dct), ValidationError);
}

TEST(MeasurementOp, CountFollowsRoundingRule) {
    const auto op = build_measurement_op(256, 256, 0.03, SensingDomain::fourier, 1);
    EXPECT_EQ(op.m(), 1966u);
    EXPECT_NO_THROW(op.validate());
    const auto dct = build_measurement_op(256, 256, 0.10, SensingDomain::dct, 1);
    EXPECT_EQ(dct.m(), 6554u);
    for (auto scheme : {SamplingScheme::uniform, SamplingScheme::variable_density})
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto o = build_measurement_op(32, 31, 0.137, SensingDomain::fourier, seed, scheme);
            EXPECT_NO_THROW(o.validate());
            const auto m = static_cast<std::size_t>(std::llround(0.137 * 32 * 31));
            EXPECT_TRUE(o.m() == m || o.m() + 1 == m) << o.m();
        }
}

TEST(MeasurementOp, DcAndSymmetry) {
    for (auto scheme : {SamplingScheme::uniform, SamplingScheme::variable_density}) {
        const auto op = build_measurement_op(20, 14, 0.05, SensingDomain::fourier, 9, scheme);
        EXPECT_EQ(op.kept.front(), 0u);
        for (std::size_t k : op.kept)
            EXPECT_TRUE(std::binary_search(op.kept.begin(), op.kept.end(), conjugate_partner(k, 20, 14)));
    }
}

TEST(MeasurementOp, DeterministicPerSeed) {
    const auto a = build_measurement_op(64, 64, 0.1, SensingDomain::fourier, 42);
    const auto b = build_measurement_op(64, 64, 0.1, SensingDomain::fourier, 42);
    const auto c = build_measurement_op(64, 64, 0.1, SensingDomain::fourier, 43);
    EXPECT_EQ(a, b);
    EXPECT_NE(a.kept, c.kept);
}

TEST(MeasurementOp, FullDensityKeepsEverything) {
    for (auto d : kDomains) {
        const auto op = build_measurement_op(9, 8, 1.0, d, 0);
        EXPECT_EQ(op.m(), 72u);
    }
}

TEST(MeasurementOp, UniformSchemeIsUnbiased) {
    // Inclusion frequency of low vs high frequencies is balanced when uniform.
    std::size_t low = 0, high = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto op = build_measurement_op(16, 16, 0.25, SensingDomain::dct, seed, SamplingScheme::uniform);
        for (std::size_t k : op.kept) {
            if (k == 0) continue;
            ((k / 16 + k % 16) < 15 ? low : high) += 1;
        }
    }
    // 119 low vs 136 high candidates (excluding DC).
    EXPECT_NEAR(static_cast<double>(low) / static_cast<double>(high), 119.0 / 136.0, 0.05);
}

TEST(MeasurementOp, Errors) {
    EXPECT_THROW(build_measurement_op(8, 8, 0.0, SensingDomain::dct, 0), ValidationError);
    EXPECT_THROW(build_measurement_op(8, 8, 1.5, SensingDomain::dct, 0), ValidationError);
    EXPECT_THROW(build_measurement_op(8, 8, 0.001, SensingDomain::dct, 0), ValidationError);
    EXPECT_THROW(sampling_scheme_from_string("random"), ValidationError);
}

TEST(Measure, DcOfConstantImage) {
    const GrayImage img(10, 10, std::vector<double>(100, 31.0));
    for (auto d : kDomains) {
        const auto meas = measure(img, build_measurement_op(10, 10, 0.2, d, 5));
        EXPECT_NEAR(meas.values[0], 310.0, 1e-10);
    }
}

TEST(Measure, Linearity) {
    const GrayImage a = random_image(16, 16, 1), b = random_image(16, 16, 2);
    std::vector<double> sum(256);
    for (std::size_t k = 0; k < 256; ++k) sum[k] = (a.pixels()[k] + b.pixels()[k]) / 2;
    for (auto d : kDomains) {
        const auto op = build_measurement_op(16, 16, 0.3, d, 7);
        const auto ma = measure(a, op), mb = measure(b, op), ms = measure(GrayImage(16, 16, sum), op);
        for (std::size_t i = 0; i < op.m(); ++i) EXPECT_NEAR(ms.values[i], (ma.values[i] + mb.values[i]) / 2, 1e-9);
    }
}

TEST(Measure, DimensionMismatch) {
    const auto op = build_measurement_op(8, 8, 0.5, SensingDomain::dct, 0);
    EXPECT_THROW(measure(GrayImage(8, 9), op), ValidationError);
}

TEST(Measure, AdjointDotTest) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    for (auto d : kDomains)
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto op = build_measurement_op(24, 18, 0.2, d, seed);
            std::vector<double> x(op.size()), y(op.m());
            for (auto& v : x) v = g(rng);
            for (auto& v : y) v = g(rng);
            EXPECT_NEAR(dot(apply_op(op, x), y), dot(x, adjoint(op, y)), 1e-9);
        }
}

TEST(Measure, FullDensityInverts) {
    const GrayImage img = random_image(12, 10, 3);
    for (auto d : kDomains) {
        const auto op = build_measurement_op(12, 10, 1.0, d, 0);
        const auto back = adjoint(op, measure(img, op).values);
        for (std::size_t k = 0; k < back.size(); ++k) EXPECT_NEAR(back[k], img.pixels()[k], 1e-9);
    }
}

TEST(Measure, SerializationRoundTrip) {
    const GrayImage img = random_image(16, 8, 3);
    for (auto d : kDomains) {
        const auto meas = measure(img, build_measurement_op(16, 8, 0.3, d, 11), 11);
        const auto bytes = serialize_measurements(meas);
        EXPECT_EQ(bytes.size(), 4 + 32 + meas.op.m() * 16);
        EXPECT_EQ(deserialize_measurements(bytes), meas);
        EXPECT_THROW(deserialize_measurements(bytes.substr(0, bytes.size() - 1)), IoError);
    }
    // Little-endian header layout.
    const auto meas = measure(img, build_measurement_op(16, 8, 0.3, SensingDomain::dct, 11), 258);
    const auto bytes = serialize_measurements(meas);
    EXPECT_EQ(bytes[0], 1);
    EXPECT_EQ(bytes[4], 16);
    EXPECT_EQ(bytes[12], 8);
    EXPECT_EQ(static_cast<unsigned char>(bytes[28]), 2u);
    EXPECT_EQ(static_cast<unsigned char>(bytes[29]), 1u);
}

TEST(SoftThreshold, Examples) {
    const std::vector<double> v{3, -0.5, -4, 1};
    EXPECT_EQ(soft_threshold(v, 1.0), (std::vector<double>{2, 0, -3, 0}));
    EXPECT_EQ(soft_threshold(v, 0.0), v);
    EXPECT_THROW(soft_threshold(v, -1.0), ValidationError);
}

TEST(Tv, Examples) {
    EXPECT_EQ(tv_value(GrayImage(7, 5, std::vector<double>(35, 9.0))), 0.0);
    // Vertical step of height 40 between columns 2 and 3 in a 5-row image.
    std::vector<double> d(7 * 5, 10.0);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 3; j < 7; ++j) d[i * 7 + j] = 50.0;
    const GrayImage step(7, 5, d);
    EXPECT_DOUBLE_EQ(tv_value(step), 5 * 40.0);
    const auto g = tv_gradient_pair(step);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(g.dx[i * 7 + 6], 0.0);
        EXPECT_EQ(g.dy[4 * 7 + i], 0.0);
    }
    const GrayImage r = random_image(9, 9, 1);
    std::vector<double> scaled(r.pixels().begin(), r.pixels().end());
    for (auto& v : scaled) v *= 0.5;
    EXPECT_NEAR(tv_value(GrayImage(9, 9, scaled)), 0.5 * tv_value(r), 1e-9);
}

TEST(Tv, DivergenceIsNegativeAdjoint) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    const std::size_t w = 11, h = 7, n = w * h;
    std::vector<double> u(n), px(n), py(n), gx(n), gy(n), div(n);
    for (auto* v : {&u, &px, &py})
        for (auto& x : *v) x = g(rng);
    gradient(u, w, h, gx, gy);
    divergence(px, py, w, h, div);
    EXPECT_NEAR(dot(gx, px) + dot(gy, py), -dot(u, div), 1e-10);
}

TEST(Ista, FullDensityExact) {
    const GrayImage img = random_image(64, 64, 21);
    SolverConfig cfg = SolverConfig::ista_defaults();
    cfg.threshold_fraction = 0;
    for (auto d : kDomains) {
        const auto meas = measure(img, build_measurement_op(64, 64, 1.0, d, 0));
        EXPECT_LE(max_abs_diff(reconstruct_ista(meas, cfg).image, img), 1e-6);
    }
}

TEST(Ista, ClosedFormUnderCompleteSampling) {
    // With every coefficient measured, the minimizer is the soft-thresholded
    // Haar expansion of the image (detail bands only).
    const GrayImage img = random_image(32, 32, 5);
    const auto meas = measure(img, build_measurement_op(32, 32, 1.0, SensingDomain::dct, 0));
    SolverConfig cfg;
    cfg.continuation_factor = 1.0;
    cfg.threshold_fraction = 0.1;
    const auto rec = reconstruct_ista(meas, cfg);
    EXPECT_TRUE(rec.report.converged);

    HaarTransform haar(32, 32);
    std::vector<double> c(1024), x(1024);
    haar.forward(img.pixels(), c);
    double max_detail = 0;
    for (std::size_t k = 0; k < c.size(); ++k)
        if (!haar.is_approximation(k)) max_detail = std::max(max_detail, std::abs(c[k]));
    const double lambda = 0.1 * max_detail;
    for (std::size_t k = 0; k < c.size(); ++k)
        if (!haar.is_approximation(k)) c[k] = std::abs(c[k]) > lambda ? c[k] - std::copysign(lambda, c[k]) : 0.0;
    haar.inverse(c, x);
    const GrayImage expect = GrayImage::clamped(32, 32, x, 8);
    EXPECT_LE(max_abs_diff(rec.image, expect), 1e-9);
}

TEST(Ista, ObjectiveMonotoneAcrossSeeds) {
    const GrayImage img = disc_phantom(48);
    SolverConfig cfg;
    cfg.record_history = true;
    cfg.max_iterations = 200;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto meas = measure(img, build_measurement_op(48, 48, 0.2, SensingDomain::fourier, seed));
        const auto rec = reconstruct_ista(meas, cfg);
        ASSERT_EQ(rec.report.history.size(), static_cast<std::size_t>(rec.report.iterations) + 1);
        for (std::size_t i = 1; i < rec.report.history.size(); ++i)
            EXPECT_LE(rec.report.history[i], rec.report.history[i - 1] * (1 + 1e-12)) << "seed " << seed << " it " << i;
    }
}

TEST(Tveq, FullDensityExact) {
    const GrayImage img = random_image(64, 64, 22);
    for (auto d : kDomains) {
        const auto meas = measure(img, build_measurement_op(64, 64, 1.0, d, 0));
        EXPECT_LE(max_abs_diff(reconstruct_tveq(meas).image, img), 1e-8);
    }
}

TEST(Tveq, ConstraintHeldEveryIteration) {
    const GrayImage img = disc_phantom(48);
    SolverConfig cfg = SolverConfig::tveq_defaults();
    cfg.record_history = true;
    cfg.max_iterations = 100;
    const auto meas = measure(img, build_measurement_op(48, 48, 0.15, SensingDomain::fourier, 3));
    const auto rec = reconstruct_tveq(meas, cfg);
    ASSERT_EQ(rec.report.history.size(), 100u);
    for (double r : rec.report.history) EXPECT_LE(r, 1e-9);
}

TEST(Tveq, RecoversPiecewiseConstantPhantom) {
    const GrayImage img = disc_phantom(64);
    const auto meas = measure(img, build_measurement_op(64, 64, 0.3, SensingDomain::fourier, 1));
    const auto rec = reconstruct_tveq(meas);
    EXPECT_GE(psnr(img, rec.image), 40.0);
    // TV of the reconstruction does not exceed the zero-filled starting point.
    EXPECT_LE(tv_value(rec.image), tv_value(GrayImage::clamped(64, 64, adjoint(meas.op, meas.values), 8)));
}

TEST(Solvers, Deterministic) {
    const GrayImage img = disc_phantom(32);
    const auto meas = measure(img, build_measurement_op(32, 32, 0.25, SensingDomain::fourier, 4));
    EXPECT_EQ(reconstruct_tveq(meas).image, reconstruct_tveq(meas).image);
    EXPECT_EQ(reconstruct_ista(meas).image, reconstruct_ista(meas).image);
}

TEST(Solvers, RejectInvalidConfig) {
    const auto meas = measure(disc_phantom(8), build_measurement_op(8, 8, 0.5, SensingDomain::dct, 0));
    SolverConfig cfg;
    cfg.max_iterations = 0;
    EXPECT_THROW(reconstruct_ista(meas, cfg), ValidationError);
    cfg = SolverConfig{};
    cfg.tolerance = -1;
    EXPECT_THROW(reconstruct_tveq(meas, cfg), ValidationError);
}
