#pragma once

// Anisotropic mesh adaptation (AMA) image representation: a fixed vertex
// budget is placed, then repeatedly redistributed to follow a Hessian-based
// metric, and the image is reconstructed by P1 interpolation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "meshcs/error.hpp"
#include "meshcs/image.hpp"
#include "meshcs/mesh.hpp"
#include "meshcs/random.hpp"

namespace meshcs {

/// Where the quadratic behind the Hessian estimate is fitted: image pixels in
/// a fixed disc around the vertex, or the vertex values of the 2-ring.
enum class HessianSource { image_window, vertex_ring };

inline std::string to_string(HessianSource s) { return s == HessianSource::image_window ? "image_window" : "vertex_ring"; }

inline HessianSource hessian_source_from_string(const std::string& s) {
    if (s == "image_window") return HessianSource::image_window;
    if (s == "vertex_ring") return HessianSource::vertex_ring;
    throw ValidationError("unsupported hessian source '" + s + "'");
}

struct AmaConfig {
    double sample_density = 0.1;
    int outer_iterations = 5;
    int smoothing_passes = 20;
    // Absolute shift added to |H|; <= 0 selects 1e-2 times the mean |H| entry,
    // floored at 1e-6 of the peak intensity.
    double hessian_regularization = 0.0;
    double anisotropy_cap = 1e4;
    HessianSource hessian_source = HessianSource::image_window;
    double fit_radius = 3.0;  // pixels, for HessianSource::image_window
    int flip_sweeps = 8;      // upper bound on edge-flip sweeps after each pass
    std::uint64_t seed = 0;

    void validate() const {
        if (!(sample_density > 0 && sample_density <= 1)) throw ValidationError("sample_density must lie in (0, 1]");
        if (outer_iterations < 1) throw ValidationError("outer_iterations must be >= 1");
        if (smoothing_passes < 0) throw ValidationError("smoothing_passes must be >= 0");
        if (!(anisotropy_cap >= 1)) throw ValidationError("anisotropy_cap must be >= 1");
        if (flip_sweeps < 0) throw ValidationError("flip_sweeps must be >= 0");
        if (!std::isfinite(hessian_regularization)) throw ValidationError("hessian_regularization must be finite");
        if (!(fit_radius >= 1)) throw ValidationError("fit_radius must be >= 1 pixel");
    }

    friend bool operator==(const AmaConfig&, const AmaConfig&) = default;
};

/// Symmetric 2x2 matrix [[a, b], [b, c]].
struct Sym2 {
    double a = 0, b = 0, c = 0;

    double det() const noexcept { return a * c - b * b; }
    double quad(double x, double y) const noexcept { return a * x * x + 2 * b * x * y + c * y * y; }
    double dot(double x0, double y0, double x1, double y1) const noexcept {
        return a * x0 * x1 + b * (x0 * y1 + y0 * x1) + c * y0 * y1;
    }
    Sym2 operator+(const Sym2& o) const noexcept { return {a + o.a, b + o.b, c + o.c}; }
    Sym2 operator*(double s) const noexcept { return {a * s, b * s, c * s}; }
    /// Cholesky-style positivity: leading minors positive.
    bool positive_definite() const noexcept { return a > 0 && det() > 0; }
    friend bool operator==(const Sym2&, const Sym2&) = default;
};

struct Eigen2 {
    double l0, l1;        // l0 >= l1
    double v0x, v0y;      // unit eigenvector of l0
};

inline Eigen2 eigen_decompose(const Sym2& m) {
    const double mean = 0.5 * (m.a + m.c);
    const double r = std::hypot(0.5 * (m.a - m.c), m.b);
    Eigen2 e{mean + r, mean - r, 1.0, 0.0};
    if (r > 0) {
        const double theta = 0.5 * std::atan2(2 * m.b, m.a - m.c);
        e.v0x = std::cos(theta);
        e.v0y = std::sin(theta);
    }
    return e;
}

inline Sym2 compose(double l0, double l1, double vx, double vy) {
    // l0 along (vx, vy), l1 along the perpendicular.
    return {l0 * vx * vx + l1 * vy * vy, (l0 - l1) * vx * vy, l0 * vy * vy + l1 * vx * vx};
}

struct MetricField {
    std::vector<Sym2> tensors;
    std::size_t fallback_count = 0;  // vertices that used the gradient fallback
    double epsilon = 0;              // regularization added before scaling
    double scale = 1;                // global normalization factor
};

/// Seeded initial vertex placement: the four corners, evenly spaced boundary
/// vertices, and jittered-grid interior vertices, Delaunay-triangulated.
/// The domain spans the pixel centers [0, w-1] x [0, h-1].
inline TriMesh initial_mesh(const GrayImage& img, double density, std::uint64_t seed) {
    if (!(density > 0 && density <= 1)) throw ValidationError("density must lie in (0, 1]");
    if (img.width() < 2 || img.height() < 2) throw ValidationError("image must be at least 2x2");
    const double W = static_cast<double>(img.width()) - 1, H = static_cast<double>(img.height()) - 1;
    const auto n = static_cast<std::size_t>(std::llround(density * static_cast<double>(img.size())));
    if (n < 4) throw ValidationError("density too small to cover the rectangle");

    // Spacing h with n = A/h^2 + L/h.
    const double L = 2 * (W + H), A = W * H;
    const double h = (L + std::sqrt(L * L + 4.0 * static_cast<double>(n) * A)) / (2.0 * static_cast<double>(n));
    auto nb = static_cast<std::size_t>(std::llround(L / h));
    nb = std::clamp<std::size_t>(nb, 4, n);
    // Interior positions must not collide with boundary vertices on very small
    // domains, so an empty interior is possible only when n == nb.
    const std::size_t ni = n - nb;

    // Distribute the non-corner boundary vertices by largest remainder.
    const std::array<double, 4> side_len{W, H, W, H};
    std::array<std::size_t, 4> per_side{};
    {
        const std::size_t extra = nb - 4;
        std::array<std::pair<double, int>, 4> rem{};
        std::size_t used = 0;
        for (int s = 0; s < 4; ++s) {
            const double share = static_cast<double>(extra) * side_len[s] / L;
            per_side[s] = static_cast<std::size_t>(std::floor(share));
            used += per_side[s];
            rem[s] = {-(share - std::floor(share)), s};
        }
        std::sort(rem.begin(), rem.end());
        for (std::size_t k = 0; used < extra; ++k, ++used) ++per_side[static_cast<std::size_t>(rem[k % 4].second)];
    }

    std::vector<Point2> pts{{0, 0}, {W, 0}, {W, H}, {0, H}};
    for (int s = 0; s < 4; ++s) {
        const std::size_t k = per_side[s];
        for (std::size_t i = 1; i <= k; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(k + 1);
            switch (s) {
                case 0: pts.push_back({t * W, 0}); break;
                case 1: pts.push_back({W, t * H}); break;
                case 2: pts.push_back({(1 - t) * W, H}); break;
                default: pts.push_back({0, (1 - t) * H}); break;
            }
        }
    }

    if (ni > 0) {
        auto gx = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(ni) * W / H)));
        gx = std::max<std::size_t>(gx, 1);
        const std::size_t gy = (ni + gx - 1) / gx;
        std::vector<std::size_t> cells(gx * gy);
        std::iota(cells.begin(), cells.end(), 0);
        Rng rng(seed);
        for (std::size_t i = cells.size(); i > 1; --i) std::swap(cells[i - 1], cells[rng.below(i)]);
        cells.resize(ni);
        std::sort(cells.begin(), cells.end());
        const double cw = W / static_cast<double>(gx), ch = H / static_cast<double>(gy);
        for (std::size_t cell : cells) {
            const double cx = static_cast<double>(cell % gx), cy = static_cast<double>(cell / gx);
            // Jitter within the central 80% of the cell keeps points apart and
            // off the boundary.
            const double ux = 0.1 + 0.8 * rng.uniform(), uy = 0.1 + 0.8 * rng.uniform();
            pts.push_back({(cx + ux) * cw, (cy + uy) * ch});
        }
    }
    return delaunay(pts);
}

namespace detail {

inline std::vector<int> two_ring(const std::vector<std::vector<int>>& nb, int v) {
    std::vector<int> ring = nb[static_cast<std::size_t>(v)];
    for (int u : nb[static_cast<std::size_t>(v)])
        for (int w : nb[static_cast<std::size_t>(u)])
            if (w != v) ring.push_back(w);
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
    return ring;
}

/// Absolute-eigenvalue version of a symmetric matrix.
inline Sym2 absolute(const Sym2& h) {
    const auto e = eigen_decompose(h);
    return compose(std::abs(e.l0), std::abs(e.l1), e.v0x, e.v0y);
}

/// Raises the smaller eigenvalue so that l_max / l_min <= cap.
inline Sym2 cap_anisotropy(const Sym2& m, double cap) {
    const auto e = eigen_decompose(m);
    const double l1 = std::max(e.l1, e.l0 / cap);
    return compose(e.l0, l1, e.v0x, e.v0y);
}

}  // namespace detail

namespace detail {

/// Second-order coefficients of a least-squares quadratic through samples
/// (dx, dy, value) given in coordinates already divided by `scale`.
class QuadraticFit {
public:
    void add(double dx, double dy, double value) {
        Eigen::Matrix<double, 6, 1> row;
        row << 1, dx, dy, 0.5 * dx * dx, dx * dy, 0.5 * dy * dy;
        normal_ += row * row.transpose();
        rhs_ += row * value;
        ++count_;
    }

    /// Hessian in unscaled coordinates, or false when underdetermined.
    bool solve(double scale, Sym2& out) const {
        if (count_ < 6) return false;
        Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 6, 6>> qr(normal_);
        qr.setThreshold(1e-10);
        if (qr.rank() < 6) return false;
        const Eigen::Matrix<double, 6, 1> c = qr.solve(rhs_);
        const double k = 1.0 / (scale * scale);
        out = {c(3) * k, c(4) * k, c(5) * k};
        return true;
    }

private:
    Eigen::Matrix<double, 6, 6> normal_ = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> rhs_ = Eigen::Matrix<double, 6, 1>::Zero();
    int count_ = 0;
};

inline bool fit_image_window(const GrayImage& img, Point2 p, double radius, Sym2& out) {
    QuadraticFit fit;
    const auto rows = static_cast<int>(img.height()), cols = static_cast<int>(img.width());
    const int i0 = std::max(0, static_cast<int>(std::ceil(p.y - radius)));
    const int i1 = std::min(rows - 1, static_cast<int>(std::floor(p.y + radius)));
    const int j0 = std::max(0, static_cast<int>(std::ceil(p.x - radius)));
    const int j1 = std::min(cols - 1, static_cast<int>(std::floor(p.x + radius)));
    for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j) {
            const double dx = (j - p.x) / radius, dy = (i - p.y) / radius;
            if (dx * dx + dy * dy > 1.0) continue;
            fit.add(dx, dy, img.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
        }
    return fit.solve(radius, out);
}

inline bool fit_vertex_ring(const TriMesh& mesh, const std::vector<std::vector<int>>& nb, std::size_t v, Sym2& out) {
    const auto ring = two_ring(nb, static_cast<int>(v));
    if (ring.size() < 6) return false;
    const Point2 pv = mesh.vertices[v];
    double spread = 0;
    for (int u : ring) {
        const Point2 q = mesh.vertices[static_cast<std::size_t>(u)];
        spread += std::hypot(q.x - pv.x, q.y - pv.y);
    }
    spread /= static_cast<double>(ring.size());
    QuadraticFit fit;
    fit.add(0, 0, mesh.values[v]);
    for (int u : ring) {
        const Point2 q = mesh.vertices[static_cast<std::size_t>(u)];
        fit.add((q.x - pv.x) / spread, (q.y - pv.y) / spread, mesh.values[static_cast<std::size_t>(u)]);
    }
    return fit.solve(spread, out);
}

/// Outer product of the least-squares gradient over the 1-ring.
inline Sym2 gradient_outer_product(const TriMesh& mesh, const std::vector<std::vector<int>>& nb, std::size_t v) {
    const Point2 pv = mesh.vertices[v];
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    Eigen::Vector2d r = Eigen::Vector2d::Zero();
    for (int u : nb[v]) {
        const Point2 q = mesh.vertices[static_cast<std::size_t>(u)];
        const Eigen::Vector2d d(q.x - pv.x, q.y - pv.y);
        A += d * d.transpose();
        r += d * (mesh.values[static_cast<std::size_t>(u)] - mesh.values[v]);
    }
    const auto lu = A.fullPivLu();
    if (!lu.isInvertible()) return {};
    const Eigen::Vector2d g = lu.solve(r);
    return {g(0) * g(0), g(0) * g(1), g(1) * g(1)};
}

}  // namespace detail

/// Hessian-based anisotropic metric per vertex.
///
/// H comes from a least-squares quadratic fit (see HessianSource). Where the
/// fit is underdetermined the outer product of the 1-ring gradient stands in
/// and `fallback_count` is incremented. The metric is |H| + eps I with the
/// anisotropy capped, scaled so that sum_K |K| sqrt(det M_K) equals the area
/// of the current element count in unit equilateral triangles.
inline MetricField compute_metric(const TriMesh& mesh, const GrayImage& img, const AmaConfig& cfg) {
    cfg.validate();
    if (!mesh.has_values()) throw ValidationError("mesh values are unset");
    if (mesh.domain.xmin < 0 || mesh.domain.ymin < 0 || mesh.domain.xmax > static_cast<double>(img.width()) - 1 ||
        mesh.domain.ymax > static_cast<double>(img.height()) - 1)
        throw ValidationError("mesh domain exceeds the image");
    const auto nb = vertex_neighbors(mesh);
    const std::size_t nv = mesh.num_vertices();
    MetricField field;
    std::vector<Sym2> hess(nv);

    for (std::size_t v = 0; v < nv; ++v) {
        Sym2 h;
        const bool fitted = cfg.hessian_source == HessianSource::image_window
                                ? detail::fit_image_window(img, mesh.vertices[v], cfg.fit_radius, h)
                                : detail::fit_vertex_ring(mesh, nb, v, h);
        if (!fitted) {
            ++field.fallback_count;
            h = detail::gradient_outer_product(mesh, nb, v);
        }
        hess[v] = detail::absolute(h);
    }

    double mean_entry = 0;
    for (const auto& h : hess) mean_entry += (std::abs(h.a) + 2 * std::abs(h.b) + std::abs(h.c)) / 4.0;
    mean_entry /= static_cast<double>(nv);
    double eps = cfg.hessian_regularization;
    // The floor keeps flat images isotropic instead of amplifying round-off.
    if (eps <= 0) eps = std::max(1e-2 * mean_entry, 1e-6 * img.peak());
    field.epsilon = eps;

    field.tensors.resize(nv);
    for (std::size_t v = 0; v < nv; ++v)
        field.tensors[v] = detail::cap_anisotropy(hess[v] + Sym2{eps, 0, eps}, cfg.anisotropy_cap);

    double demand = 0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Sym2 mk = (field.tensors[static_cast<std::size_t>(tri[0])] + field.tensors[static_cast<std::size_t>(tri[1])] +
                         field.tensors[static_cast<std::size_t>(tri[2])]) *
                        (1.0 / 3.0);
        demand += mesh.area(static_cast<int>(t)) * std::sqrt(mk.det());
    }
    field.scale = static_cast<double>(mesh.num_triangles()) * std::sqrt(3.0) / 4.0 / demand;
    for (auto& m : field.tensors) m = m * field.scale;
    return field;
}

namespace detail {

/// Metric looked up at arbitrary points by P1 interpolation of the
/// per-vertex tensors on a fixed background mesh.
class MetricInterpolator {
public:
    MetricInterpolator(TriMesh background, const MetricField& field)
        : bg_(std::move(background)), field_(&field), loc_(bg_) {}

    Sym2 at(const Point2& p) {
        const auto bc = loc_.locate(p);
        const auto& tri = bg_.triangles[static_cast<std::size_t>(bc.triangle)];
        Sym2 out;
        for (int i = 0; i < 3; ++i) out = out + field_->tensors[static_cast<std::size_t>(tri[i])] * bc.weights[i];
        return out;
    }

private:
    TriMesh bg_;
    const MetricField* field_;
    Locator loc_;
};

/// Smallest interior angle of triangle (p, q, r) measured in metric m.
inline double min_metric_angle(const Sym2& m, const Point2& p, const Point2& q, const Point2& r) {
    const Point2 pts[3] = {p, q, r};
    double best = M_PI;
    for (int i = 0; i < 3; ++i) {
        const Point2 o = pts[i], a = pts[(i + 1) % 3], b = pts[(i + 2) % 3];
        const double ax = a.x - o.x, ay = a.y - o.y, bx = b.x - o.x, by = b.y - o.y;
        const double c = m.dot(ax, ay, bx, by) / std::sqrt(m.quad(ax, ay) * m.quad(bx, by));
        best = std::min(best, std::acos(std::clamp(c, -1.0, 1.0)));
    }
    return best;
}

enum class Side { none, bottom, right, top, left };

inline Side side_of(const Rect& r, const Point2& p) {
    if (is_domain_corner(r, p)) return Side::none;
    if (p.y == r.ymin) return Side::bottom;
    if (p.y == r.ymax) return Side::top;
    if (p.x == r.xmin) return Side::left;
    if (p.x == r.xmax) return Side::right;
    return Side::none;
}

/// Flips interior edges whose flip raises the smaller metric min-angle of
/// the two triangles by more than 1e-12. The quad's metric is the mean of
/// its four vertex tensors. Returns the number of flips.
inline std::size_t metric_flip_sweeps(TriMesh& m, const std::vector<Sym2>& M, int max_sweeps) {
    std::size_t total = 0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        std::size_t flips = 0;
        for (std::size_t t = 0; t < m.num_triangles(); ++t)
            for (int i = 0; i < 3; ++i) {
                const int ti = static_cast<int>(t);
                const auto q = edge_quad(m, ti, i);
                if (q.u < ti || !can_flip(m, ti, i)) continue;  // boundary, visited, or non-convex
                const auto a = static_cast<std::size_t>(q.a), b = static_cast<std::size_t>(q.b),
                           c = static_cast<std::size_t>(q.c), d = static_cast<std::size_t>(q.d);
                const Sym2 mq = (M[a] + M[b] + M[c] + M[d]) * 0.25;
                const auto& V = m.vertices;
                const double before =
                    std::min(min_metric_angle(mq, V[a], V[b], V[c]), min_metric_angle(mq, V[d], V[c], V[b]));
                const double after =
                    std::min(min_metric_angle(mq, V[a], V[b], V[d]), min_metric_angle(mq, V[a], V[d], V[c]));
                if (after > before + 1e-12) {
                    flip_edge(m, ti, i);
                    ++flips;
                    break;  // triangle t changed shape; continue with the next one
                }
            }
        total += flips;
        if (flips == 0) break;
    }
    return total;
}

}  // namespace detail

/// One round of metric-driven relocation and flipping at fixed vertex count.
///
/// Interior vertices move to the average of their incident triangle
/// centroids weighted by |K| det(M_K): the fixed point of this centroidal
/// update spaces vertices like det(M)^(-1/4), the element size a unit metric
/// asks for. Boundary vertices slide toward the det(M)^(1/4)-weighted mean of
/// their two neighbors on the same side; corners never move. A move that
/// would invert or flatten an incident triangle is skipped. Each pass ends
/// with Delaunay-in-metric edge flips. Moved vertices take their metric from
/// the input mesh by interpolation.
inline TriMesh adapt_mesh(const TriMesh& mesh, const MetricField& metric, const AmaConfig& cfg) {
    cfg.validate();
    if (metric.tensors.size() != mesh.num_vertices()) throw ValidationError("metric does not match the mesh");
    TriMesh m = mesh;
    m.values.clear();
    if (m.boundary.size() != m.num_vertices()) mark_boundary(m);
    detail::MetricInterpolator interp(mesh, metric);
    std::vector<Sym2> M = metric.tensors;
    const std::size_t nv = m.num_vertices();
    const Rect dom = m.domain;

    auto vt = vertex_triangles(m);
    auto nb = vertex_neighbors(m);

    auto move_ok = [&](std::size_t v, const Point2& p) {
        for (int t : vt[v]) {
            const auto& tri = m.triangles[static_cast<std::size_t>(t)];
            Point2 c[3];
            for (int k = 0; k < 3; ++k)
                c[k] = static_cast<std::size_t>(tri[k]) == v ? p : m.vertices[static_cast<std::size_t>(tri[k])];
            if (orient2d(c[0], c[1], c[2]) <= 0) return false;
        }
        return true;
    };

    auto interior_target = [&](std::size_t v) {
        double sx = 0, sy = 0, sw = 0;
        for (int t : vt[v]) {
            const auto& tri = m.triangles[static_cast<std::size_t>(t)];
            Sym2 mk;
            Point2 c{0, 0};
            for (int k = 0; k < 3; ++k) {
                const auto u = static_cast<std::size_t>(tri[k]);
                mk = mk + M[u] * (1.0 / 3.0);
                c.x += m.vertices[u].x / 3.0;
                c.y += m.vertices[u].y / 3.0;
            }
            const double w = m.area(t) * mk.det();
            sx += w * c.x;
            sy += w * c.y;
            sw += w;
        }
        return std::make_pair(Point2{sx / sw, sy / sw}, sw > 0);
    };

    auto boundary_target = [&](std::size_t v, detail::Side side) {
        const Point2 pv = m.vertices[v];
        const bool horizontal = side == detail::Side::bottom || side == detail::Side::top;
        double s = 0, sw = 0;
        for (int u : nb[v]) {
            const auto uu = static_cast<std::size_t>(u);
            const Point2 pu = m.vertices[uu];
            if (!m.boundary[uu] || (horizontal ? pu.y != pv.y : pu.x != pv.x)) continue;
            const double w = std::pow(std::max(0.0, ((M[v] + M[uu]) * 0.5).det()), 0.25);
            s += w * (horizontal ? pu.x : pu.y);
            sw += w;
        }
        Point2 p = pv;
        (horizontal ? p.x : p.y) = s / sw;
        return std::make_pair(p, sw > 0);
    };

    for (int pass = 0; pass < cfg.smoothing_passes; ++pass) {
        for (std::size_t v = 0; v < nv; ++v) {
            const auto side = detail::side_of(dom, m.vertices[v]);
            if (m.boundary[v] && side == detail::Side::none) continue;  // corner
            auto [p, ok] = m.boundary[v] ? boundary_target(v, side) : interior_target(v);
            if (!ok || !std::isfinite(p.x) || !std::isfinite(p.y)) continue;
            p.x = std::clamp(p.x, dom.xmin, dom.xmax);
            p.y = std::clamp(p.y, dom.ymin, dom.ymax);
            if (p == m.vertices[v] || !move_ok(v, p)) continue;
            m.vertices[v] = p;
            M[v] = interp.at(p);
        }
        if (detail::metric_flip_sweeps(m, M, cfg.flip_sweeps) > 0) {
            vt = vertex_triangles(m);
            nb = vertex_neighbors(m);
        }
    }
    return m;
}

struct AmaResult {
    TriMesh mesh;
    GrayImage image;
    MetricField last_metric;
};

/// Initial mesh, then `outer_iterations` rounds of value assignment, metric
/// computation and adaptation, then the final P1 rasterization.
inline AmaResult ama_represent(const GrayImage& img, const AmaConfig& cfg) {
    cfg.validate();
    TriMesh mesh = initial_mesh(img, cfg.sample_density, cfg.seed);
    MetricField metric;
    for (int it = 0; it < cfg.outer_iterations; ++it) {
        mesh = assign_values(std::move(mesh), img);
        metric = compute_metric(mesh, img, cfg);
        mesh = adapt_mesh(mesh, metric, cfg);
    }
    mesh = assign_values(std::move(mesh), img);
    GrayImage out = rasterize(mesh, img.width(), img.height());
    return {std::move(mesh), std::move(out), std::move(metric)};
}

}  // namespace meshcs
