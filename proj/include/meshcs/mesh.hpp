#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "meshcs/error.hpp"
#include "meshcs/image.hpp"
#include "meshcs/predicates.hpp"

namespace meshcs {

using Triangle = std::array<int, 3>;

struct Rect {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;
    double area() const noexcept { return (xmax - xmin) * (ymax - ymin); }
    bool contains(const Point2& p) const noexcept {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Triangulation of an axis-aligned rectangle with optional per-vertex values.
///
/// Triangles are counterclockwise. `neighbors[t][i]` is the triangle across the
/// edge opposite `triangles[t][i]`, or -1 on the domain boundary. `values` is
/// empty until assigned.
struct TriMesh {
    Rect domain;
    std::vector<Point2> vertices;
    std::vector<Triangle> triangles;
    std::vector<Triangle> neighbors;
    std::vector<double> values;
    std::vector<std::uint8_t> boundary;

    std::size_t num_vertices() const noexcept { return vertices.size(); }
    std::size_t num_triangles() const noexcept { return triangles.size(); }
    bool has_values() const noexcept { return values.size() == vertices.size() && !values.empty(); }

    Point2 corner(int t, int i) const { return vertices[static_cast<std::size_t>(triangles[t][i])]; }

    double area(int t) const {
        return 0.5 * signed_area2(corner(t, 0), corner(t, 1), corner(t, 2));
    }
};

inline bool on_domain_boundary(const Rect& r, const Point2& p) noexcept {
    return p.x == r.xmin || p.x == r.xmax || p.y == r.ymin || p.y == r.ymax;
}

inline bool is_domain_corner(const Rect& r, const Point2& p) noexcept {
    return (p.x == r.xmin || p.x == r.xmax) && (p.y == r.ymin || p.y == r.ymax);
}

inline void mark_boundary(TriMesh& m) {
    m.boundary.assign(m.vertices.size(), 0);
    for (std::size_t v = 0; v < m.vertices.size(); ++v)
        m.boundary[v] = on_domain_boundary(m.domain, m.vertices[v]) ? 1 : 0;
}

/// Recomputes `neighbors` from `triangles`. Throws if an edge is shared by more
/// than two triangles or twice with the same orientation.
inline void build_adjacency(TriMesh& m) {
    const auto nt = m.triangles.size();
    m.neighbors.assign(nt, Triangle{-1, -1, -1});
    std::unordered_map<std::uint64_t, std::pair<int, int>> half;
    half.reserve(nt * 3);
    auto key = [](int a, int b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    };
    for (std::size_t t = 0; t < nt; ++t)
        for (int i = 0; i < 3; ++i) {
            const int a = m.triangles[t][(i + 1) % 3];
            const int b = m.triangles[t][(i + 2) % 3];
            if (!half.emplace(key(a, b), std::pair{static_cast<int>(t), i}).second)
                throw ValidationError("edge used twice with the same orientation");
        }
    for (const auto& [k, ti] : half) {
        const int a = static_cast<int>(k >> 32), b = static_cast<int>(k & 0xffffffffu);
        auto it = half.find(key(b, a));
        if (it != half.end()) m.neighbors[static_cast<std::size_t>(ti.first)][ti.second] = it->second.first;
    }
}

namespace detail {

inline int index_of(const Triangle& tri, int v) {
    for (int i = 0; i < 3; ++i)
        if (tri[i] == v) return i;
    return -1;
}

inline void replace_neighbor(TriMesh& m, int t, int from, int to) {
    if (t < 0) return;
    for (int& n : m.neighbors[static_cast<std::size_t>(t)])
        if (n == from) {
            n = to;
            return;
        }
}

}  // namespace detail

/// The four vertices around the interior edge opposite corner i of triangle t:
/// {a, b, c, d} where t = (a, b, c) and d is the far vertex of the neighbor.
struct EdgeQuad {
    int t, u;
    int a, b, c, d;
};

inline EdgeQuad edge_quad(const TriMesh& m, int t, int i) {
    const auto& tri = m.triangles[static_cast<std::size_t>(t)];
    const int u = m.neighbors[static_cast<std::size_t>(t)][i];
    EdgeQuad q{t, u, tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3], -1};
    if (u >= 0) {
        const auto& nt = m.triangles[static_cast<std::size_t>(u)];
        for (int j = 0; j < 3; ++j)
            if (nt[j] != q.b && nt[j] != q.c) q.d = nt[j];
    }
    return q;
}

/// True when both triangles produced by flipping the edge have positive area.
inline bool can_flip(const TriMesh& m, int t, int i) {
    const EdgeQuad q = edge_quad(m, t, i);
    if (q.u < 0) return false;
    const auto& V = m.vertices;
    return orient2d(V[q.a], V[q.b], V[q.d]) > 0 && orient2d(V[q.a], V[q.d], V[q.c]) > 0;
}

/// Replaces the diagonal (b, c) of the quad around edge (t, i) with (a, d).
/// Triangle indices t and u are reused: t becomes (a, b, d), u becomes (a, d, c).
inline void flip_edge(TriMesh& m, int t, int i) {
    const EdgeQuad q = edge_quad(m, t, i);
    if (q.u < 0) throw ValidationError("cannot flip a boundary edge");
    const int u = q.u;
    const auto tu = static_cast<std::size_t>(t);
    const auto uu = static_cast<std::size_t>(u);
    const int j = detail::index_of(m.triangles[uu], q.d);

    const int n_ca = m.neighbors[tu][(i + 1) % 3];
    const int n_ab = m.neighbors[tu][(i + 2) % 3];
    const int n_bd = m.neighbors[uu][(j + 1) % 3];
    const int n_dc = m.neighbors[uu][(j + 2) % 3];

    m.triangles[tu] = {q.a, q.b, q.d};
    m.neighbors[tu] = {n_bd, u, n_ab};
    m.triangles[uu] = {q.a, q.d, q.c};
    m.neighbors[uu] = {n_dc, n_ca, t};
    detail::replace_neighbor(m, n_bd, u, t);
    detail::replace_neighbor(m, n_ca, t, u);
}

/// Every triangle incident to vertex v, given one incident triangle t.
inline std::vector<int> triangles_around(const TriMesh& m, int v, int t) {
    std::vector<int> out;
    // Rotate counterclockwise (across the edge following v) until we return or hit the boundary.
    int cur = t;
    do {
        out.push_back(cur);
        const int i = detail::index_of(m.triangles[static_cast<std::size_t>(cur)], v);
        cur = m.neighbors[static_cast<std::size_t>(cur)][(i + 2) % 3];
    } while (cur >= 0 && cur != t);
    if (cur == t) return out;
    cur = t;
    for (;;) {
        const int i = detail::index_of(m.triangles[static_cast<std::size_t>(cur)], v);
        cur = m.neighbors[static_cast<std::size_t>(cur)][(i + 1) % 3];
        if (cur < 0) break;
        out.push_back(cur);
    }
    return out;
}

/// Per-vertex incident triangle lists.
inline std::vector<std::vector<int>> vertex_triangles(const TriMesh& m) {
    std::vector<std::vector<int>> vt(m.vertices.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t)
        for (int v : m.triangles[t]) vt[static_cast<std::size_t>(v)].push_back(static_cast<int>(t));
    return vt;
}

/// Per-vertex sorted neighbor lists (1-ring).
inline std::vector<std::vector<int>> vertex_neighbors(const TriMesh& m) {
    std::vector<std::vector<int>> nb(m.vertices.size());
    for (const auto& tri : m.triangles)
        for (int i = 0; i < 3; ++i) {
            auto& list = nb[static_cast<std::size_t>(tri[i])];
            list.push_back(tri[(i + 1) % 3]);
            list.push_back(tri[(i + 2) % 3]);
        }
    for (auto& list : nb) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return nb;
}

/// Structural problems of a mesh; empty when the mesh is a valid tiling of its
/// domain rectangle.
inline std::vector<std::string> check_mesh(const TriMesh& m) {
    std::vector<std::string> issues;
    const auto nv = static_cast<int>(m.vertices.size());
    for (const auto& p : m.vertices)
        if (!m.domain.contains(p)) {
            issues.push_back("vertex outside domain");
            break;
        }
    for (double x : {m.domain.xmin, m.domain.xmax})
        for (double y : {m.domain.ymin, m.domain.ymax})
            if (std::find(m.vertices.begin(), m.vertices.end(), Point2{x, y}) == m.vertices.end())
                issues.push_back("missing domain corner");

    double total = 0.0;
    std::unordered_map<std::uint64_t, int> edge_count;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        bool ok = true;
        for (int i = 0; i < 3; ++i) ok = ok && tri[i] >= 0 && tri[i] < nv;
        if (!ok || tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
            issues.push_back("triangle " + std::to_string(t) + " has invalid indices");
            continue;
        }
        if (orient2d(m.corner(static_cast<int>(t), 0), m.corner(static_cast<int>(t), 1),
                     m.corner(static_cast<int>(t), 2)) <= 0)
            issues.push_back("triangle " + std::to_string(t) + " is not counterclockwise");
        total += m.area(static_cast<int>(t));
        for (int i = 0; i < 3; ++i) {
            const auto a = static_cast<std::uint32_t>(std::min(tri[i], tri[(i + 1) % 3]));
            const auto b = static_cast<std::uint32_t>(std::max(tri[i], tri[(i + 1) % 3]));
            ++edge_count[(static_cast<std::uint64_t>(a) << 32) | b];
        }
    }
    for (const auto& [k, count] : edge_count) {
        const auto a = static_cast<std::size_t>(k >> 32);
        const auto b = static_cast<std::size_t>(k & 0xffffffffu);
        if (count > 2) issues.push_back("edge shared by more than two triangles");
        if (count == 1) {
            const Point2 pa = m.vertices[a], pb = m.vertices[b];
            const Rect& r = m.domain;
            const bool on_side = (pa.x == pb.x && (pa.x == r.xmin || pa.x == r.xmax)) ||
                                 (pa.y == pb.y && (pa.y == r.ymin || pa.y == r.ymax));
            if (!on_side) issues.push_back("open edge inside the domain");
        }
    }
    const double expect = m.domain.area();
    if (std::fabs(total - expect) > 1e-8 * expect) issues.push_back("triangle areas do not sum to the domain area");
    return issues;
}

namespace detail {

// Incremental Bowyer-Watson triangulation of points inside a rectangle whose
// four corners are part of the input.
class DelaunayBuilder {
public:
    DelaunayBuilder(std::span<const Point2> pts, const Rect& r) : pts_(pts.begin(), pts.end()), rect_(r) {}

    TriMesh build(const std::array<int, 4>& corners) {
        // corners: (xmin,ymin), (xmax,ymin), (xmax,ymax), (xmin,ymax).
        const int c0 = corners[0], c1 = corners[1], c2 = corners[2], c3 = corners[3];
        // The four corners are cocircular; pick the diagonal with the lower index sum.
        if (c0 + c2 <= c1 + c3) {
            tri_ = {{c0, c1, c2}, {c0, c2, c3}};
            nbr_ = {{-1, 1, -1}, {-1, -1, 0}};
        } else {
            tri_ = {{c1, c2, c3}, {c1, c3, c0}};
            nbr_ = {{-1, 1, -1}, {-1, -1, 0}};
        }
        alive_ = {1, 1};
        mark_.assign(2, 0);
        for (std::size_t v = 0; v < pts_.size(); ++v) {
            const int iv = static_cast<int>(v);
            if (iv == c0 || iv == c1 || iv == c2 || iv == c3) continue;
            insert(iv);
        }

        TriMesh m;
        m.domain = rect_;
        m.vertices = pts_;
        for (std::size_t t = 0; t < tri_.size(); ++t)
            if (alive_[t]) m.triangles.push_back(tri_[t]);
        build_adjacency(m);
        canonicalize_cocircular(m);
        mark_boundary(m);
        return m;
    }

private:
    int walk(const Point2& p) {
        int t = last_;
        const std::size_t limit = 4 * tri_.size() + 16;
        for (std::size_t step = 0; step < limit; ++step) {
            bool inside = true;
            for (int k = 0; k < 3; ++k) {
                const int i = static_cast<int>((k + step) % 3);
                const auto& tri = tri_[static_cast<std::size_t>(t)];
                if (orient2d(pts_[tri[(i + 1) % 3]], pts_[tri[(i + 2) % 3]], p) < 0) {
                    const int n = nbr_[static_cast<std::size_t>(t)][i];
                    if (n < 0) throw ValidationError("point outside the triangulated rectangle");
                    t = n;
                    inside = false;
                    break;
                }
            }
            if (inside) return t;
        }
        for (std::size_t s = 0; s < tri_.size(); ++s) {
            if (!alive_[s]) continue;
            const auto& tri = tri_[s];
            if (orient2d(pts_[tri[0]], pts_[tri[1]], p) >= 0 && orient2d(pts_[tri[1]], pts_[tri[2]], p) >= 0 &&
                orient2d(pts_[tri[2]], pts_[tri[0]], p) >= 0)
                return static_cast<int>(s);
        }
        throw ValidationError("point location failed");
    }

    bool in_circle(int t, const Point2& p) const {
        const auto& tri = tri_[static_cast<std::size_t>(t)];
        return incircle(pts_[tri[0]], pts_[tri[1]], pts_[tri[2]], p) > 0;
    }

    struct CavityEdge {
        int a, b, outer;
    };

    void insert(int v) {
        const Point2 p = pts_[static_cast<std::size_t>(v)];
        const int start = walk(p);
        ++stamp_;
        std::vector<int> cavity{start};
        mark_[static_cast<std::size_t>(start)] = stamp_;
        for (std::size_t k = 0; k < cavity.size(); ++k) {
            const int t = cavity[k];
            for (int n : nbr_[static_cast<std::size_t>(t)])
                if (n >= 0 && mark_[static_cast<std::size_t>(n)] != stamp_ && in_circle(n, p)) {
                    mark_[static_cast<std::size_t>(n)] = stamp_;
                    cavity.push_back(n);
                }
        }
        std::vector<CavityEdge> rim;
        for (int t : cavity) {
            const auto& tri = tri_[static_cast<std::size_t>(t)];
            for (int i = 0; i < 3; ++i) {
                const int n = nbr_[static_cast<std::size_t>(t)][i];
                if (n >= 0 && mark_[static_cast<std::size_t>(n)] == stamp_) continue;
                rim.push_back({tri[(i + 1) % 3], tri[(i + 2) % 3], n});
            }
        }
        for (int t : cavity) {
            alive_[static_cast<std::size_t>(t)] = 0;
            free_.push_back(t);
        }

        std::vector<std::pair<int, int>> made;  // (rim start vertex, new triangle)
        for (const auto& e : rim) {
            // p on a boundary edge of the rectangle: that edge is split, not fanned.
            if (orient2d(pts_[e.a], pts_[e.b], p) <= 0) continue;
            const int t = allocate();
            tri_[static_cast<std::size_t>(t)] = {e.a, e.b, v};
            nbr_[static_cast<std::size_t>(t)] = {-1, -1, e.outer};
            if (e.outer >= 0) {
                auto& on = nbr_[static_cast<std::size_t>(e.outer)];
                const auto& ot = tri_[static_cast<std::size_t>(e.outer)];
                for (int j = 0; j < 3; ++j)
                    if (ot[(j + 1) % 3] == e.b && ot[(j + 2) % 3] == e.a) on[j] = t;
            }
            made.emplace_back(e.a, t);
        }
        for (const auto& [a, t] : made) {
            const int b = tri_[static_cast<std::size_t>(t)][1];
            for (const auto& [a2, t2] : made) {
                if (a2 == b) nbr_[static_cast<std::size_t>(t)][0] = t2;
                if (tri_[static_cast<std::size_t>(t2)][1] == a) nbr_[static_cast<std::size_t>(t)][1] = t2;
            }
        }
        last_ = made.empty() ? 0 : made.front().second;
    }

    int allocate() {
        if (!free_.empty()) {
            const int t = free_.back();
            free_.pop_back();
            alive_[static_cast<std::size_t>(t)] = 1;
            return t;
        }
        tri_.push_back({});
        nbr_.push_back({-1, -1, -1});
        alive_.push_back(1);
        mark_.push_back(0);
        return static_cast<int>(tri_.size() - 1);
    }

    // Among cocircular configurations, keep the diagonal with the lowest
    // combined vertex index. Each flip lowers the total edge index sum, so the
    // sweep terminates.
    static void canonicalize_cocircular(TriMesh& m) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t t = 0; t < m.triangles.size(); ++t) {
                for (int i = 0; i < 3; ++i) {
                    const EdgeQuad q = edge_quad(m, static_cast<int>(t), i);
                    if (q.u < 0 || q.a + q.d >= q.b + q.c) continue;
                    const auto& V = m.vertices;
                    if (incircle(V[q.a], V[q.b], V[q.c], V[q.d]) != 0) continue;
                    if (!can_flip(m, static_cast<int>(t), i)) continue;
                    flip_edge(m, static_cast<int>(t), i);
                    changed = true;
                    break;
                }
            }
        }
    }

    std::vector<Point2> pts_;
    Rect rect_;
    std::vector<Triangle> tri_;
    std::vector<Triangle> nbr_;
    std::vector<std::uint8_t> alive_;
    std::vector<std::uint32_t> mark_;
    std::vector<int> free_;
    std::uint32_t stamp_ = 0;
    int last_ = 0;
};

}  // namespace detail

/// Delaunay triangulation of points covering a rectangle.
///
/// The bounding rectangle of the input becomes the mesh domain and its four
/// corners must be among the points. Points are inserted in input order;
/// cocircular ties resolve to the diagonal with the lowest index sum.
inline TriMesh delaunay(std::span<const Point2> points) {
    if (points.size() < 3) throw ValidationError("delaunay needs at least 3 points");
    Rect r{points[0].x, points[0].y, points[0].x, points[0].y};
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ValidationError("non-finite point");
        r.xmin = std::min(r.xmin, p.x);
        r.xmax = std::max(r.xmax, p.x);
        r.ymin = std::min(r.ymin, p.y);
        r.ymax = std::max(r.ymax, p.y);
    }
    if (r.xmin == r.xmax || r.ymin == r.ymax) throw ValidationError("all points are collinear");

    std::vector<int> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& pa = points[static_cast<std::size_t>(a)];
        const auto& pb = points[static_cast<std::size_t>(b)];
        return pa.x < pb.x || (pa.x == pb.x && pa.y < pb.y);
    });
    constexpr double kMinSeparation = 1e-9;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& pi = points[static_cast<std::size_t>(order[i])];
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const auto& pj = points[static_cast<std::size_t>(order[j])];
            if (pj.x - pi.x > kMinSeparation) break;
            if (std::hypot(pj.x - pi.x, pj.y - pi.y) <= kMinSeparation)
                throw ValidationError("duplicate points " + std::to_string(order[i]) + " and " +
                                      std::to_string(order[j]));
        }
    }

    std::array<int, 4> corners{-1, -1, -1, -1};
    const Point2 want[4] = {{r.xmin, r.ymin}, {r.xmax, r.ymin}, {r.xmax, r.ymax}, {r.xmin, r.ymax}};
    for (std::size_t i = 0; i < points.size(); ++i)
        for (int c = 0; c < 4; ++c)
            if (corners[c] < 0 && points[i] == want[c]) corners[c] = static_cast<int>(i);
    if (std::find(corners.begin(), corners.end(), -1) != corners.end())
        throw ValidationError("the four corners of the bounding rectangle must be input points");

    return detail::DelaunayBuilder(points, r).build(corners);
}

struct BarycentricCoords {
    int triangle = -1;
    std::array<double, 3> weights{};
};

/// Walking point locator. Holds a hint, so one instance per thread.
class Locator {
public:
    explicit Locator(const TriMesh& mesh) : mesh_(&mesh) {}

    /// Containing triangle and barycentric weights of q. Points on shared edges
    /// or vertices resolve to the lowest-index containing triangle.
    BarycentricCoords locate(const Point2& q) {
        const TriMesh& m = *mesh_;
        if (!m.domain.contains(q)) throw DomainError("point outside the mesh domain");
        if (m.triangles.empty()) throw DomainError("empty mesh");
        int t = walk(q);

        std::array<int, 3> s{};
        for (int i = 0; i < 3; ++i) s[i] = orient2d(m.corner(t, (i + 1) % 3), m.corner(t, (i + 2) % 3), q);
        const int zeros = static_cast<int>(std::count(s.begin(), s.end(), 0));
        if (zeros == 1) {
            const int i = static_cast<int>(std::find(s.begin(), s.end(), 0) - s.begin());
            const int n = m.neighbors[static_cast<std::size_t>(t)][i];
            if (n >= 0 && n < t) t = n;
        } else if (zeros == 2) {
            const int k = static_cast<int>(std::find_if(s.begin(), s.end(), [](int v) { return v != 0; }) - s.begin());
            const int v = m.triangles[static_cast<std::size_t>(t)][k];
            const auto ring = triangles_around(m, v, t);
            t = *std::min_element(ring.begin(), ring.end());
        }
        hint_ = t;
        return {t, weights(t, q)};
    }

private:
    std::array<double, 3> weights(int t, const Point2& q) const {
        const TriMesh& m = *mesh_;
        std::array<double, 3> w{};
        double total = 0.0;
        for (int i = 0; i < 3; ++i) {
            const Point2 a = m.corner(t, (i + 1) % 3), b = m.corner(t, (i + 2) % 3);
            w[i] = orient2d(a, b, q) == 0 ? 0.0 : std::max(0.0, signed_area2(a, b, q));
            total += w[i];
        }
        for (double& x : w) x /= total;
        return w;
    }

    int walk(const Point2& q) const {
        const TriMesh& m = *mesh_;
        int t = hint_ >= 0 && static_cast<std::size_t>(hint_) < m.triangles.size() ? hint_ : 0;
        const std::size_t limit = 4 * m.triangles.size() + 16;
        for (std::size_t step = 0; step < limit && t >= 0; ++step) {
            int next = t;
            for (int k = 0; k < 3 && next == t; ++k) {
                const int i = static_cast<int>((k + step) % 3);
                if (orient2d(m.corner(t, (i + 1) % 3), m.corner(t, (i + 2) % 3), q) < 0)
                    next = m.neighbors[static_cast<std::size_t>(t)][i];
            }
            if (next == t) return t;
            t = next;
        }
        // The walk can cycle on non-Delaunay meshes; scan in index order instead.
        for (std::size_t s = 0; s < m.triangles.size(); ++s) {
            const int ts = static_cast<int>(s);
            if (orient2d(m.corner(ts, 0), m.corner(ts, 1), q) >= 0 &&
                orient2d(m.corner(ts, 1), m.corner(ts, 2), q) >= 0 &&
                orient2d(m.corner(ts, 2), m.corner(ts, 0), q) >= 0)
                return ts;
        }
        throw DomainError("point not covered by the mesh");
    }

    const TriMesh* mesh_;
    int hint_ = -1;
};

inline BarycentricCoords locate(const TriMesh& mesh, const Point2& q) { return Locator(mesh).locate(q); }

/// P1 finite-element value at q.
inline double interpolate(const TriMesh& mesh, const BarycentricCoords& bc) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(bc.triangle)];
    const auto& w = bc.weights;
    // Anchored at the dominant vertex so nodal values and constants come out exact.
    const int k = w[0] >= w[1] ? (w[0] >= w[2] ? 0 : 2) : (w[1] >= w[2] ? 1 : 2);
    const double base = mesh.values[static_cast<std::size_t>(tri[k])];
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    return base + w[i] * (mesh.values[static_cast<std::size_t>(tri[i])] - base) +
           w[j] * (mesh.values[static_cast<std::size_t>(tri[j])] - base);
}

inline double interpolate(const TriMesh& mesh, const Point2& q) {
    if (!mesh.has_values()) throw ValidationError("mesh values are unset");
    return interpolate(mesh, locate(mesh, q));
}

/// Evaluates the P1 field at every pixel center, clamped to [0, 255].
inline GrayImage rasterize(const TriMesh& mesh, std::size_t width, std::size_t height) {
    if (!mesh.has_values()) throw ValidationError("mesh values are unset");
    const Rect need{0.0, 0.0, static_cast<double>(width) - 1.0, static_cast<double>(height) - 1.0};
    if (mesh.domain.xmin > need.xmin || mesh.domain.ymin > need.ymin || mesh.domain.xmax < need.xmax ||
        mesh.domain.ymax < need.ymax)
        throw DomainError("mesh does not cover every pixel center");
    Locator loc(mesh);
    std::vector<double> out(width * height);
    for (std::size_t i = 0; i < height; ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            const auto bc = loc.locate({static_cast<double>(j), static_cast<double>(i)});
            out[i * width + j] = interpolate(mesh, bc);
        }
    }
    return GrayImage::clamped(width, height, std::move(out), 8);
}

/// Bilinear image intensity at continuous coordinate p (x = column, y = row).
inline double sample_bilinear(const GrayImage& img, const Point2& p) {
    const double xmax = static_cast<double>(img.width()) - 1.0;
    const double ymax = static_cast<double>(img.height()) - 1.0;
    if (!(p.x >= 0.0 && p.x <= xmax && p.y >= 0.0 && p.y <= ymax))
        throw DomainError("sample point outside the image");
    const auto clamp_floor = [](double v, double hi) {
        return static_cast<std::size_t>(std::min(std::floor(v), std::max(0.0, hi - 1.0)));
    };
    const std::size_t j0 = clamp_floor(p.x, xmax), i0 = clamp_floor(p.y, ymax);
    const std::size_t j1 = std::min(j0 + 1, img.width() - 1), i1 = std::min(i0 + 1, img.height() - 1);
    const double fx = p.x - static_cast<double>(j0), fy = p.y - static_cast<double>(i0);
    const double top = (1.0 - fx) * img.at(i0, j0) + fx * img.at(i0, j1);
    const double bot = (1.0 - fx) * img.at(i1, j0) + fx * img.at(i1, j1);
    return (1.0 - fy) * top + fy * bot;
}

inline TriMesh assign_values(TriMesh mesh, const GrayImage& img) {
    mesh.values.resize(mesh.vertices.size());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) mesh.values[v] = sample_bilinear(img, mesh.vertices[v]);
    return mesh;
}

/// Text export: "OFF-like: nv nt", nv lines "x y value", nt lines "i j k".
inline std::string mesh_to_text(const TriMesh& m) {
    std::string out = "OFF-like: " + std::to_string(m.vertices.size()) + " " + std::to_string(m.triangles.size()) + "\n";
    char buf[128];
    for (std::size_t v = 0; v < m.vertices.size(); ++v) {
        const double val = m.has_values() ? m.values[v] : 0.0;
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", m.vertices[v].x, m.vertices[v].y, val);
        out += buf;
    }
    for (const auto& t : m.triangles) {
        std::snprintf(buf, sizeof buf, "%d %d %d\n", t[0], t[1], t[2]);
        out += buf;
    }
    return out;
}

inline TriMesh mesh_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string tag;
    std::size_t nv = 0, nt = 0;
    if (!(in >> tag >> nv >> nt) || tag != "OFF-like:") throw IoError("bad mesh header");
    TriMesh m;
    m.vertices.resize(nv);
    m.values.resize(nv);
    for (std::size_t v = 0; v < nv; ++v)
        if (!(in >> m.vertices[v].x >> m.vertices[v].y >> m.values[v])) throw IoError("truncated mesh vertices");
    m.triangles.resize(nt);
    for (auto& t : m.triangles)
        if (!(in >> t[0] >> t[1] >> t[2])) throw IoError("truncated mesh triangles");
    if (nv == 0) throw IoError("mesh has no vertices");
    m.domain = {m.vertices[0].x, m.vertices[0].y, m.vertices[0].x, m.vertices[0].y};
    for (const auto& p : m.vertices) {
        m.domain.xmin = std::min(m.domain.xmin, p.x);
        m.domain.xmax = std::max(m.domain.xmax, p.x);
        m.domain.ymin = std::min(m.domain.ymin, p.y);
        m.domain.ymax = std::max(m.domain.ymax, p.y);
    }
    for (const auto& t : m.triangles)
        for (int v : t)
            if (v < 0 || static_cast<std::size_t>(v) >= nv) throw IoError("triangle index out of range");
    build_adjacency(m);
    mark_boundary(m);
    return m;
}

inline void save_mesh(const TriMesh& m, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << mesh_to_text(m);
    if (!out) throw IoError("write failed for " + path);
}

inline TriMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return mesh_from_text(ss.str());
}

}  // namespace meshcs
