#include "topofeat/complex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace topofeat {

bool operator==(const Simplex& a, const Simplex& b) { return a.v == b.v; }

bool operator<(const Simplex& a, const Simplex& b) {
    if (a.v.size() != b.v.size()) return a.v.size() < b.v.size();
    return a.v < b.v;
}

double FilteredComplex::max_value() const {
    double m = 0.0;
    for (const auto& fs : simplices) m = std::max(m, fs.value);
    return m;
}

namespace {
bool filtered_less(const FilteredSimplex& a, const FilteredSimplex& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.simplex < b.simplex;
}
} // namespace

void FilteredComplex::sort_canonical() {
    std::sort(simplices.begin(), simplices.end(), filtered_less);
}

bool FilteredComplex::is_canonical_sorted() const {
    return std::is_sorted(simplices.begin(), simplices.end(), filtered_less);
}

std::vector<Point2> dedup_points(const PointCloud& pc, double tol) {
    std::vector<Point2> kept;
    kept.reserve(pc.size());
    // hash grid keyed by floor(coord/tol); candidates live in the 3x3 neighborhood
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells;
    auto key_of = [](std::int64_t cx, std::int64_t cy) {
        return (static_cast<std::uint64_t>(cx) * 0x9e3779b97f4a7c15ULL) ^ static_cast<std::uint64_t>(cy);
    };
    for (const Point2& p : pc.points) {
        const auto cx = static_cast<std::int64_t>(std::floor(p.x / tol));
        const auto cy = static_cast<std::int64_t>(std::floor(p.y / tol));
        bool dup = false;
        for (std::int64_t dx = -1; dx <= 1 && !dup; ++dx) {
            for (std::int64_t dy = -1; dy <= 1 && !dup; ++dy) {
                auto it = cells.find(key_of(cx + dx, cy + dy));
                if (it == cells.end()) continue;
                for (std::uint32_t idx : it->second) {
                    if (std::abs(kept[idx].x - p.x) <= tol && std::abs(kept[idx].y - p.y) <= tol) {
                        dup = true;
                        break;
                    }
                }
            }
        }
        if (!dup) {
            cells[key_of(cx, cy)].push_back(static_cast<std::uint32_t>(kept.size()));
            kept.push_back(p);
        }
    }
    return kept;
}

// --- predicates -------------------------------------------------------------
//
// Evaluated in long double with a relative error cutoff; results inside the
// cutoff are reported as exact ties (0). For grid-aligned and small-integer
// inputs the arithmetic is exact, so ties are detected exactly there.

namespace {
constexpr long double kPredEps = 1e-18L;

int sign_with_cutoff(long double det, long double perm) {
    if (det > perm * kPredEps) return 1;
    if (det < -perm * kPredEps) return -1;
    return 0;
}
} // namespace

int orient2d_sign(const Point2& a, const Point2& b, const Point2& c) {
    const long double t1 = (long double)(b.x - a.x) * (long double)(c.y - a.y);
    const long double t2 = (long double)(b.y - a.y) * (long double)(c.x - a.x);
    return sign_with_cutoff(t1 - t2, std::abs(t1) + std::abs(t2));
}

int incircle_sign(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const long double adx = a.x - d.x, ady = a.y - d.y;
    const long double bdx = b.x - d.x, bdy = b.y - d.y;
    const long double cdx = c.x - d.x, cdy = c.y - d.y;
    const long double ad2 = adx * adx + ady * ady;
    const long double bd2 = bdx * bdx + bdy * bdy;
    const long double cd2 = cdx * cdx + cdy * cdy;

    const long double m1 = adx * (bdy * cd2 - cdy * bd2);
    const long double m2 = ady * (bdx * cd2 - cdx * bd2);
    const long double m3 = ad2 * (bdx * cdy - cdx * bdy);
    const long double det = m1 - m2 + m3;
    const long double perm = std::abs(adx) * (std::abs(bdy * cd2) + std::abs(cdy * bd2)) +
                             std::abs(ady) * (std::abs(bdx * cd2) + std::abs(cdx * bd2)) +
                             ad2 * (std::abs(bdx * cdy) + std::abs(cdx * bdy));
    int s = sign_with_cutoff(det, perm);
    if (orient2d_sign(a, b, c) < 0) s = -s;
    return s;
}

double squared_circumradius(const Point2& a, const Point2& b, const Point2& c) {
    const long double bx = b.x - a.x, by = b.y - a.y;
    const long double cx = c.x - a.x, cy = c.y - a.y;
    const long double d = 2.0L * (bx * cy - by * cx);
    const long double b2 = bx * bx + by * by;
    const long double c2 = cx * cx + cy * cy;
    const long double ux = (cy * b2 - by * c2) / d;
    const long double uy = (bx * c2 - cx * b2) / d;
    return static_cast<double>(ux * ux + uy * uy);
}

// --- Delaunay (Bowyer-Watson + canonical Lawson pass) -----------------------

namespace {

using Edge = std::array<std::uint32_t, 2>;

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

struct Triangulator {
    std::vector<Point2> pts; // translated input + 3 super vertices at the end
    std::uint32_t n_real = 0;

    struct Tri {
        std::array<std::uint32_t, 3> v; // ccw
        bool alive = false;
    };
    std::vector<Tri> tris;
    std::unordered_map<std::uint64_t, std::array<int, 2>> edge_tris; // key -> up to 2 triangle ids
    int last_alive = -1;

    void link(int t) {
        const auto& v = tris[t].v;
        for (int i = 0; i < 3; ++i) {
            auto [it, fresh] =
                edge_tris.try_emplace(edge_key(v[i], v[(i + 1) % 3]), std::array<int, 2>{-1, -1});
            auto& slot = it->second;
            if (slot[0] == -1) slot[0] = t;
            else if (slot[1] == -1) slot[1] = t;
        }
    }
    void unlink(int t) {
        const auto& v = tris[t].v;
        for (int i = 0; i < 3; ++i) {
            auto it = edge_tris.find(edge_key(v[i], v[(i + 1) % 3]));
            if (it == edge_tris.end()) continue;
            if (it->second[0] == t) it->second[0] = -1;
            if (it->second[1] == t) it->second[1] = -1;
            if (it->second[0] == -1 && it->second[1] == -1) edge_tris.erase(it);
        }
    }
    int neighbor(int t, std::uint32_t a, std::uint32_t b) const {
        auto it = edge_tris.find(edge_key(a, b));
        if (it == edge_tris.end()) return -1;
        if (it->second[0] != t && it->second[0] != -1) return it->second[0];
        if (it->second[1] != t && it->second[1] != -1) return it->second[1];
        return -1;
    }

    int add_tri(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        if (orient2d_sign(pts[a], pts[b], pts[c]) < 0) std::swap(b, c);
        tris.push_back({{a, b, c}, true});
        const int id = static_cast<int>(tris.size()) - 1;
        link(id);
        last_alive = id;
        return id;
    }
    void kill_tri(int t) {
        tris[t].alive = false;
        unlink(t);
    }

    bool contains(int t, const Point2& p) const {
        const auto& v = tris[t].v;
        return orient2d_sign(pts[v[0]], pts[v[1]], p) >= 0 &&
               orient2d_sign(pts[v[1]], pts[v[2]], p) >= 0 &&
               orient2d_sign(pts[v[2]], pts[v[0]], p) >= 0;
    }

    int locate(const Point2& p) const {
        int t = last_alive;
        std::size_t steps = 0;
        const std::size_t budget = 4 * tris.size() + 64;
        while (t >= 0 && tris[t].alive && steps++ < budget) {
            const auto& v = tris[t].v;
            int next = -1;
            for (int i = 0; i < 3; ++i) {
                const std::uint32_t a = v[i], b = v[(i + 1) % 3];
                if (orient2d_sign(pts[a], pts[b], p) < 0) {
                    next = neighbor(t, a, b);
                    break;
                }
            }
            if (next == -1) return t; // all orientations >= 0
            t = next;
        }
        // walk failed or looped on ties; linear fallback
        for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i)
            if (tris[i].alive && contains(i, p)) return i;
        return -1;
    }

    bool in_circum(int t, const Point2& p) const {
        const auto& v = tris[t].v;
        return incircle_sign(pts[v[0]], pts[v[1]], pts[v[2]], p) > 0;
    }

    void insert(std::uint32_t pi) {
        const Point2& p = pts[pi];
        const int seed = locate(p);
        if (seed < 0) throw std::runtime_error("delaunay: point location failed");

        std::unordered_set<int> bad;
        std::vector<int> stack{seed};
        bad.insert(seed);
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            const auto& v = tris[t].v;
            for (int i = 0; i < 3; ++i) {
                const int nb = neighbor(t, v[i], v[(i + 1) % 3]);
                if (nb >= 0 && !bad.count(nb) && in_circum(nb, p)) {
                    bad.insert(nb);
                    stack.push_back(nb);
                }
            }
        }

        // boundary = directed edges of bad triangles whose far side is not bad;
        // expand across edges collinear with p (degenerate fan otherwise)
        std::vector<std::array<std::uint32_t, 2>> boundary;
        for (bool grew = true; grew;) {
            grew = false;
            boundary.clear();
            for (int t : bad) {
                const auto& v = tris[t].v;
                for (int i = 0; i < 3; ++i) {
                    const std::uint32_t a = v[i], b = v[(i + 1) % 3];
                    const int nb = neighbor(t, a, b);
                    if (nb >= 0 && bad.count(nb)) continue;
                    if (orient2d_sign(p, pts[a], pts[b]) == 0) {
                        if (nb < 0) throw std::runtime_error("delaunay: degenerate hull edge");
                        bad.insert(nb);
                        grew = true;
                        break;
                    }
                    boundary.push_back({a, b});
                }
                if (grew) break;
            }
        }

        for (int t : bad) kill_tri(t);
        for (const auto& e : boundary) add_tri(pi, e[0], e[1]);
    }

    // Lawson pass: restore empty circumcircles, then pick the lexicographically
    // smaller diagonal in exactly cocircular quads.
    void canonical_flips() {
        const std::size_t cap = 16 * tris.size() + 1024;
        std::size_t flips = 0;
        bool changed = true;
        while (changed && flips < cap) {
            changed = false;
            const std::size_t n_now = tris.size();
            for (std::size_t t1 = 0; t1 < n_now && flips < cap; ++t1) {
                if (!tris[t1].alive) continue;
                const auto v1 = tris[t1].v;
                for (int i = 0; i < 3; ++i) {
                    const std::uint32_t a = v1[i], b = v1[(i + 1) % 3];
                    const int t2 = neighbor(static_cast<int>(t1), a, b);
                    if (t2 < 0 || !tris[t2].alive) continue;
                    const std::uint32_t c = v1[(i + 2) % 3];
                    std::uint32_t d = UINT32_MAX;
                    for (std::uint32_t w : tris[t2].v)
                        if (w != a && w != b) d = w;
                    if (d == UINT32_MAX) continue;

                    const int s = incircle_sign(pts[a], pts[b], pts[c], pts[d]);
                    bool do_flip = false;
                    if (s > 0) {
                        do_flip = true;
                    } else if (s == 0 && edge_key(c, d) < edge_key(a, b)) {
                        // flip only if the diagonals properly cross (strictly convex quad)
                        do_flip = orient2d_sign(pts[a], pts[b], pts[c]) *
                                          orient2d_sign(pts[a], pts[b], pts[d]) <
                                      0 &&
                                  orient2d_sign(pts[c], pts[d], pts[a]) *
                                          orient2d_sign(pts[c], pts[d], pts[b]) <
                                      0;
                    }
                    if (do_flip) {
                        kill_tri(static_cast<int>(t1));
                        kill_tri(t2);
                        add_tri(c, a, d);
                        add_tri(c, d, b);
                        ++flips;
                        changed = true;
                        break;
                    }
                }
            }
        }
    }
};

} // namespace

DelaunayTriangulation delaunay_2d(const PointCloud& pc) {
    std::vector<Point2> pts = dedup_points(pc);
    const std::size_t n = pts.size();
    if (n < 3) throw CollinearInputError("delaunay_2d: fewer than 3 distinct points");

    // non-collinearity check
    {
        bool ok = false;
        for (std::size_t k = 2; k < n && !ok; ++k)
            ok = orient2d_sign(pts[0], pts[1], pts[k]) != 0;
        if (!ok) throw CollinearInputError("delaunay_2d: all points collinear");
    }

    Triangulator tr;
    // translate to the centroid so predicate operands stay small
    double cx = 0, cy = 0;
    for (const Point2& p : pts) {
        cx += p.x;
        cy += p.y;
    }
    cx /= static_cast<double>(n);
    cy /= static_cast<double>(n);
    double ext = 1.0;
    for (const Point2& p : pts)
        ext = std::max({ext, std::abs(p.x - cx), std::abs(p.y - cy)});

    tr.pts.reserve(n + 3);
    for (const Point2& p : pts) tr.pts.push_back({p.x - cx, p.y - cy});
    tr.n_real = static_cast<std::uint32_t>(n);
    // irrational-ish offsets keep the super vertices off data lines/circles
    const double s = 64.0 * ext;
    tr.pts.push_back({-3.14159 * s, -2.23607 * s});
    tr.pts.push_back({3.60555 * s, -2.44949 * s});
    tr.pts.push_back({0.173205 * s, 3.87298 * s});
    tr.add_tri(tr.n_real, tr.n_real + 1, tr.n_real + 2);

    for (std::uint32_t i = 0; i < tr.n_real; ++i) tr.insert(i);

    // drop super-vertex triangles, then canonicalize the remainder
    for (std::size_t t = 0; t < tr.tris.size(); ++t) {
        if (!tr.tris[t].alive) continue;
        const auto& v = tr.tris[t].v;
        if (v[0] >= tr.n_real || v[1] >= tr.n_real || v[2] >= tr.n_real)
            tr.kill_tri(static_cast<int>(t));
    }
    tr.canonical_flips();

    DelaunayTriangulation out;
    out.points = std::move(pts);
    std::unordered_set<std::uint64_t> edge_set;
    for (const auto& t : tr.tris) {
        if (!t.alive) continue;
        std::array<std::uint32_t, 3> v = t.v;
        std::sort(v.begin(), v.end());
        out.triangles.push_back(v);
        edge_set.insert(edge_key(v[0], v[1]));
        edge_set.insert(edge_key(v[0], v[2]));
        edge_set.insert(edge_key(v[1], v[2]));
    }
    std::sort(out.triangles.begin(), out.triangles.end());
    out.edges.reserve(edge_set.size());
    for (std::uint64_t k : edge_set)
        out.edges.push_back({static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k & 0xffffffffu)});
    std::sort(out.edges.begin(), out.edges.end());
    return out;
}

// --- filtration builders ----------------------------------------------------

FilteredComplex build_rips(const PointCloud& pc, int max_dim, double max_value) {
    if (max_dim < 1 || max_dim > 3) throw std::invalid_argument("build_rips: max_dim must be 1..3");
    const std::vector<Point2> pts = dedup_points(pc);
    if (pts.empty()) throw std::invalid_argument("build_rips: empty point cloud");
    const std::uint32_t n = static_cast<std::uint32_t>(pts.size());

    FilteredComplex fc;
    fc.convention = FiltrationConvention::rips_diameter;
    fc.vertex_count = n;
    for (std::uint32_t i = 0; i < n; ++i) fc.simplices.push_back({Simplex{{i}}, 0.0});

    std::unordered_map<std::uint64_t, double> elen;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            const double d = dist(pts[i], pts[j]);
            if (d <= max_value) {
                fc.simplices.push_back({Simplex{{i, j}}, d});
                elen[edge_key(i, j)] = d;
            }
        }
    }
    auto edge_val = [&](std::uint32_t a, std::uint32_t b) -> const double* {
        auto it = elen.find(edge_key(a, b));
        return it == elen.end() ? nullptr : &it->second;
    };

    std::vector<std::array<std::uint32_t, 3>> triangles;
    if (max_dim >= 2) {
        for (std::uint32_t i = 0; i < n; ++i) {
            for (std::uint32_t j = i + 1; j < n; ++j) {
                const double* dij = edge_val(i, j);
                if (!dij) continue;
                for (std::uint32_t k = j + 1; k < n; ++k) {
                    const double* dik = edge_val(i, k);
                    const double* djk = edge_val(j, k);
                    if (!dik || !djk) continue;
                    fc.simplices.push_back({Simplex{{i, j, k}}, std::max({*dij, *dik, *djk})});
                    triangles.push_back({i, j, k});
                }
            }
        }
    }
    if (max_dim >= 3) {
        for (const auto& t : triangles) {
            for (std::uint32_t l = t[2] + 1; l < n; ++l) {
                const double* d0 = edge_val(t[0], l);
                const double* d1 = edge_val(t[1], l);
                const double* d2 = edge_val(t[2], l);
                if (!d0 || !d1 || !d2) continue;
                const double base = *edge_val(t[0], t[1]);
                const double v = std::max({base, *edge_val(t[0], t[2]), *edge_val(t[1], t[2]),
                                           *d0, *d1, *d2});
                fc.simplices.push_back({Simplex{{t[0], t[1], t[2], l}}, v});
            }
        }
    }
    fc.sort_canonical();
    return fc;
}

double min_enclosing_ball_radius(std::span<const Point2> pts) {
    switch (pts.size()) {
        case 1:
            return 0.0;
        case 2:
            return dist(pts[0], pts[1]) / 2.0;
        case 3: {
            // try the longest side's diametral ball first
            int bi = 0, bj = 1;
            double best = sq_dist(pts[0], pts[1]);
            for (int i = 0; i < 3; ++i) {
                for (int j = i + 1; j < 3; ++j) {
                    const double d2 = sq_dist(pts[i], pts[j]);
                    if (d2 > best) {
                        best = d2;
                        bi = i;
                        bj = j;
                    }
                }
            }
            const int k = 3 - bi - bj;
            const Point2 mid{(pts[bi].x + pts[bj].x) / 2.0, (pts[bi].y + pts[bj].y) / 2.0};
            if (sq_dist(pts[k], mid) <= best / 4.0) return std::sqrt(best) / 2.0;
            if (orient2d_sign(pts[0], pts[1], pts[2]) == 0) {
                // collinear but third point outside the diametral ball cannot
                // happen; guard for rounding
                return std::sqrt(best) / 2.0;
            }
            return std::sqrt(squared_circumradius(pts[0], pts[1], pts[2]));
        }
        default:
            throw std::invalid_argument("min_enclosing_ball_radius: need 1-3 points");
    }
}

FilteredComplex build_cech(const PointCloud& pc, int max_dim, double max_value) {
    if (max_dim < 1 || max_dim > 2) throw std::invalid_argument("build_cech: max_dim must be 1..2");
    const std::vector<Point2> pts = dedup_points(pc);
    if (pts.empty()) throw std::invalid_argument("build_cech: empty point cloud");
    if (pts.size() > kCechSizeCap)
        throw std::invalid_argument("build_cech: point count exceeds the size cap");
    const std::uint32_t n = static_cast<std::uint32_t>(pts.size());

    FilteredComplex fc;
    fc.convention = FiltrationConvention::cech_radius;
    fc.vertex_count = n;
    for (std::uint32_t i = 0; i < n; ++i) fc.simplices.push_back({Simplex{{i}}, 0.0});
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            const Point2 two[2] = {pts[i], pts[j]};
            const double r = min_enclosing_ball_radius(two);
            if (r <= max_value) fc.simplices.push_back({Simplex{{i, j}}, r});
        }
    }
    if (max_dim >= 2) {
        for (std::uint32_t i = 0; i < n; ++i) {
            for (std::uint32_t j = i + 1; j < n; ++j) {
                for (std::uint32_t k = j + 1; k < n; ++k) {
                    const Point2 three[3] = {pts[i], pts[j], pts[k]};
                    double r = min_enclosing_ball_radius(three);
                    // keep the filtration monotone under rounding
                    const Point2 ij[2] = {pts[i], pts[j]}, ik[2] = {pts[i], pts[k]},
                                 jk[2] = {pts[j], pts[k]};
                    r = std::max({r, min_enclosing_ball_radius(ij), min_enclosing_ball_radius(ik),
                                  min_enclosing_ball_radius(jk)});
                    if (r <= max_value) fc.simplices.push_back({Simplex{{i, j, k}}, r});
                }
            }
        }
    }
    fc.sort_canonical();
    return fc;
}

FilteredComplex build_alpha(const PointCloud& pc) {
    const DelaunayTriangulation dt = delaunay_2d(pc);
    const auto& pts = dt.points;
    const std::uint32_t n = static_cast<std::uint32_t>(pts.size());

    FilteredComplex fc;
    fc.convention = FiltrationConvention::alpha_squared_radius;
    fc.vertex_count = n;
    for (std::uint32_t i = 0; i < n; ++i) fc.simplices.push_back({Simplex{{i}}, 0.0});

    std::vector<double> tri_val(dt.triangles.size());
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> edge_to_tris;
    for (std::size_t t = 0; t < dt.triangles.size(); ++t) {
        const auto& v = dt.triangles[t];
        tri_val[t] = squared_circumradius(pts[v[0]], pts[v[1]], pts[v[2]]);
        edge_to_tris[edge_key(v[0], v[1])].push_back(t);
        edge_to_tris[edge_key(v[0], v[2])].push_back(t);
        edge_to_tris[edge_key(v[1], v[2])].push_back(t);
    }

    std::unordered_map<std::uint64_t, double> edge_val;
    for (const auto& e : dt.edges) {
        const Point2& a = pts[e[0]];
        const Point2& b = pts[e[1]];
        const Point2 mid{(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
        const double sq_half = sq_dist(a, b) / 4.0;

        bool gabriel = true;
        double min_inc = std::numeric_limits<double>::infinity();
        for (std::size_t t : edge_to_tris[edge_key(e[0], e[1])]) {
            min_inc = std::min(min_inc, tri_val[t]);
            for (std::uint32_t w : dt.triangles[t]) {
                if (w == e[0] || w == e[1]) continue;
                if (sq_dist(pts[w], mid) < sq_half) gabriel = false;
            }
        }
        edge_val[edge_key(e[0], e[1])] = gabriel ? sq_half : min_inc;
    }

    for (const auto& e : dt.edges)
        fc.simplices.push_back({Simplex{{e[0], e[1]}}, edge_val[edge_key(e[0], e[1])]});
    for (std::size_t t = 0; t < dt.triangles.size(); ++t) {
        const auto& v = dt.triangles[t];
        // clamp against facets so rounding never breaks monotonicity
        const double ev = std::max({edge_val[edge_key(v[0], v[1])], edge_val[edge_key(v[0], v[2])],
                                    edge_val[edge_key(v[1], v[2])]});
        fc.simplices.push_back({Simplex{{v[0], v[1], v[2]}}, std::max(tri_val[t], ev)});
    }
    fc.sort_canonical();
    return fc;
}

void dump_complex(const FilteredComplex& fc, std::ostream& out) {
    for (const auto& fs : fc.simplices) {
        out << fs.simplex.dim();
        for (std::uint32_t v : fs.simplex.v) out << ' ' << v;
        out << " : " << format_double(fs.value) << '\n';
    }
}

} // namespace topofeat
