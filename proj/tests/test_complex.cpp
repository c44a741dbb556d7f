#include "doctest.h"

#include "topofeat/complex.hpp"
#include "topofeat/persistence.hpp"
#include "topofeat/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace topofeat;

namespace {

PointCloud cloud(std::initializer_list<Point2> pts) {
    PointCloud pc;
    pc.points = pts;
    return pc;
}

PointCloud random_cloud(SeededRng& rng, std::size_t n, double scale = 1.0) {
    PointCloud pc;
    for (std::size_t i = 0; i < n; ++i)
        pc.points.push_back({rng.uniform(-scale, scale), rng.uniform(-scale, scale)});
    return pc;
}

const FilteredSimplex* find_simplex(const FilteredComplex& fc, std::vector<std::uint32_t> v) {
    for (const auto& fs : fc.simplices)
        if (fs.simplex.v == v) return &fs;
    return nullptr;
}

double value_of(const FilteredComplex& fc, std::vector<std::uint32_t> v) {
    const FilteredSimplex* fs = find_simplex(fc, std::move(v));
    REQUIRE(fs != nullptr);
    return fs->value;
}

// brute-force min enclosing ball: shrinking grid search over centers
double meb_oracle(std::span<const Point2> pts) {
    double lo_x = pts[0].x, hi_x = pts[0].x, lo_y = pts[0].y, hi_y = pts[0].y;
    for (const Point2& p : pts) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    }
    double cx = (lo_x + hi_x) / 2, cy = (lo_y + hi_y) / 2;
    double span = std::max(hi_x - lo_x, hi_y - lo_y) + 1e-9;
    double best = 1e300, bx = cx, by = cy;
    for (int iter = 0; iter < 80; ++iter) {
        for (int i = -8; i <= 8; ++i) {
            for (int j = -8; j <= 8; ++j) {
                const double x = cx + span * i / 8.0, y = cy + span * j / 8.0;
                double r = 0.0;
                for (const Point2& p : pts)
                    r = std::max(r, std::hypot(p.x - x, p.y - y));
                if (r < best) {
                    best = r;
                    bx = x;
                    by = y;
                }
            }
        }
        cx = bx;
        cy = by;
        span *= 0.7;
    }
    return best;
}

} // namespace

TEST_CASE("dedup keeps first occurrences within tolerance") {
    const auto kept = dedup_points(cloud({{0, 0}, {1, 1}, {0, 0.5e-9}, {1 + 1e-6, 1}}));
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].x == 0.0);
    CHECK(kept[1].x == 1.0);
}

TEST_CASE("build_rips on the reference triangle") {
    const PointCloud pc = cloud({{0, 0}, {1, 2}, {3, 0}});
    const FilteredComplex fc = build_rips(pc, 2, 10.0);
    CHECK(fc.convention == FiltrationConvention::rips_diameter);
    REQUIRE(fc.size() == 7);
    CHECK(value_of(fc, {0}) == 0.0);
    CHECK(value_of(fc, {0, 1}) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
    CHECK(value_of(fc, {1, 2}) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
    CHECK(value_of(fc, {0, 2}) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(value_of(fc, {0, 1, 2}) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(fc.is_canonical_sorted());
}

TEST_CASE("build_rips edge cases") {
    // coincident points collapse to one vertex
    const FilteredComplex single = build_rips(cloud({{1, 1}, {1, 1}}), 1, 10.0);
    CHECK(single.size() == 1);
    CHECK(single.vertex_count == 1);

    // max_value 0 keeps vertices only
    const FilteredComplex verts = build_rips(cloud({{0, 0}, {1, 0}, {0, 1}}), 2, 0.0);
    CHECK(verts.size() == 3);

    CHECK_THROWS_AS(build_rips(cloud({{0, 0}}), 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_rips(cloud({{0, 0}}), 4, 1.0), std::invalid_argument);
}

TEST_CASE("build_rips dimension 3 takes the max edge value") {
    const PointCloud pc = cloud({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    const FilteredComplex fc = build_rips(pc, 3, 10.0);
    CHECK(value_of(fc, {0, 1, 2, 3}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("min_enclosing_ball_radius golden and oracle cases") {
    const Point2 tri[3] = {{0, 0}, {1, 2}, {3, 0}};
    CHECK(min_enclosing_ball_radius({tri, 3}) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-14));

    // obtuse triangle: half the longest side; cross-checked by grid search
    const Point2 obtuse[3] = {{0, 0}, {4, 0}, {1, 1}};
    CHECK(min_enclosing_ball_radius({obtuse, 3}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(meb_oracle({obtuse, 3}) == doctest::Approx(2.0).epsilon(1e-6));

    const Point2 one[1] = {{5, 5}};
    CHECK(min_enclosing_ball_radius({one, 1}) == 0.0);
    const Point2 two[2] = {{0, 0}, {0, 4}};
    CHECK(min_enclosing_ball_radius({two, 2}) == 2.0);

    // exact enumeration oracle: the MEB is a diametral ball of some pair or
    // the circumball; pick the smallest candidate containing all points
    const auto enum_oracle = [](std::span<const Point2> ps) {
        double best = 1e300;
        const auto consider = [&](double cx, double cy) {
            double r = 0.0;
            for (const Point2& p : ps) r = std::max(r, std::hypot(p.x - cx, p.y - cy));
            best = std::min(best, r);
        };
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                consider((ps[i].x + ps[j].x) / 2, (ps[i].y + ps[j].y) / 2);
        if (orient2d_sign(ps[0], ps[1], ps[2]) != 0) {
            // circumcenter via the perpendicular-bisector intersection
            const double bx = ps[1].x - ps[0].x, by = ps[1].y - ps[0].y;
            const double cx = ps[2].x - ps[0].x, cy = ps[2].y - ps[0].y;
            const double d = 2 * (bx * cy - by * cx);
            const double ux = (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / d;
            const double uy = (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / d;
            consider(ps[0].x + ux, ps[0].y + uy);
        }
        return best;
    };
    SeededRng rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        Point2 pts[3];
        for (auto& p : pts) p = {rng.uniform(-5, 5), rng.uniform(-5, 5)};
        CHECK(min_enclosing_ball_radius({pts, 3}) ==
              doctest::Approx(enum_oracle({pts, 3})).epsilon(1e-9));
    }
}

TEST_CASE("build_cech reference values") {
    const FilteredComplex fc = build_cech(cloud({{0, 0}, {1, 2}, {3, 0}}), 2, 10.0);
    CHECK(fc.convention == FiltrationConvention::cech_radius);
    const double e01 = value_of(fc, {0, 1});
    const double e12 = value_of(fc, {1, 2});
    const double e02 = value_of(fc, {0, 2});
    const double t = value_of(fc, {0, 1, 2});
    CHECK(e01 * e01 == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(e12 * e12 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(e02 * e02 == doctest::Approx(2.25).epsilon(1e-12));
    CHECK(t * t == doctest::Approx(2.5).epsilon(1e-12));

    // equilateral, side 2: edges at 1, triangle at circumradius 2/sqrt(3)
    const FilteredComplex eq =
        build_cech(cloud({{0, 0}, {2, 0}, {1, std::sqrt(3.0)}}), 2, 10.0);
    CHECK(value_of(eq, {0, 1}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(value_of(eq, {0, 1, 2}) == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));

    // two points at distance 2a -> edge at a
    const FilteredComplex pair = build_cech(cloud({{-3, 0}, {3, 0}}), 1, 10.0);
    CHECK(value_of(pair, {0, 1}) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("build_cech enforces the size cap") {
    PointCloud big;
    SeededRng rng(5);
    for (int i = 0; i < 65; ++i) big.points.push_back({rng.uniform(0, 1), rng.uniform(0, 1)});
    CHECK_THROWS_AS(build_cech(big, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_cech(cloud({{0, 0}}), 3, 1.0), std::invalid_argument);
}

TEST_CASE("Cech-Rips sandwich on shared simplices") {
    SeededRng rng(2718);
    for (int trial = 0; trial < 10; ++trial) {
        const PointCloud pc = random_cloud(rng, 12);
        const FilteredComplex rips = build_rips(pc, 2, kInf);
        const FilteredComplex cech = build_cech(pc, 2, kInf);
        std::map<std::vector<std::uint32_t>, double> cech_vals;
        for (const auto& fs : cech.simplices) cech_vals[fs.simplex.v] = fs.value;
        for (const auto& fs : rips.simplices) {
            const auto it = cech_vals.find(fs.simplex.v);
            if (it == cech_vals.end()) continue;
            CHECK(it->second <= fs.value + 1e-12);
            CHECK(fs.value <= 2.0 * it->second + 1e-12);
        }
    }
}

TEST_CASE("all builders produce monotone filtrations") {
    SeededRng rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        const PointCloud pc = random_cloud(rng, 14);
        for (const FilteredComplex& fc :
             {build_rips(pc, 3, kInf), build_cech(pc, 2, kInf), build_alpha(pc)}) {
            std::map<std::vector<std::uint32_t>, double> vals;
            for (const auto& fs : fc.simplices) vals[fs.simplex.v] = fs.value;
            for (const auto& fs : fc.simplices) {
                if (fs.simplex.dim() == 0) {
                    CHECK(fs.value == 0.0);
                    continue;
                }
                for (std::size_t drop = 0; drop < fs.simplex.v.size(); ++drop) {
                    std::vector<std::uint32_t> facet;
                    for (std::size_t t = 0; t < fs.simplex.v.size(); ++t)
                        if (t != drop) facet.push_back(fs.simplex.v[t]);
                    REQUIRE(vals.count(facet));
                    CHECK(vals[facet] <= fs.value);
                }
            }
        }
    }
}

TEST_CASE("delaunay_2d on four points in convex position") {
    const DelaunayTriangulation dt = delaunay_2d(cloud({{0, 0}, {2, 0.1}, {0.2, 2}, {2.3, 2.2}}));
    CHECK(dt.triangles.size() == 2);
    CHECK(dt.edges.size() == 5);
}

TEST_CASE("delaunay_2d breaks the cocircular square toward the lex-smaller diagonal") {
    const DelaunayTriangulation dt = delaunay_2d(cloud({{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
    REQUIRE(dt.triangles.size() == 2);
    // diagonal {0,3} beats {1,2}; triangles are {0,1,3} and {0,2,3}
    const std::set<std::array<std::uint32_t, 3>> tris(dt.triangles.begin(), dt.triangles.end());
    CHECK(tris.count({0, 1, 3}) == 1);
    CHECK(tris.count({0, 2, 3}) == 1);
}

TEST_CASE("delaunay_2d satisfies the empty-circumcircle property") {
    SeededRng rng(4242);
    const PointCloud pc = random_cloud(rng, 50, 3.0);
    const DelaunayTriangulation dt = delaunay_2d(pc);
    REQUIRE(!dt.triangles.empty());
    for (const auto& t : dt.triangles) {
        for (std::uint32_t p = 0; p < dt.points.size(); ++p) {
            if (p == t[0] || p == t[1] || p == t[2]) continue;
            CHECK(incircle_sign(dt.points[t[0]], dt.points[t[1]], dt.points[t[2]],
                                dt.points[p]) <= 0);
        }
    }
}

TEST_CASE("delaunay_2d handles grid-aligned degenerate input") {
    PointCloud grid;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) grid.points.push_back({c + 0.5, r + 0.5});
    const DelaunayTriangulation dt = delaunay_2d(grid);
    // Euler: t = 2n - 2 - h with n = 64 hull points h = 28
    CHECK(dt.triangles.size() == 2 * 64 - 2 - 28);
    for (const auto& t : dt.triangles) {
        for (std::uint32_t p = 0; p < dt.points.size(); ++p) {
            if (p == t[0] || p == t[1] || p == t[2]) continue;
            CHECK(incircle_sign(dt.points[t[0]], dt.points[t[1]], dt.points[t[2]],
                                dt.points[p]) <= 0);
        }
    }
    // canonical tie-break: every unit cell uses its lex-smaller diagonal
    std::set<std::array<std::uint32_t, 3>> tris(dt.triangles.begin(), dt.triangles.end());
    for (int r = 0; r + 1 < 8; ++r) {
        for (int c = 0; c + 1 < 8; ++c) {
            const auto a = static_cast<std::uint32_t>(r * 8 + c);
            const auto b = static_cast<std::uint32_t>(r * 8 + c + 1);
            const auto d = static_cast<std::uint32_t>((r + 1) * 8 + c);
            const auto e = static_cast<std::uint32_t>((r + 1) * 8 + c + 1);
            // diagonal {a,e} is lexicographically smaller than {b,d}
            CHECK(tris.count({a, b, e}) == 1);
            CHECK(tris.count({a, d, e}) == 1);
        }
    }
}

TEST_CASE("delaunay_2d rejects degenerate inputs") {
    CHECK_THROWS_AS(delaunay_2d(cloud({{0, 0}, {1, 1}, {2, 2}})), CollinearInputError);
    CHECK_THROWS_AS(delaunay_2d(cloud({{0, 0}, {1, 1}})), CollinearInputError);
    CHECK_THROWS_AS(delaunay_2d(cloud({{0, 0}, {1, 1}, {2, 2}, {5, 5}, {-1, -1}})),
                    CollinearInputError);
}

TEST_CASE("build_alpha reference values") {
    const FilteredComplex fc = build_alpha(cloud({{0, 0}, {1, 2}, {3, 0}}));
    CHECK(fc.convention == FiltrationConvention::alpha_squared_radius);
    CHECK(value_of(fc, {0}) == 0.0);
    CHECK(value_of(fc, {1}) == 0.0);
    CHECK(value_of(fc, {2}) == 0.0);
    CHECK(value_of(fc, {0, 1}) == doctest::Approx(1.25).epsilon(1e-13));
    CHECK(value_of(fc, {1, 2}) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(value_of(fc, {0, 2}) == doctest::Approx(2.25).epsilon(1e-13));
    CHECK(value_of(fc, {0, 1, 2}) == doctest::Approx(2.5).epsilon(1e-13));

    CHECK_THROWS_AS(build_alpha(cloud({{0, 0}, {1, 0}, {2, 0}})), CollinearInputError);
}

TEST_CASE("alpha simplices are exactly the Delaunay simplices") {
    SeededRng rng(808);
    const PointCloud pc = random_cloud(rng, 40, 2.0);
    const DelaunayTriangulation dt = delaunay_2d(pc);
    const FilteredComplex fc = build_alpha(pc);

    std::size_t edges = 0, triangles = 0;
    for (const auto& fs : fc.simplices) {
        if (fs.simplex.dim() == 1) {
            ++edges;
            std::array<std::uint32_t, 2> e{fs.simplex.v[0], fs.simplex.v[1]};
            CHECK(std::binary_search(dt.edges.begin(), dt.edges.end(), e));
        } else if (fs.simplex.dim() == 2) {
            ++triangles;
            std::array<std::uint32_t, 3> t{fs.simplex.v[0], fs.simplex.v[1], fs.simplex.v[2]};
            CHECK(std::binary_search(dt.triangles.begin(), dt.triangles.end(), t));
        }
    }
    CHECK(edges == dt.edges.size());
    CHECK(triangles == dt.triangles.size());
}

TEST_CASE("sqrt of alpha values dominates Cech values, equality on Gabriel simplices") {
    SeededRng rng(909);
    const PointCloud pc = random_cloud(rng, 30, 1.5);
    const FilteredComplex alpha = build_alpha(pc);
    const FilteredComplex cech = build_cech(pc, 2, kInf);
    std::map<std::vector<std::uint32_t>, double> cech_vals;
    for (const auto& fs : cech.simplices) cech_vals[fs.simplex.v] = fs.value;

    const auto pts = dedup_points(pc);
    for (const auto& fs : alpha.simplices) {
        const double sq = std::sqrt(fs.value);
        REQUIRE(cech_vals.count(fs.simplex.v));
        const double cv = cech_vals[fs.simplex.v];
        CHECK(sq >= cv - 1e-12);
        if (fs.simplex.dim() == 1) {
            // Gabriel test straight from the definition: empty diametral disc
            const Point2& a = pts[fs.simplex.v[0]];
            const Point2& b = pts[fs.simplex.v[1]];
            const Point2 mid{(a.x + b.x) / 2, (a.y + b.y) / 2};
            const double r2 = sq_dist(a, b) / 4.0;
            bool gabriel = true;
            for (std::uint32_t w = 0; w < pts.size(); ++w) {
                if (w == fs.simplex.v[0] || w == fs.simplex.v[1]) continue;
                if (sq_dist(pts[w], mid) < r2) gabriel = false;
            }
            if (gabriel) CHECK(sq == doctest::Approx(cv).epsilon(1e-12));
        }
    }
}

TEST_CASE("alpha and Cech persistence agree on a small annulus") {
    const PointCloud pc = sample_annulus(50, 0.5, 1.0, 42);
    const PersistenceDiagram da = diagram(build_alpha(pc));
    const PersistenceDiagram dc = diagram(build_cech(pc, 2, kInf));

    for (int dim = 0; dim <= 1; ++dim) {
        std::vector<std::pair<double, double>> a_pairs, c_pairs;
        for (const auto& p : da.pairs)
            if (p.dim == dim)
                a_pairs.push_back({std::sqrt(p.birth),
                                   p.finite() ? std::sqrt(p.death) : kInf});
        for (const auto& p : dc.pairs)
            if (p.dim == dim) c_pairs.push_back({p.birth, p.death});
        std::sort(a_pairs.begin(), a_pairs.end());
        std::sort(c_pairs.begin(), c_pairs.end());
        REQUIRE(a_pairs.size() == c_pairs.size());
        for (std::size_t i = 0; i < a_pairs.size(); ++i) {
            CHECK(a_pairs[i].first == doctest::Approx(c_pairs[i].first).epsilon(1e-9));
            if (std::isfinite(a_pairs[i].second))
                CHECK(a_pairs[i].second == doctest::Approx(c_pairs[i].second).epsilon(1e-9));
            else CHECK(!std::isfinite(c_pairs[i].second));
        }
    }
}

TEST_CASE("complex dump format") {
    const FilteredComplex fc = build_rips(cloud({{0, 0}, {3, 0}}), 1, 10.0);
    std::ostringstream out;
    dump_complex(fc, out);
    CHECK(out.str() == "0 0 : 0\n0 1 : 0\n1 0 1 : 3\n");
}
