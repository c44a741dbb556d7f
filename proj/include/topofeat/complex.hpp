#pragma once

#include "topofeat/pointcloud.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace topofeat {

// All input points collinear (or fewer than 3 after dedup); alpha/Delaunay
// cannot proceed and the caller should fall back or flag the input.
struct CollinearInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Simplex {
    std::vector<std::uint32_t> v; // strictly increasing vertex indices

    int dim() const { return static_cast<int>(v.size()) - 1; }
};

bool operator==(const Simplex& a, const Simplex& b);
bool operator<(const Simplex& a, const Simplex& b); // (dim, lex) order

// Scale conventions differ between the constructions (edge appears at d for
// Rips, d/2 for Cech, (d/2)^2 for alpha); the tag prevents silently mixing
// them.
enum class FiltrationConvention { rips_diameter, cech_radius, alpha_squared_radius };

struct FilteredSimplex {
    Simplex simplex;
    double value = 0.0;
};

// Face-closed, monotone simplex list sorted by (value, dim, lex vertices).
struct FilteredComplex {
    std::vector<FilteredSimplex> simplices;
    FiltrationConvention convention = FiltrationConvention::rips_diameter;
    std::size_t vertex_count = 0;

    std::size_t size() const { return simplices.size(); }
    double max_value() const;
    void sort_canonical();
    bool is_canonical_sorted() const;
};

struct DelaunayTriangulation {
    std::vector<std::array<std::uint32_t, 3>> triangles; // sorted triples, lex order
    std::vector<std::array<std::uint32_t, 2>> edges;     // sorted pairs, lex order
    std::vector<Point2> points;                           // deduplicated input points
};

inline constexpr std::size_t kCechSizeCap = 64;
inline constexpr double kDedupTol = 1e-9;

// Stable first-occurrence dedup with coordinate tolerance.
std::vector<Point2> dedup_points(const PointCloud& pc, double tol = kDedupTol);

// Vietoris-Rips: edge value = distance (diameter convention), k-simplex value
// = max over its edges; simplices of dimension <= max_dim (1..3) and value
// <= max_value.
FilteredComplex build_rips(const PointCloud& pc, int max_dim, double max_value);

// Smallest enclosing ball of 1-3 points.
double min_enclosing_ball_radius(std::span<const Point2> pts);

// Cech: simplex value = min enclosing ball radius of its vertices (radius
// convention); dimension <= max_dim (1..2). Reference construction, capped at
// kCechSizeCap points.
FilteredComplex build_cech(const PointCloud& pc, int max_dim, double max_value);

// 2-D Delaunay triangulation; cocircular ties resolved toward the
// lexicographically smaller diagonal. Throws CollinearInputError when no
// triangle exists.
DelaunayTriangulation delaunay_2d(const PointCloud& pc);

// Alpha complex on the squared-radius scale: triangle value = squared
// circumradius, Gabriel edge value = squared half-length, non-Gabriel edge
// value = min over incident triangle values, vertices 0.
FilteredComplex build_alpha(const PointCloud& pc);

// Debug dump: one line per simplex, "dim v0 v1 [v2] : value", in stored order.
void dump_complex(const FilteredComplex& fc, std::ostream& out);

// Geometric predicates/primitives shared with tests.
// orient2d > 0 iff (a,b,c) counterclockwise; exact sign with zero for ties.
int orient2d_sign(const Point2& a, const Point2& b, const Point2& c);
// > 0 iff d strictly inside circumcircle of ccw triangle (a,b,c); 0 on circle.
int incircle_sign(const Point2& a, const Point2& b, const Point2& c, const Point2& d);
double squared_circumradius(const Point2& a, const Point2& b, const Point2& c);

} // namespace topofeat
