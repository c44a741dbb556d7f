#pragma once

#include <cstdint>
#include <cstddef>
#include <iosfwd>
#include <filesystem>
#include <vector>

namespace topofeat {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline bool operator==(const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }

double sq_dist(const Point2& a, const Point2& b);
double dist(const Point2& a, const Point2& b);

enum class CloudSource { resize, contour, synthetic, file };

// Ordered planar point set. Order is meaningful: it defines vertex indices
// for the filtration builders.
struct PointCloud {
    std::vector<Point2> points;
    CloudSource source = CloudSource::synthetic;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

// n i.i.d. uniform points on the closed unit disc (rejection from [-1,1]^2).
PointCloud sample_disc(std::size_t n, std::uint64_t seed);

// n uniform-in-area points with r_in <= |p| <= r_out.
PointCloud sample_annulus(std::size_t n, double r_in, double r_out, std::uint64_t seed);

// Symmetric Euclidean distance matrix, zero diagonal.
struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<double> values; // row-major n x n

    double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

DistanceMatrix pairwise_distances(const PointCloud& pc);

// Text format: one "x y" pair per line, '#' starts a comment. Numbers use
// shortest round-trip decimals so write/read round-trips bitwise.
void write_pointcloud(const PointCloud& pc, std::ostream& out);
PointCloud read_pointcloud(std::istream& in);
void save_pointcloud(const PointCloud& pc, const std::filesystem::path& path);
PointCloud load_pointcloud(const std::filesystem::path& path);

// Shortest round-trip decimal formatting (shared by all text writers).
std::string format_double(double v);

} // namespace topofeat
