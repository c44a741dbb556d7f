#include "topofeat/pointcloud.hpp"
#include "topofeat/rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace topofeat {

double sq_dist(const Point2& a, const Point2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double dist(const Point2& a, const Point2& b) { return std::sqrt(sq_dist(a, b)); }

PointCloud sample_disc(std::size_t n, std::uint64_t seed) {
    SeededRng rng(seed);
    PointCloud pc;
    pc.source = CloudSource::synthetic;
    pc.points.reserve(n);
    while (pc.points.size() < n) {
        const double x = rng.uniform(-1.0, 1.0);
        const double y = rng.uniform(-1.0, 1.0);
        if (x * x + y * y <= 1.0) pc.points.push_back({x, y});
    }
    return pc;
}

PointCloud sample_annulus(std::size_t n, double r_in, double r_out, std::uint64_t seed) {
    if (!(0.0 < r_in && r_in < r_out))
        throw std::invalid_argument("sample_annulus: need 0 < r_in < r_out");
    SeededRng rng(seed);
    PointCloud pc;
    pc.source = CloudSource::synthetic;
    pc.points.reserve(n);
    const double lo2 = r_in * r_in, hi2 = r_out * r_out;
    while (pc.points.size() < n) {
        const double x = rng.uniform(-r_out, r_out);
        const double y = rng.uniform(-r_out, r_out);
        const double r2 = x * x + y * y;
        if (lo2 <= r2 && r2 <= hi2) pc.points.push_back({x, y});
    }
    return pc;
}

DistanceMatrix pairwise_distances(const PointCloud& pc) {
    const std::size_t n = pc.size();
    DistanceMatrix m;
    m.n = n;
    m.values.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = dist(pc.points[i], pc.points[j]);
            m.values[i * n + j] = d;
            m.values[j * n + i] = d;
        }
    }
    return m;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_pointcloud(const PointCloud& pc, std::ostream& out) {
    for (const Point2& p : pc.points)
        out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
}

PointCloud read_pointcloud(std::istream& in) {
    PointCloud pc;
    pc.source = CloudSource::file;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tx, ty, extra;
        if (!(ls >> tx)) continue; // blank or comment-only line
        if (!(ls >> ty) || (ls >> extra))
            throw std::runtime_error("point cloud: malformed line " + std::to_string(lineno));
        double x, y;
        auto rx = std::from_chars(tx.data(), tx.data() + tx.size(), x);
        auto ry = std::from_chars(ty.data(), ty.data() + ty.size(), y);
        if (rx.ec != std::errc{} || ry.ec != std::errc{} ||
            rx.ptr != tx.data() + tx.size() || ry.ptr != ty.data() + ty.size())
            throw std::runtime_error("point cloud: malformed line " + std::to_string(lineno));
        if (!std::isfinite(x) || !std::isfinite(y))
            throw std::runtime_error("point cloud: non-finite coordinate at line " + std::to_string(lineno));
        pc.points.push_back({x, y});
    }
    return pc;
}

void save_pointcloud(const PointCloud& pc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    write_pointcloud(pc, out);
}

PointCloud load_pointcloud(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    return read_pointcloud(in);
}

} // namespace topofeat
