#pragma once

#include "topofeat/persistence.hpp"
#include "topofeat/pointcloud.hpp"

#include <array>
#include <cstdint>

namespace topofeat {

// Bottleneck distance between the dim-k layers of two diagrams. Finite points
// may match the diagonal at cost (death-birth)/2; infinite bars must pair with
// infinite bars (count mismatch gives +inf). Exact: binary search over the
// finite set of candidate costs with a bipartite feasibility check.
double bottleneck(const PersistenceDiagram& D, const PersistenceDiagram& E, int dim);

// Exhaustive matching enumeration; requires at most 6 off-diagonal points in
// total. Test oracle for bottleneck().
double bottleneck_oracle(const PersistenceDiagram& D, const PersistenceDiagram& E, int dim);

// Desk-scale stability check: perturb each point by uniform noise in
// [-noise, noise]^2, compare Cech (radius convention) diagrams per dimension
// against the Hausdorff bound sqrt(2)*noise.
struct StabilityResult {
    std::array<double, 2> d_b{0.0, 0.0}; // dims 0, 1
    double bound = 0.0;
    bool violation = false;
};

StabilityResult stability_probe(const PointCloud& pc, double noise, std::uint64_t seed);

} // namespace topofeat
