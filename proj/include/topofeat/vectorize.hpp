#pragma once

#include "topofeat/persistence.hpp"

#include <span>
#include <vector>

namespace topofeat {

// Triangle bump over a finite bar: zero outside [b,d], slope +-1, apex
// (d-b)/2 at the midpoint.
struct Tent {
    double birth = 0.0;
    double death = 0.0;
};

double tent_eval(const Tent& t, double x);

// Finite tents of the dim-k layer; infinite deaths truncated to the diagram's
// max finite death (fallback: the complex's max filtration value).
std::vector<Tent> finite_tents(const PersistenceDiagram& dg, int dim);

struct LandscapeSet {
    std::size_t k_max = 0;
    std::size_t resolution = 0;
    double t_min = 0.0; // raw grid range kept as metadata
    double t_max = 1.0;
    bool domain_normalized = true;           // grid reported on [0,1]
    std::vector<std::vector<double>> values; // k_max rows of resolution samples

    double t_at(std::size_t idx) const {
        return t_min + (t_max - t_min) * static_cast<double>(idx) /
                           static_cast<double>(resolution - 1);
    }
    double step() const { return (t_max - t_min) / static_cast<double>(resolution - 1); }
};

// lambda_k(t) = k-th largest tent value at t, sampled on a uniform grid over
// [min birth, max truncated death]; missing levels are zero rows.
LandscapeSet landscapes(const PersistenceDiagram& dg, int dim, std::size_t k_max,
                        std::size_t resolution);

enum class WeightKind { constant, power };

struct SilhouettePath {
    std::size_t resolution = 0;
    double t_min = 0.0;
    double t_max = 1.0;
    WeightKind weight_kind = WeightKind::constant;
    double power = 1.0;
    std::vector<double> values;
};

// Weighted average of the tents; constant weights w_p = 1, power weights
// w_p = (d-b)^p.
SilhouettePath silhouette(const PersistenceDiagram& dg, int dim, WeightKind weight,
                          std::size_t resolution, double power = 1.0);

// ( sum_k ||lambda_k||_p^p )^(1/p), each level integrated by the trapezoid
// rule on the raw grid.
double landscape_norm(const LandscapeSet& ls, double p);

// Pointwise arithmetic mean; grids and k_max must match.
LandscapeSet mean_landscape(std::span<const LandscapeSet> sets);

} // namespace topofeat
