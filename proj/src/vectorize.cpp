#include "topofeat/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace topofeat {

double tent_eval(const Tent& t, double x) {
    return std::max(0.0, std::min(x - t.birth, t.death - x));
}

std::vector<Tent> finite_tents(const PersistenceDiagram& dg, int dim) {
    double max_death = 0.0;
    bool has_finite = false;
    for (const auto& p : dg.pairs) {
        if (p.finite()) {
            max_death = std::max(max_death, p.death);
            has_finite = true;
        }
    }
    const double truncate_to = has_finite ? max_death : dg.max_filtration;

    std::vector<Tent> tents;
    for (const auto& p : dg.pairs) {
        if (p.dim != dim) continue;
        const double death = p.finite() ? p.death : truncate_to;
        if (death > p.birth) tents.push_back({p.birth, death});
    }
    return tents;
}

namespace {

// shared grid setup; empty layers get a zero function on [0,1]
void grid_range(const std::vector<Tent>& tents, double& t_min, double& t_max) {
    if (tents.empty()) {
        t_min = 0.0;
        t_max = 1.0;
        return;
    }
    t_min = tents[0].birth;
    t_max = tents[0].death;
    for (const Tent& t : tents) {
        t_min = std::min(t_min, t.birth);
        t_max = std::max(t_max, t.death);
    }
}

} // namespace

LandscapeSet landscapes(const PersistenceDiagram& dg, int dim, std::size_t k_max,
                        std::size_t resolution) {
    if (resolution < 2) throw std::invalid_argument("landscapes: resolution must be >= 2");
    if (k_max == 0) throw std::invalid_argument("landscapes: k_max must be >= 1");

    const std::vector<Tent> tents = finite_tents(dg, dim);

    LandscapeSet ls;
    ls.k_max = k_max;
    ls.resolution = resolution;
    grid_range(tents, ls.t_min, ls.t_max);
    ls.values.assign(k_max, std::vector<double>(resolution, 0.0));
    if (tents.empty()) return ls;

    std::vector<double> heights(tents.size());
    for (std::size_t s = 0; s < resolution; ++s) {
        const double t = ls.t_at(s);
        for (std::size_t p = 0; p < tents.size(); ++p) heights[p] = tent_eval(tents[p], t);
        const std::size_t top = std::min(k_max, heights.size());
        // partial selection of the top-k levels
        std::nth_element(heights.begin(), heights.begin() + (top - 1), heights.end(),
                         std::greater<>());
        std::sort(heights.begin(), heights.begin() + top, std::greater<>());
        for (std::size_t k = 0; k < top; ++k) ls.values[k][s] = heights[k];
    }
    return ls;
}

SilhouettePath silhouette(const PersistenceDiagram& dg, int dim, WeightKind weight,
                          std::size_t resolution, double power) {
    if (resolution < 2) throw std::invalid_argument("silhouette: resolution must be >= 2");

    const std::vector<Tent> tents = finite_tents(dg, dim);

    SilhouettePath sp;
    sp.resolution = resolution;
    sp.weight_kind = weight;
    sp.power = power;
    grid_range(tents, sp.t_min, sp.t_max);
    sp.values.assign(resolution, 0.0);
    if (tents.empty()) return sp;

    std::vector<double> w(tents.size(), 1.0);
    if (weight == WeightKind::power)
        for (std::size_t p = 0; p < tents.size(); ++p)
            w[p] = std::pow(tents[p].death - tents[p].birth, power);
    double w_sum = 0.0;
    for (double x : w) w_sum += x;
    if (w_sum <= 0.0) return sp;

    for (std::size_t s = 0; s < resolution; ++s) {
        const double t = sp.t_min + (sp.t_max - sp.t_min) * static_cast<double>(s) /
                                        static_cast<double>(resolution - 1);
        double acc = 0.0;
        for (std::size_t p = 0; p < tents.size(); ++p) acc += w[p] * tent_eval(tents[p], t);
        sp.values[s] = acc / w_sum;
    }
    return sp;
}

double landscape_norm(const LandscapeSet& ls, double p) {
    if (p < 1.0) throw std::invalid_argument("landscape_norm: p must be >= 1");
    const double h = ls.step();
    double total = 0.0;
    for (const auto& level : ls.values) {
        double integral = 0.0;
        for (std::size_t s = 0; s + 1 < level.size(); ++s)
            integral += 0.5 * h * (std::pow(level[s], p) + std::pow(level[s + 1], p));
        total += integral;
    }
    return std::pow(total, 1.0 / p);
}

LandscapeSet mean_landscape(std::span<const LandscapeSet> sets) {
    if (sets.empty()) throw std::invalid_argument("mean_landscape: empty input");
    const LandscapeSet& first = sets[0];
    for (const LandscapeSet& ls : sets) {
        if (ls.k_max != first.k_max || ls.resolution != first.resolution ||
            ls.t_min != first.t_min || ls.t_max != first.t_max)
            throw std::invalid_argument("mean_landscape: grid mismatch");
    }
    LandscapeSet mean = first;
    for (std::size_t k = 0; k < mean.k_max; ++k)
        for (std::size_t s = 0; s < mean.resolution; ++s) {
            double acc = 0.0;
            for (const LandscapeSet& ls : sets) acc += ls.values[k][s];
            mean.values[k][s] = acc / static_cast<double>(sets.size());
        }
    return mean;
}

} // namespace topofeat
