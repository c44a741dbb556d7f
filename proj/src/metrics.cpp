#include "topofeat/metrics.hpp"

#include "topofeat/complex.hpp"
#include "topofeat/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace topofeat {

namespace {

struct DgmPoint {
    double birth, death;
    double diag_cost() const { return (death - birth) / 2.0; }
};

double linf(const DgmPoint& a, const DgmPoint& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

std::vector<DgmPoint> finite_points(const PersistenceDiagram& dg, int dim) {
    std::vector<DgmPoint> pts;
    for (const auto& p : dg.pairs)
        if (p.dim == dim && p.finite()) pts.push_back({p.birth, p.death});
    return pts;
}

std::vector<double> infinite_births(const PersistenceDiagram& dg, int dim) {
    std::vector<double> b;
    for (const auto& p : dg.pairs)
        if (p.dim == dim && !p.finite()) b.push_back(p.birth);
    std::sort(b.begin(), b.end());
    return b;
}

// Infinite bars pair across diagrams by sorted birth order; equal counts
// required.
bool infinite_part(const PersistenceDiagram& D, const PersistenceDiagram& E, int dim,
                   double& cost) {
    const auto bd = infinite_births(D, dim);
    const auto be = infinite_births(E, dim);
    if (bd.size() != be.size()) return false;
    cost = 0.0;
    for (std::size_t i = 0; i < bd.size(); ++i)
        cost = std::max(cost, std::abs(bd[i] - be[i]));
    return true;
}

// Kuhn's augmenting-path bipartite matching.
class Matcher {
public:
    Matcher(std::size_t n_left, std::size_t n_right)
        : adj_(n_left), match_left_(n_left, kNoIndex), match_right_(n_right, kNoIndex) {}

    void add_edge(std::size_t l, std::size_t r) { adj_[l].push_back(r); }

    std::size_t max_matching() {
        std::size_t matched = 0;
        for (std::size_t l = 0; l < adj_.size(); ++l) {
            visited_.assign(match_right_.size(), false);
            if (try_augment(l)) ++matched;
        }
        return matched;
    }

private:
    bool try_augment(std::size_t l) {
        for (std::size_t r : adj_[l]) {
            if (visited_[r]) continue;
            visited_[r] = true;
            if (match_right_[r] == kNoIndex || try_augment(match_right_[r])) {
                match_left_[l] = static_cast<std::uint32_t>(r);
                match_right_[r] = static_cast<std::uint32_t>(l);
                return true;
            }
        }
        return false;
    }

    std::vector<std::vector<std::size_t>> adj_;
    std::vector<std::uint32_t> match_left_, match_right_;
    std::vector<bool> visited_;
};

// Perfect matching in the diagonal-augmented bipartite graph at cost cap c.
// Left = D points + |E| diagonal slots, right = E points + |D| diagonal slots.
bool feasible(const std::vector<DgmPoint>& D, const std::vector<DgmPoint>& E, double c) {
    const std::size_t nd = D.size(), ne = E.size();
    Matcher m(nd + ne, ne + nd);
    for (std::size_t i = 0; i < nd; ++i) {
        for (std::size_t j = 0; j < ne; ++j)
            if (linf(D[i], E[j]) <= c) m.add_edge(i, j);
        if (D[i].diag_cost() <= c) m.add_edge(i, ne + i);
    }
    for (std::size_t j = 0; j < ne; ++j) {
        if (E[j].diag_cost() <= c) m.add_edge(nd + j, j);
        for (std::size_t i = 0; i < nd; ++i) m.add_edge(nd + j, ne + i); // diagonal-diagonal, free
    }
    return m.max_matching() == nd + ne;
}

double finite_bottleneck(const std::vector<DgmPoint>& D, const std::vector<DgmPoint>& E) {
    if (D.empty() && E.empty()) return 0.0;
    std::vector<double> candidates{0.0};
    for (const auto& p : D) candidates.push_back(p.diag_cost());
    for (const auto& q : E) candidates.push_back(q.diag_cost());
    for (const auto& p : D)
        for (const auto& q : E) candidates.push_back(linf(p, q));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // all-diagonal matching is feasible at the max candidate, so hi is valid
    std::size_t lo = 0, hi = candidates.size() - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (feasible(D, E, candidates[mid])) hi = mid;
        else lo = mid + 1;
    }
    return candidates[lo];
}

} // namespace

double bottleneck(const PersistenceDiagram& D, const PersistenceDiagram& E, int dim) {
    double inf_cost = 0.0;
    if (!infinite_part(D, E, dim, inf_cost)) return kInf;
    const double fin = finite_bottleneck(finite_points(D, dim), finite_points(E, dim));
    return std::max(fin, inf_cost);
}

namespace {

double oracle_rec(const std::vector<DgmPoint>& D, const std::vector<DgmPoint>& E,
                  std::vector<bool>& used_e, std::size_t i) {
    if (i == D.size()) {
        double worst = 0.0;
        for (std::size_t j = 0; j < E.size(); ++j)
            if (!used_e[j]) worst = std::max(worst, E[j].diag_cost());
        return worst;
    }
    // D[i] to the diagonal
    double best = std::max(D[i].diag_cost(), oracle_rec(D, E, used_e, i + 1));
    // D[i] to each unused E point
    for (std::size_t j = 0; j < E.size(); ++j) {
        if (used_e[j]) continue;
        used_e[j] = true;
        best = std::min(best, std::max(linf(D[i], E[j]), oracle_rec(D, E, used_e, i + 1)));
        used_e[j] = false;
    }
    return best;
}

} // namespace

double bottleneck_oracle(const PersistenceDiagram& D, const PersistenceDiagram& E, int dim) {
    const auto dp = finite_points(D, dim);
    const auto ep = finite_points(E, dim);
    if (dp.size() + ep.size() > 6)
        throw std::invalid_argument("bottleneck_oracle: more than 6 off-diagonal points");
    double inf_cost = 0.0;
    if (!infinite_part(D, E, dim, inf_cost)) return kInf;
    std::vector<bool> used(ep.size(), false);
    return std::max(oracle_rec(dp, ep, used, 0), inf_cost);
}

StabilityResult stability_probe(const PointCloud& pc, double noise, std::uint64_t seed) {
    if (noise < 0) throw std::invalid_argument("stability_probe: noise must be >= 0");

    SeededRng rng(seed);
    PointCloud perturbed = pc;
    for (Point2& p : perturbed.points) {
        p.x += rng.uniform(-noise, noise);
        p.y += rng.uniform(-noise, noise);
    }

    const auto base = diagram(build_cech(pc, 2, kInf));
    const auto moved = diagram(build_cech(perturbed, 2, kInf));

    StabilityResult res;
    res.bound = std::sqrt(2.0) * noise;
    for (int dim = 0; dim <= 1; ++dim) {
        res.d_b[static_cast<std::size_t>(dim)] = bottleneck(base, moved, dim);
        if (res.d_b[static_cast<std::size_t>(dim)] > res.bound + 1e-12) res.violation = true;
    }
    return res;
}

} // namespace topofeat
