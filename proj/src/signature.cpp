#include "topofeat/signature.hpp"

#include "topofeat/vectorize.hpp"

#include <cmath>
#include <stdexcept>

namespace topofeat {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    while (exp--) r *= base;
    return r;
}

} // namespace

double SignatureTensor::at(std::span<const int> multi_index) const {
    const std::size_t m = multi_index.size();
    if (m > max_level) throw std::out_of_range("SignatureTensor::at: level too high");
    std::size_t offset = 0;
    for (int ch : multi_index) {
        if (ch < 1 || static_cast<std::size_t>(ch) > channels)
            throw std::out_of_range("SignatureTensor::at: channel out of range");
        offset = offset * channels + static_cast<std::size_t>(ch - 1);
    }
    return levels[m][offset];
}

std::vector<double> SignatureTensor::flatten_levels(std::size_t from_level) const {
    std::vector<double> out;
    for (std::size_t m = from_level; m <= max_level; ++m)
        out.insert(out.end(), levels[m].begin(), levels[m].end());
    return out;
}

namespace {

SignatureTensor identity_tensor(std::size_t channels, std::size_t max_level) {
    SignatureTensor s;
    s.channels = channels;
    s.max_level = max_level;
    s.levels.resize(max_level + 1);
    for (std::size_t m = 0; m <= max_level; ++m) s.levels[m].assign(ipow(channels, m), 0.0);
    s.levels[0][0] = 1.0;
    return s;
}

// tensor exponential of a single linear increment: level m = delta^(x)m / m!
SignatureTensor segment_signature(std::span<const double> delta, std::size_t max_level) {
    const std::size_t n = delta.size();
    SignatureTensor s = identity_tensor(n, max_level);
    for (std::size_t m = 1; m <= max_level; ++m) {
        const auto& prev = s.levels[m - 1];
        auto& cur = s.levels[m];
        const double inv_m = 1.0 / static_cast<double>(m);
        for (std::size_t i = 0; i < prev.size(); ++i)
            for (std::size_t c = 0; c < n; ++c) cur[i * n + c] = prev[i] * delta[c] * inv_m;
    }
    return s;
}

} // namespace

SignatureTensor chen_product(const SignatureTensor& a, const SignatureTensor& b) {
    if (a.channels != b.channels || a.max_level != b.max_level)
        throw std::invalid_argument("chen_product: shape mismatch");
    const std::size_t n = a.channels;
    SignatureTensor out = identity_tensor(n, a.max_level);
    for (std::size_t m = 0; m <= a.max_level; ++m) {
        auto& dst = out.levels[m];
        dst.assign(dst.size(), 0.0);
        for (std::size_t p = 0; p <= m; ++p) {
            const auto& la = a.levels[p];
            const auto& lb = b.levels[m - p];
            const std::size_t nb = lb.size();
            for (std::size_t i = 0; i < la.size(); ++i) {
                if (la[i] == 0.0) continue;
                for (std::size_t j = 0; j < nb; ++j) dst[i * nb + j] += la[i] * lb[j];
            }
        }
    }
    return out;
}

SignatureTensor signature(const PathND& path, int max_level) {
    if (max_level < 1 || max_level > 4)
        throw std::invalid_argument("signature: max_level must be 1..4");
    if (path.steps < 2) throw std::invalid_argument("signature: need at least 2 samples");
    if (path.channels == 0) throw std::invalid_argument("signature: need at least 1 channel");

    const std::size_t levels = static_cast<std::size_t>(max_level);
    SignatureTensor acc = identity_tensor(path.channels, levels);
    std::vector<double> delta(path.channels);
    for (std::size_t t = 0; t + 1 < path.steps; ++t) {
        for (std::size_t c = 0; c < path.channels; ++c)
            delta[c] = path.at(t + 1, c) - path.at(t, c);
        acc = chen_product(acc, segment_signature(delta, levels));
    }
    return acc;
}

std::vector<MultiIndex> shuffle_product(const MultiIndex& I, const MultiIndex& J) {
    if (I.empty()) return {J};
    if (J.empty()) return {I};
    std::vector<MultiIndex> out;
    // head of I first
    for (MultiIndex tail : shuffle_product(MultiIndex(I.begin() + 1, I.end()), J)) {
        MultiIndex k{I.front()};
        k.insert(k.end(), tail.begin(), tail.end());
        out.push_back(std::move(k));
    }
    // head of J first
    for (MultiIndex tail : shuffle_product(I, MultiIndex(J.begin() + 1, J.end()))) {
        MultiIndex k{J.front()};
        k.insert(k.end(), tail.begin(), tail.end());
        out.push_back(std::move(k));
    }
    return out;
}

std::array<std::vector<double>, 2> signature_feature(const PersistenceDiagram& dg) {
    constexpr std::size_t k_max = 5;
    constexpr std::size_t resolution = 100;
    constexpr int max_level = 3;

    std::array<std::vector<double>, 2> feature;
    for (int dim = 0; dim <= 1; ++dim) {
        const LandscapeSet ls = landscapes(dg, dim, k_max, resolution);
        PathND path;
        path.steps = resolution;
        path.channels = k_max;
        path.data.resize(resolution * k_max);
        for (std::size_t t = 0; t < resolution; ++t)
            for (std::size_t k = 0; k < k_max; ++k) path.at(t, k) = ls.values[k][t];
        const SignatureTensor sig = signature(path, max_level);
        feature[static_cast<std::size_t>(dim)] = sig.flatten_levels(1);
    }
    return feature;
}

} // namespace topofeat
