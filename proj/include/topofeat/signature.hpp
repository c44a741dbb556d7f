#pragma once

#include "topofeat/persistence.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace topofeat {

// Piecewise-linear path: T samples of an n-channel signal, row-major.
struct PathND {
    std::size_t steps = 0;
    std::size_t channels = 0;
    std::vector<double> data;

    double at(std::size_t t, std::size_t c) const { return data[t * channels + c]; }
    double& at(std::size_t t, std::size_t c) { return data[t * channels + c]; }
};

// Truncated signature: level m holds the n^m iterated integrals in
// lexicographic multi-index order; level 0 is the constant 1.
struct SignatureTensor {
    std::size_t channels = 0;
    std::size_t max_level = 0;
    std::vector<std::vector<double>> levels;

    // channel indices are 1-based, as in the multi-index notation
    double at(std::span<const int> multi_index) const;
    std::vector<double> flatten_levels(std::size_t from_level) const;
};

// Exact signature of a piecewise-linear path: per segment the tensor
// exponential of the increment, concatenated with the Chen (tensor) product.
// max_level 1..4.
SignatureTensor signature(const PathND& path, int max_level);

// Chen concatenation product of two truncated signatures.
SignatureTensor chen_product(const SignatureTensor& a, const SignatureTensor& b);

using MultiIndex = std::vector<int>;

// All order-preserving interleavings of I and J, with multiplicity.
std::vector<MultiIndex> shuffle_product(const MultiIndex& I, const MultiIndex& J);

inline constexpr std::size_t kSignatureFeatureLength = 155; // 5 + 25 + 125

// Per homology dimension (0 and 1): top-5 landscapes at resolution 100 read
// as a 100x5 path, signature to level 3, levels 1..3 concatenated.
std::array<std::vector<double>, 2> signature_feature(const PersistenceDiagram& dg);

} // namespace topofeat
