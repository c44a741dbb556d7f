#pragma once

#include "topofeat/complex.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

namespace topofeat {

inline constexpr std::uint32_t kNoIndex = std::numeric_limits<std::uint32_t>::max();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// GF(2) boundary matrix of a canonically sorted, face-closed complex.
// Column j holds the sorted row indices of the facets of simplex j.
struct BoundaryMatrix {
    std::vector<std::vector<std::uint32_t>> columns;
    std::vector<int> dims;
    std::vector<double> values;

    std::size_t size() const { return columns.size(); }
};

BoundaryMatrix boundary_matrix(const FilteredComplex& fc);

// Standard column reduction with the twist (clear paired birth columns while
// sweeping dimensions top-down). After reduction every nonzero column has a
// unique lowest row.
struct ReductionResult {
    std::vector<std::vector<std::uint32_t>> reduced;
    std::vector<std::uint32_t> low_inverse;                        // row -> killing column
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairings; // (birth row, death col)
};

ReductionResult reduce(const BoundaryMatrix& bm);

struct PersistencePair {
    int dim = 0;
    double birth = 0.0;
    double death = kInf;
    std::uint32_t birth_simplex = kNoIndex;
    std::uint32_t death_simplex = kNoIndex; // kNoIndex when infinite

    bool finite() const { return death_simplex != kNoIndex; }
};

struct PersistenceDiagram {
    std::vector<PersistencePair> pairs;      // zero-length pairs excluded
    std::vector<PersistencePair> zero_audit; // birth == death pairs, kept for audit
    FiltrationConvention convention = FiltrationConvention::rips_diameter;
    double max_filtration = 0.0; // truncation fallback for the vectorizers
};

PersistenceDiagram diagram(const FilteredComplex& fc);

// Classes with birth <= i alive past j (infinite deaths count).
std::size_t count_alive(const PersistenceDiagram& dg, int dim, double i, double j);

// Rank of H_k(K_i) -> H_k(K_j), computed by plain GF(2) Gaussian elimination
// on restricted boundary matrices; independent of reduce().
std::size_t persistent_betti(const FilteredComplex& fc, int dim, double i, double j);

// Text interchange: "dim birth death" per line, literal "inf" for infinity.
void write_diagram(const PersistenceDiagram& dg, std::ostream& out);
PersistenceDiagram read_diagram(std::istream& in);

} // namespace topofeat
