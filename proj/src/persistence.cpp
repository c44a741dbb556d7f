#include "topofeat/persistence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <ostream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace topofeat {

namespace {

// symmetric difference of two sorted index lists
std::vector<std::uint32_t> xor_merge(const std::vector<std::uint32_t>& a,
                                     const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) out.push_back(a[i++]);
        else if (b[j] < a[i]) out.push_back(b[j++]);
        else {
            ++i;
            ++j;
        }
    }
    out.insert(out.end(), a.begin() + i, a.end());
    out.insert(out.end(), b.begin() + j, b.end());
    return out;
}

} // namespace

BoundaryMatrix boundary_matrix(const FilteredComplex& fc) {
    if (!fc.is_canonical_sorted())
        throw std::invalid_argument("boundary_matrix: complex is not canonically sorted");

    std::map<Simplex, std::uint32_t> index_of;
    for (std::uint32_t i = 0; i < fc.size(); ++i) index_of.emplace(fc.simplices[i].simplex, i);

    BoundaryMatrix bm;
    bm.columns.resize(fc.size());
    bm.dims.resize(fc.size());
    bm.values.resize(fc.size());
    for (std::uint32_t j = 0; j < fc.size(); ++j) {
        const FilteredSimplex& fs = fc.simplices[j];
        bm.dims[j] = fs.simplex.dim();
        bm.values[j] = fs.value;
        if (fs.simplex.dim() == 0) continue;
        auto& col = bm.columns[j];
        Simplex facet;
        for (std::size_t drop = 0; drop < fs.simplex.v.size(); ++drop) {
            facet.v.clear();
            for (std::size_t t = 0; t < fs.simplex.v.size(); ++t)
                if (t != drop) facet.v.push_back(fs.simplex.v[t]);
            auto it = index_of.find(facet);
            if (it == index_of.end())
                throw std::invalid_argument("boundary_matrix: face missing from complex");
            if (it->second > j)
                throw std::invalid_argument("boundary_matrix: face sorted after coface");
            col.push_back(it->second);
        }
        std::sort(col.begin(), col.end());
    }
    return bm;
}

ReductionResult reduce(const BoundaryMatrix& bm) {
    const std::size_t m = bm.size();
    ReductionResult res;
    res.reduced = bm.columns;
    res.low_inverse.assign(m, kNoIndex);

    int max_dim = 0;
    for (int d : bm.dims) max_dim = std::max(max_dim, d);

    for (int d = max_dim; d >= 1; --d) {
        for (std::uint32_t j = 0; j < m; ++j) {
            if (bm.dims[j] != d) continue;
            auto& col = res.reduced[j];
            while (!col.empty()) {
                const std::uint32_t pivot = col.back();
                const std::uint32_t k = res.low_inverse[pivot];
                if (k == kNoIndex) break;
                col = xor_merge(col, res.reduced[k]);
            }
            if (!col.empty()) {
                const std::uint32_t pivot = col.back();
                res.low_inverse[pivot] = j;
                res.pairings.emplace_back(pivot, j);
                res.reduced[pivot].clear(); // twist: pivot's own column must die to zero
            }
        }
    }
    return res;
}

PersistenceDiagram diagram(const FilteredComplex& fc) {
    FilteredComplex sorted_copy;
    const FilteredComplex* src = &fc;
    if (!fc.is_canonical_sorted()) {
        sorted_copy = fc;
        sorted_copy.sort_canonical();
        src = &sorted_copy;
    }
    const BoundaryMatrix bm = boundary_matrix(*src);
    const ReductionResult red = reduce(bm);

    PersistenceDiagram dg;
    dg.convention = src->convention;
    dg.max_filtration = src->max_value();

    for (const auto& [birth_row, death_col] : red.pairings) {
        PersistencePair p;
        p.dim = bm.dims[birth_row];
        p.birth = bm.values[birth_row];
        p.death = bm.values[death_col];
        p.birth_simplex = birth_row;
        p.death_simplex = death_col;
        if (p.birth == p.death) dg.zero_audit.push_back(p);
        else dg.pairs.push_back(p);
    }
    for (std::uint32_t i = 0; i < bm.size(); ++i) {
        if (red.reduced[i].empty() && red.low_inverse[i] == kNoIndex) {
            PersistencePair p;
            p.dim = bm.dims[i];
            p.birth = bm.values[i];
            p.death = kInf;
            p.birth_simplex = i;
            p.death_simplex = kNoIndex;
            dg.pairs.push_back(p);
        }
    }

    auto order = [](const PersistencePair& a, const PersistencePair& b) {
        if (a.dim != b.dim) return a.dim < b.dim;
        if (a.birth != b.birth) return a.birth < b.birth;
        if (a.death != b.death) return a.death < b.death;
        return a.birth_simplex < b.birth_simplex;
    };
    std::sort(dg.pairs.begin(), dg.pairs.end(), order);
    std::sort(dg.zero_audit.begin(), dg.zero_audit.end(), order);
    return dg;
}

std::size_t count_alive(const PersistenceDiagram& dg, int dim, double i, double j) {
    std::size_t c = 0;
    for (const auto& p : dg.pairs)
        if (p.dim == dim && p.birth <= i && p.death > j) ++c;
    return c;
}

namespace {

// GF(2) column rank with 64-bit word rows.
class Gf2Rank {
public:
    explicit Gf2Rank(std::size_t rows) : words_((rows + 63) / 64) {}

    // rows: sorted indices of set bits
    void add_column(const std::vector<std::uint32_t>& rows) {
        std::vector<std::uint64_t> col(words_, 0);
        for (std::uint32_t r : rows) col[r >> 6] |= std::uint64_t(1) << (r & 63);
        for (auto& pivot : pivots_) {
            const int hb = high_bit(col);
            if (hb < 0) return;
            if (pivot.first == hb) xor_in(col, pivot.second);
        }
        if (high_bit(col) >= 0) {
            pivots_.emplace_back(high_bit(col), col);
            std::sort(pivots_.begin(), pivots_.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
        }
    }

    std::size_t rank() const { return pivots_.size(); }

private:
    static void xor_in(std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
    }
    static int high_bit(const std::vector<std::uint64_t>& col) {
        for (std::size_t w = col.size(); w-- > 0;)
            if (col[w]) return static_cast<int>(w * 64 + 63 - std::countl_zero(col[w]));
        return -1;
    }

    std::size_t words_;
    std::vector<std::pair<int, std::vector<std::uint64_t>>> pivots_;
};

} // namespace

std::size_t persistent_betti(const FilteredComplex& fc, int dim, double i, double j) {
    if (i > j) throw std::invalid_argument("persistent_betti: need i <= j");
    FilteredComplex sorted_copy;
    const FilteredComplex* src = &fc;
    if (!fc.is_canonical_sorted()) {
        sorted_copy = fc;
        sorted_copy.sort_canonical();
        src = &sorted_copy;
    }
    const std::size_t m = src->size();

    // beta_k^{i,j} = dim Z_k(K_i) - dim(Z_k(K_i) ^ B_k(K_j))
    //             = (c_k^i - rank d_k^{<=i}) - (rank d_{k+1}^{<=j} - rank d_{k+1}^{<=j} on rows > i)
    std::size_t c_low = 0;
    Gf2Rank rank_dk(m), rank_dk1(m), rank_dk1_hi(m);

    auto facets_of = [&](const Simplex& s, std::vector<std::uint32_t>& out,
                         const std::map<Simplex, std::uint32_t>& idx) {
        out.clear();
        Simplex facet;
        for (std::size_t drop = 0; drop < s.v.size(); ++drop) {
            facet.v.clear();
            for (std::size_t t = 0; t < s.v.size(); ++t)
                if (t != drop) facet.v.push_back(s.v[t]);
            out.push_back(idx.at(facet));
        }
        std::sort(out.begin(), out.end());
    };

    std::map<Simplex, std::uint32_t> index_of;
    for (std::uint32_t c = 0; c < m; ++c) index_of.emplace(src->simplices[c].simplex, c);

    std::vector<std::uint32_t> rows, hi_rows;
    for (std::uint32_t c = 0; c < m; ++c) {
        const FilteredSimplex& fs = src->simplices[c];
        if (fs.simplex.dim() == dim && fs.value <= i) {
            ++c_low;
            if (dim > 0) {
                facets_of(fs.simplex, rows, index_of);
                rank_dk.add_column(rows);
            }
        }
        if (fs.simplex.dim() == dim + 1 && fs.value <= j) {
            facets_of(fs.simplex, rows, index_of);
            rank_dk1.add_column(rows);
            hi_rows.clear();
            for (std::uint32_t r : rows)
                if (src->simplices[r].value > i) hi_rows.push_back(r);
            rank_dk1_hi.add_column(hi_rows);
        }
    }

    const std::size_t cycles = c_low - rank_dk.rank();
    const std::size_t boundaries_in_low = rank_dk1.rank() - rank_dk1_hi.rank();
    return cycles - boundaries_in_low;
}

void write_diagram(const PersistenceDiagram& dg, std::ostream& out) {
    for (const auto& p : dg.pairs) {
        out << p.dim << ' ' << format_double(p.birth) << ' ';
        if (p.finite()) out << format_double(p.death);
        else out << "inf";
        out << '\n';
    }
}

PersistenceDiagram read_diagram(std::istream& in) {
    PersistenceDiagram dg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string td, tb, tdd;
        if (!(ls >> td)) continue;
        if (!(ls >> tb >> tdd))
            throw std::runtime_error("diagram: malformed line " + std::to_string(lineno));
        PersistencePair p;
        p.dim = std::stoi(td);
        p.birth = std::stod(tb);
        if (tdd == "inf") {
            p.death = kInf;
            p.death_simplex = kNoIndex;
        } else {
            p.death = std::stod(tdd);
            p.death_simplex = 0; // finite marker; simplex indices are not serialized
        }
        dg.pairs.push_back(p);
        dg.max_filtration = std::max(dg.max_filtration, p.finite() ? p.death : p.birth);
    }
    return dg;
}

} // namespace topofeat
