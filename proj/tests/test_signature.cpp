#include "doctest.h"

#include "topofeat/signature.hpp"
#include "topofeat/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>

using namespace topofeat;

namespace {

PathND make_path(std::size_t channels, std::initializer_list<std::vector<double>> samples) {
    PathND p;
    p.channels = channels;
    p.steps = samples.size();
    for (const auto& s : samples) p.data.insert(p.data.end(), s.begin(), s.end());
    return p;
}

PathND random_path(SeededRng& rng, std::size_t channels, std::size_t steps) {
    PathND p;
    p.channels = channels;
    p.steps = steps;
    p.data.resize(channels * steps);
    for (double& v : p.data) v = rng.uniform(-1, 1);
    return p;
}

std::map<MultiIndex, int> as_multiset(const std::vector<MultiIndex>& v) {
    std::map<MultiIndex, int> m;
    for (const auto& k : v) m[k] += 1;
    return m;
}

} // namespace

TEST_CASE("signature of a single segment is the tensor exponential") {
    const double a = 0.7, b = -1.3;
    const SignatureTensor s = signature(make_path(2, {{0, 0}, {a, b}}), 3);
    CHECK(s.levels[0][0] == 1.0);
    CHECK(s.at(std::vector<int>{1}) == doctest::Approx(a).epsilon(1e-15));
    CHECK(s.at(std::vector<int>{2}) == doctest::Approx(b).epsilon(1e-15));
    CHECK(s.at(std::vector<int>{1, 1}) == doctest::Approx(a * a / 2).epsilon(1e-15));
    CHECK(s.at(std::vector<int>{1, 2}) == doctest::Approx(a * b / 2).epsilon(1e-15));
    CHECK(s.at(std::vector<int>{2, 1}) == doctest::Approx(a * b / 2).epsilon(1e-15));
    CHECK(s.at(std::vector<int>{2, 2}) == doctest::Approx(b * b / 2).epsilon(1e-15));
    CHECK(s.at(std::vector<int>{1, 1, 1}) == doctest::Approx(a * a * a / 6).epsilon(1e-15));
}

TEST_CASE("level counts are n^m and level 1 is the total displacement") {
    SeededRng rng(21);
    for (std::size_t n : {2u, 3u, 5u}) {
        const PathND p = random_path(rng, n, 12);
        const SignatureTensor s = signature(p, 3);
        for (std::size_t m = 0; m <= 3; ++m) {
            std::size_t want = 1;
            for (std::size_t i = 0; i < m; ++i) want *= n;
            CHECK(s.levels[m].size() == want);
        }
        for (std::size_t c = 0; c < n; ++c)
            CHECK(s.levels[1][c] ==
                  doctest::Approx(p.at(p.steps - 1, c) - p.at(0, c)).epsilon(1e-12));
    }
}

TEST_CASE("constant path has zero signature above level 0") {
    const SignatureTensor s = signature(make_path(2, {{1, 2}, {1, 2}, {1, 2}}), 4);
    for (std::size_t m = 1; m <= 4; ++m)
        for (double v : s.levels[m]) CHECK(v == 0.0);
}

TEST_CASE("signature argument validation") {
    const PathND p = make_path(2, {{0, 0}, {1, 1}});
    CHECK_THROWS_AS(signature(p, 0), std::invalid_argument);
    CHECK_THROWS_AS(signature(p, 5), std::invalid_argument);
    CHECK_THROWS_AS(signature(make_path(2, {{0, 0}}), 2), std::invalid_argument);
}

TEST_CASE("shuffle product golden cases") {
    const auto s1 = shuffle_product({1}, {2});
    CHECK(as_multiset(s1) == std::map<MultiIndex, int>{{{1, 2}, 1}, {{2, 1}, 1}});

    // multiplicity 2 on (1,1,2)
    const auto s2 = shuffle_product({1}, {1, 2});
    CHECK(as_multiset(s2) == std::map<MultiIndex, int>{{{1, 1, 2}, 2}, {{1, 2, 1}, 1}});

    const auto s3 = shuffle_product({1, 2}, {});
    CHECK(as_multiset(s3) == std::map<MultiIndex, int>{{{1, 2}, 1}});

    // |I # J| = binomial(|I|+|J|, |I|) with multiplicity
    CHECK(shuffle_product({1, 2}, {3, 4}).size() == 6);
    CHECK(shuffle_product({1, 1}, {1, 1}).size() == 6);
}

TEST_CASE("shuffle identity holds on random paths") {
    SeededRng rng(2025);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.uniform_int(2); // 2 or 3 channels
        const PathND p = random_path(rng, n, 3 + rng.uniform_int(6));
        const SignatureTensor s = signature(p, 3);

        // random multi-indexes with |I| + |J| <= 3
        const std::size_t li = 1 + rng.uniform_int(2);
        const std::size_t lj = li == 1 ? 1 + rng.uniform_int(2) : 1;
        MultiIndex I, J;
        for (std::size_t i = 0; i < li; ++i) I.push_back(1 + int(rng.uniform_int(n)));
        for (std::size_t j = 0; j < lj; ++j) J.push_back(1 + int(rng.uniform_int(n)));

        double sum = 0.0;
        for (const MultiIndex& K : shuffle_product(I, J)) sum += s.at(K);
        const double prod = s.at(I) * s.at(J);
        CHECK(std::abs(prod - sum) <= 1e-9);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("inserting collinear samples never changes the signature") {
    SeededRng rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + rng.uniform_int(2);
        const PathND p = random_path(rng, n, 5);
        // refine: split every segment at a random interior ratio
        PathND refined;
        refined.channels = n;
        for (std::size_t t = 0; t + 1 < p.steps; ++t) {
            const double alpha = rng.uniform(0.1, 0.9);
            refined.steps += 2;
            for (std::size_t c = 0; c < n; ++c) refined.data.push_back(p.at(t, c));
            for (std::size_t c = 0; c < n; ++c)
                refined.data.push_back(p.at(t, c) + alpha * (p.at(t + 1, c) - p.at(t, c)));
        }
        refined.steps += 1;
        for (std::size_t c = 0; c < n; ++c) refined.data.push_back(p.at(p.steps - 1, c));

        const SignatureTensor a = signature(p, 3);
        const SignatureTensor b = signature(refined, 3);
        for (std::size_t m = 0; m <= 3; ++m)
            for (std::size_t i = 0; i < a.levels[m].size(); ++i)
                CHECK(std::abs(a.levels[m][i] - b.levels[m][i]) <= 1e-12);
    }
}

TEST_CASE("Chen identity: signature of a concatenation is the tensor product") {
    SeededRng rng(32);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + rng.uniform_int(2);
        PathND p = random_path(rng, n, 4);
        PathND q = random_path(rng, n, 5);
        for (std::size_t c = 0; c < n; ++c) q.at(0, c) = p.at(p.steps - 1, c); // join endpoints

        PathND joined;
        joined.channels = n;
        joined.steps = p.steps + q.steps - 1;
        joined.data = p.data;
        joined.data.insert(joined.data.end(), q.data.begin() + static_cast<long>(n),
                           q.data.end());

        const SignatureTensor whole = signature(joined, 3);
        const SignatureTensor glued = chen_product(signature(p, 3), signature(q, 3));
        for (std::size_t m = 0; m <= 3; ++m)
            for (std::size_t i = 0; i < whole.levels[m].size(); ++i)
                CHECK(std::abs(whole.levels[m][i] - glued.levels[m][i]) <= 1e-12);
    }
}

TEST_CASE("scaling the path scales level m by 2^m") {
    SeededRng rng(33);
    const PathND p = random_path(rng, 3, 8);
    PathND doubled = p;
    for (double& v : doubled.data) v *= 2.0;
    const SignatureTensor a = signature(p, 3);
    const SignatureTensor b = signature(doubled, 3);
    for (std::size_t m = 1; m <= 3; ++m) {
        const double factor = std::pow(2.0, double(m));
        for (std::size_t i = 0; i < a.levels[m].size(); ++i)
            CHECK(b.levels[m][i] == doctest::Approx(factor * a.levels[m][i]).epsilon(1e-12));
    }
}

TEST_CASE("signature feature has shape 2x155") {
    PersistenceDiagram d;
    for (int dim = 0; dim <= 1; ++dim) {
        for (int i = 0; i < 4; ++i) {
            PersistencePair p;
            p.dim = dim;
            p.birth = 0.1 * i;
            p.death = 0.1 * i + 0.5;
            p.death_simplex = 0;
            d.pairs.push_back(p);
            d.max_filtration = std::max(d.max_filtration, p.death);
        }
    }
    const auto feat = signature_feature(d);
    CHECK(feat[0].size() == kSignatureFeatureLength);
    CHECK(feat[1].size() == kSignatureFeatureLength);
    CHECK(5 + 25 + 125 == kSignatureFeatureLength);

    bool any_nonzero = false;
    for (double v : feat[0]) any_nonzero |= v != 0.0;
    CHECK(any_nonzero);

    const PersistenceDiagram empty;
    const auto zero = signature_feature(empty);
    for (const auto& row : zero)
        for (double v : row) CHECK(v == 0.0);
}

TEST_CASE("doubling the landscape amplitudes scales signature blocks by 2^m") {
    PersistenceDiagram d;
    for (int i = 0; i < 3; ++i) {
        PersistencePair p;
        p.dim = 1;
        p.birth = 0.2 * i;
        p.death = 0.2 * i + 1.0;
        p.death_simplex = 0;
        d.pairs.push_back(p);
    }
    d.max_filtration = 1.4;
    PersistenceDiagram scaled = d;
    for (auto& p : scaled.pairs) {
        p.birth *= 2.0;
        p.death *= 2.0;
    }
    scaled.max_filtration *= 2.0;

    const auto base = signature_feature(d);
    const auto twice = signature_feature(scaled);
    std::size_t off = 0;
    for (std::size_t m = 1; m <= 3; ++m) {
        std::size_t count = 1;
        for (std::size_t i = 0; i < m; ++i) count *= 5;
        const double factor = std::pow(2.0, double(m));
        for (std::size_t i = 0; i < count; ++i)
            CHECK(twice[1][off + i] == doctest::Approx(factor * base[1][off + i]).epsilon(1e-9));
        off += count;
    }
}
