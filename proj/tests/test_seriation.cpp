#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "cif/error.hpp"
#include "cif/seriation.hpp"
#include "oracles.hpp"

using namespace cif;

namespace {

SimilarityMatrix matrix_from(std::size_t d, const std::vector<std::optional<double>>& upper) {
    SimilarityMatrix m;
    for (std::size_t i = 0; i < d; ++i) m.features.push_back("f" + std::to_string(i));
    m.cells.assign(d * d, std::nullopt);
    std::size_t k = 0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j, ++k) m.at(i, j) = m.at(j, i) = upper[k];
    m.ordering.resize(d);
    std::iota(m.ordering.begin(), m.ordering.end(), 0);
    return m;
}

SimilarityMatrix random_matrix(std::mt19937_64& rng, std::size_t d) {
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::optional<double>> upper;
    for (std::size_t k = 0; k < d * (d - 1) / 2; ++k) {
        const double v = u(rng);
        upper.push_back(v < 0.1 ? std::nullopt : std::optional<double>(v));
    }
    return matrix_from(d, upper);
}

}  // namespace

TEST_CASE("feature distances on a hand-computed 3x3 matrix") {
    const auto m = matrix_from(3, {0.5, std::nullopt, 1.0});
    const auto d = feature_distances(m);
    CHECK(d(0, 1) == doctest::Approx(std::sqrt(1.5)));
    CHECK(d(0, 2) == doctest::Approx(1.5));
    CHECK(d(1, 2) == doctest::Approx(0.5));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(d(i, i) == 0.0);
        for (std::size_t j = 0; j < 3; ++j) CHECK(d(i, j) == d(j, i));
    }
}

TEST_CASE("UPGMA on two leaves and on collinear points") {
    DistanceMatrix two(2);
    two(0, 1) = two(1, 0) = 0.7;
    const auto t2 = hierarchical_cluster(two);
    REQUIRE(t2.merges.size() == 1);
    CHECK(t2.merges[0].a == 0);
    CHECK(t2.merges[0].b == 1);
    CHECK(t2.merges[0].height == 0.7);

    const std::vector<double> x{0, 1, 3, 7};
    DistanceMatrix d(4);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) d(a, b) = std::abs(x[a] - x[b]);
    const auto t = hierarchical_cluster(d);
    REQUIRE(t.merges.size() == 3);
    CHECK(t.merges[0].a == 0);
    CHECK(t.merges[0].b == 1);
    CHECK(t.merges[0].height == 1.0);
    CHECK(t.merges[1].a == 2);
    CHECK(t.merges[1].b == 4);
    CHECK(t.merges[1].height == 2.5);
    CHECK(t.merges[2].a == 3);
    CHECK(t.merges[2].b == 5);
    CHECK(t.merges[2].height == doctest::Approx(17.0 / 3.0));
}

TEST_CASE("UPGMA rejects malformed distances") {
    DistanceMatrix d(2);
    d(0, 1) = 1.0;
    d(1, 0) = 2.0;
    CHECK_THROWS_AS(hierarchical_cluster(d), Error);
    d(1, 0) = 1.0;
    d(0, 0) = 0.5;
    CHECK_THROWS_AS(hierarchical_cluster(d), Error);
    CHECK_THROWS_AS(hierarchical_cluster(DistanceMatrix{}), Error);
}

TEST_CASE("UPGMA heights never decrease") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = oracle::random_euclidean_distances(rng, 2 + static_cast<std::size_t>(trial % 20));
        const auto t = hierarchical_cluster(d);
        CHECK(t.merges.size() == d.size() - 1);
        for (std::size_t i = 1; i < t.merges.size(); ++i)
            CHECK(t.merges[i].height >= t.merges[i - 1].height - 1e-12);
        auto leaves = t.leaf_order();
        std::sort(leaves.begin(), leaves.end());
        for (std::size_t i = 0; i < leaves.size(); ++i) CHECK(leaves[i] == i);
    }
}

TEST_CASE("OLO on two features is the identity") {
    const auto m = matrix_from(2, {0.3});
    const auto d = feature_distances(m);
    const auto o = optimal_leaf_order(hierarchical_cluster(d), d);
    CHECK(o.permutation == std::vector<std::size_t>{0, 1});
    CHECK(o.method == OrderingMethod::Olo);
}

TEST_CASE("OLO matches brute force over all subtree flips") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t d = 2 + static_cast<std::size_t>(trial % 7);  // up to 8 leaves
        const auto dist = trial % 2 ? oracle::random_euclidean_distances(rng, d)
                                    : feature_distances(random_matrix(rng, d));
        const auto tree = hierarchical_cluster(dist);
        const auto o = optimal_leaf_order(tree, dist);
        const double best = oracle::brute_force_olo_cost(tree, dist);
        CHECK(o.cost == doctest::Approx(best).epsilon(1e-12));
        CHECK(o.cost == doctest::Approx(ordering_cost(o.permutation, dist)).epsilon(1e-12));

        auto reversed = o.permutation;
        std::reverse(reversed.begin(), reversed.end());
        CHECK(ordering_cost(reversed, dist) == doctest::Approx(o.cost).epsilon(1e-12));
        CHECK(o.cost <= ordering_cost(tree.leaf_order(), dist) + 1e-12);
        // lexicographic tie-break: never worse than its own reversal
        CHECK(o.permutation <= reversed);
    }
}

TEST_CASE("OLO is deterministic") {
    std::mt19937_64 rng(77);
    const auto dist = feature_distances(random_matrix(rng, 23));
    const auto tree = hierarchical_cluster(dist);
    const auto a = optimal_leaf_order(tree, dist);
    for (int rep = 0; rep < 3; ++rep) CHECK(optimal_leaf_order(tree, dist).permutation == a.permutation);
}

TEST_CASE("apply_order") {
    std::mt19937_64 rng(3);
    const auto m = random_matrix(rng, 6);
    const std::vector<std::size_t> identity{0, 1, 2, 3, 4, 5};
    const auto same = apply_order(m, identity);
    CHECK(same.cells == m.cells);
    CHECK(same.features == m.features);

    const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
    const auto p = apply_order(m, perm);
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = 0; b < 6; ++b) {
            CHECK(p.at(a, b) == m.at(perm[a], perm[b]));
            CHECK(p.at(a, b) == p.at(b, a));
        }
    std::vector<std::size_t> inverse(6);
    for (std::size_t i = 0; i < 6; ++i) inverse[perm[i]] = i;
    const auto back = apply_order(p, inverse);
    CHECK(back.cells == m.cells);
    CHECK(back.features == m.features);

    CHECK_THROWS_AS(apply_order(m, {0, 1, 2}), Error);
    CHECK_THROWS_AS(apply_order(m, {0, 0, 1, 2, 3, 4}), Error);
}

TEST_CASE("ordering names") {
    CHECK(parse_ordering("olo") == OrderingMethod::Olo);
    CHECK(parse_ordering("ORIGINAL") == OrderingMethod::Original);
    CHECK_THROWS_AS(parse_ordering("spectral"), Error);
}
