#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "cif/error.hpp"
#include "cif/importance.hpp"

using namespace cif;

namespace {

Dataset from_columns(const std::vector<std::string>& names, const std::vector<std::vector<double>>& cols) {
    std::string csv;
    for (std::size_t c = 0; c < names.size(); ++c) csv += (c ? "," : "") + names[c];
    csv += '\n';
    for (std::size_t r = 0; r < cols[0].size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%s%.17g", c ? "," : "", cols[c][r]);
            csv += buf;
        }
        csv += '\n';
    }
    return load_csv(csv);
}

std::vector<double> normal_column(std::mt19937_64& rng, std::size_t n, double mean = 0, double sd = 1) {
    std::normal_distribution<double> g(mean, sd);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

}  // namespace

TEST_CASE("ridge with lambda 0 recovers an exact linear relation") {
    std::mt19937_64 rng(1);
    const auto x1 = normal_column(rng, 80, 10, 3);
    const auto x2 = normal_column(rng, 80, -5, 2);
    const auto ds = from_columns({"x1", "x2", "y"}, {x1, x2, x1});
    const auto m = fit_ridge(ds, "y", 0.0);
    const auto raw = m.raw_coefficients();
    CHECK(raw[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(raw[1]) < 1e-9);
    CHECK(m.predict(std::vector<double>{4.0, 100.0}) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("ridge coefficients vanish as lambda grows") {
    std::mt19937_64 rng(2);
    const auto x1 = normal_column(rng, 50), x2 = normal_column(rng, 50), noise = normal_column(rng, 50);
    std::vector<double> y(50);
    for (std::size_t i = 0; i < 50; ++i) y[i] = 2 * x1[i] - x2[i] + 0.1 * noise[i];
    const auto ds = from_columns({"x1", "x2", "y"}, {x1, x2, y});
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : {0.0, 1.0, 10.0, 1e3, 1e9}) {
        const auto m = fit_ridge(ds, "y", lambda);
        const double norm = std::hypot(m.coefficients[0], m.coefficients[1]);
        CHECK(norm <= previous);
        previous = norm;
    }
    CHECK(previous < 1e-6);
}

TEST_CASE("synthetic target 3 z1 + 0.5 z2 ranks x1 first") {
    std::mt19937_64 rng(3);
    const auto x1 = normal_column(rng, 200, 4, 2), x2 = normal_column(rng, 200, 1, 5), x3 = normal_column(rng, 200);
    const auto z1 = zscore(x1), z2 = zscore(x2);
    std::vector<double> y(200);
    for (std::size_t i = 0; i < 200; ++i) y[i] = 3 * z1[i] + 0.5 * z2[i];
    const auto ds = from_columns({"x1", "x2", "x3", "y"}, {x1, x2, x3, y});
    const auto m = fit_ridge(ds, "y", 0.0);
    CHECK(m.coefficients[0] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(m.coefficients[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(m.coefficients[2]) < 1e-9);
    const auto r = rank_features(linear_shapley(m, ds), "y");
    CHECK(r.ranks == std::vector<int>{1, 2, 3});
    CHECK(r.scores[0] > r.scores[1]);
}

TEST_CASE("linear Shapley values satisfy local accuracy") {
    std::mt19937_64 rng(4);
    std::vector<std::vector<double>> cols;
    for (int c = 0; c < 5; ++c) cols.push_back(normal_column(rng, 120, c, 1 + c));
    const auto ds = from_columns({"a", "b", "c", "d", "t"}, cols);
    const auto m = fit_ridge(ds, "t", 1.0);
    const auto phi = linear_shapley(m, ds);
    std::vector<double> row(4);
    double mean_prediction = 0;
    std::vector<double> predictions(ds.n_rows());
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        for (std::size_t j = 0; j < 4; ++j) row[j] = cols[j][i];
        predictions[i] = m.predict(row);
        mean_prediction += predictions[i];
    }
    mean_prediction /= static_cast<double>(ds.n_rows());
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        double sum = 0;
        for (std::size_t j = 0; j < 4; ++j) sum += phi.at(i, j);
        CHECK(std::abs(sum - (predictions[i] - mean_prediction)) < 1e-10);
    }
}

TEST_CASE("a constant predictor gets zero attribution") {
    std::mt19937_64 rng(5);
    const auto x = normal_column(rng, 40), y = normal_column(rng, 40);
    const auto ds = from_columns({"x", "flat", "y"}, {x, std::vector<double>(40, 2.5), y});
    const auto m = fit_ridge(ds, "y", 1.0);
    const auto phi = linear_shapley(m, ds);
    for (std::size_t i = 0; i < ds.n_rows(); ++i) CHECK(phi.at(i, 1) == 0.0);
    CHECK(rank_features(phi, "y").ranks[1] == 2);
}

TEST_CASE("duplicated predictors share credit equally") {
    std::mt19937_64 rng(6);
    const auto x = normal_column(rng, 60), w = normal_column(rng, 60), noise = normal_column(rng, 60);
    std::vector<double> y(60);
    for (std::size_t i = 0; i < 60; ++i) y[i] = x[i] + 0.2 * w[i] + 0.05 * noise[i];
    const auto ds = from_columns({"x", "x_copy", "w", "y"}, {x, x, w, y});
    const auto m = fit_ridge(ds, "y", 1.0);
    const auto phi = linear_shapley(m, ds);
    for (std::size_t i = 0; i < ds.n_rows(); ++i) CHECK(std::abs(phi.at(i, 0) - phi.at(i, 1)) < 1e-8);

    try {
        fit_ridge(ds, "y", 0.0);
        FAIL("expected a singular system");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidArgument);
        CHECK(std::string(e.what()).find("lambda > 0") != std::string::npos);
    }
}

TEST_CASE("fit_ridge argument errors") {
    const auto ds = load_csv("name,a,b,c\nx,1,2,3\ny,2,1,5\nz,4,4,1\n");
    CHECK_THROWS_AS(fit_ridge(ds, "name"), Error);
    CHECK_THROWS_AS(fit_ridge(ds, "missing"), Error);
    CHECK_THROWS_AS(fit_ridge(ds, "a", -1.0), Error);
    CHECK_THROWS_AS(fit_ridge(ds, "a", 1.0, {"b"}), Error);
    CHECK_THROWS_AS(fit_ridge(ds, "a", 1.0, {"a", "b"}), Error);
}

TEST_CASE("exact linear Shapley agrees with the Monte Carlo oracle") {
    std::mt19937_64 rng(7);
    std::vector<std::vector<double>> cols;
    for (int c = 0; c < 5; ++c) cols.push_back(normal_column(rng, 30, 2 * c, 1 + 0.5 * c));
    const auto ds = from_columns({"a", "b", "c", "d", "t"}, cols);
    const auto m = fit_ridge(ds, "t", 1.0);
    const auto exact = linear_shapley(m, ds);
    const auto mc = mc_shapley_oracle(m, ds, 20000, 99);
    for (std::size_t k = 0; k < exact.values.size(); ++k) CHECK(std::abs(exact.values[k] - mc.phi.values[k]) < 0.01);
    CHECK(rank_features(exact, "t").ranks == rank_features(mc.phi, "t").ranks);
}

TEST_CASE("Monte Carlo oracle on a black-box predictor") {
    const std::vector<double> background{0.0, 0.0, 0.0};
    const std::vector<double> rows{1.0, 2.0, 3.0, -1.0, 0.5, 2.0};
    auto f = [](std::span<const double> x) { return x[0] * x[1] + x[0] * x[0]; };

    SUBCASE("efficiency and the dummy feature hold for every sample count") {
        for (std::size_t samples : {1, 7, 500}) {
            const auto est = mc_shapley_oracle(f, rows, background, samples, 5);
            for (std::size_t i = 0; i < 2; ++i) {
                const std::span<const double> row(rows.data() + i * 3, 3);
                const double sum = est.phi.at(i, 0) + est.phi.at(i, 1) + est.phi.at(i, 2);
                CHECK(sum == doctest::Approx(f(row) - f(background)).epsilon(1e-12));
                CHECK(est.phi.at(i, 2) == 0.0);
            }
        }
    }

    SUBCASE("estimates converge to the exact values") {
        // exact: phi_0 = x0 x1 / 2 + x0^2, phi_1 = x0 x1 / 2
        auto spread = [&](std::size_t samples) {
            double worst = 0;
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                const auto est = mc_shapley_oracle(f, rows, background, samples, seed);
                worst = std::max(worst, std::abs(est.phi.at(0, 1) - 1.0));
            }
            return worst;
        };
        const double coarse = spread(4), fine = spread(4000);
        CHECK(fine < coarse);
        CHECK(fine < 0.05);
    }

    SUBCASE("a single feature takes the whole difference") {
        const std::vector<double> one_bg{1.0}, one_rows{4.0};
        auto g = [](std::span<const double> x) { return x[0] * x[0]; };
        const auto est = mc_shapley_oracle(g, one_rows, one_bg, 3, 1);
        CHECK(est.phi.at(0, 0) == 15.0);
    }

    SUBCASE("same seed, same estimate") {
        const auto a = mc_shapley_oracle(f, rows, background, 50, 11);
        const auto b = mc_shapley_oracle(f, rows, background, 50, 11);
        CHECK(a.phi.values == b.phi.values);
    }

    CHECK_THROWS_AS(mc_shapley_oracle(f, rows, background, 0, 1), Error);
    CHECK_THROWS_AS(mc_shapley_oracle(f, std::vector<double>{1, 2}, background, 1, 1), Error);
}

TEST_CASE("competition ranking") {
    Attributions zero;
    zero.features = {"a", "b", "c"};
    zero.rows = 2;
    zero.values.assign(6, 0.0);
    CHECK(rank_features(zero, "t").ranks == std::vector<int>{1, 1, 1});

    Attributions phi;
    phi.features = {"a", "b", "c", "d"};
    phi.rows = 1;
    phi.values = {0.5, -0.9, -0.5, 0.1};
    const auto r = rank_features(phi, "t");
    CHECK(r.ranks == std::vector<int>{2, 1, 2, 4});
    CHECK(r.scores == std::vector<double>{0.5, 0.9, 0.5, 0.1});
}
