#include "cif/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "cif/error.hpp"

namespace cif {

std::vector<double> RidgeModel::raw_coefficients() const {
    std::vector<double> out(coefficients.size(), 0.0);
    for (std::size_t j = 0; j < out.size(); ++j)
        if (stds[j] > 0.0) out[j] = coefficients[j] / stds[j];
    return out;
}

double RidgeModel::predict(std::span<const double> raw_row) const {
    if (raw_row.size() != predictors.size()) fail(ErrorKind::InvalidArgument, "row width does not match the model");
    double y = intercept;
    for (std::size_t j = 0; j < raw_row.size(); ++j)
        if (stds[j] > 0.0) y += coefficients[j] * (raw_row[j] - means[j]) / stds[j];
    return y;
}

RidgeModel fit_ridge(const Dataset& dataset, const std::string& target, double lambda,
                     std::vector<std::string> predictors) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorKind::InvalidArgument, "lambda must be nonnegative");
    const auto& y_col = dataset.numeric_column(target);
    if (predictors.empty())
        for (auto& name : dataset.numeric_features())
            if (name != target) predictors.push_back(std::move(name));
    if (std::find(predictors.begin(), predictors.end(), target) != predictors.end())
        fail(ErrorKind::InvalidArgument, "the target cannot also be a predictor");
    if (predictors.size() < 2) fail(ErrorKind::InvalidArgument, "importance needs at least two predictor features");

    const auto n = static_cast<Eigen::Index>(dataset.n_rows());
    const auto p = static_cast<Eigen::Index>(predictors.size());
    RidgeModel model;
    model.target = target;
    model.lambda = lambda;
    Eigen::MatrixXd z(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto& col = dataset.numeric_column(predictors[static_cast<std::size_t>(j)]);
        model.means.push_back(col.stats->mean);
        model.stds.push_back(col.stats->std);
        const auto zs = zscore(col.numeric);
        for (Eigen::Index i = 0; i < n; ++i) z(i, j) = zs[static_cast<std::size_t>(i)];
    }
    model.predictors = std::move(predictors);

    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = y_col.numeric[static_cast<std::size_t>(i)];
    model.intercept = y.mean();
    const Eigen::VectorXd centered = y.array() - model.intercept;

    Eigen::MatrixXd gram = z.transpose() * z;
    gram.diagonal().array() += lambda;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible())
        fail(ErrorKind::InvalidArgument,
             "ridge system is singular (collinear or constant predictors); use lambda > 0");
    const Eigen::VectorXd beta = lu.solve(z.transpose() * centered);
    model.coefficients.assign(beta.data(), beta.data() + beta.size());
    return model;
}

Attributions linear_shapley(const RidgeModel& model, const Dataset& dataset) {
    if (model.coefficients.size() != model.predictors.size())
        fail(ErrorKind::InvalidArgument, "model coefficients do not match its predictors");
    Attributions phi;
    phi.features = model.predictors;
    phi.rows = dataset.n_rows();
    phi.values.assign(phi.rows * phi.features.size(), 0.0);
    for (std::size_t j = 0; j < phi.features.size(); ++j) {
        const auto z = zscore(dataset.numeric_column(phi.features[j]).numeric);
        const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
        for (std::size_t i = 0; i < phi.rows; ++i) phi.at(i, j) = model.coefficients[j] * (z[i] - mean);
    }
    return phi;
}

ShapleyEstimate mc_shapley_oracle(const PredictFn& predict, std::span<const double> rows,
                                  std::span<const double> background, std::size_t samples, std::uint64_t seed) {
    const std::size_t p = background.size();
    if (p == 0 || rows.size() % p != 0) fail(ErrorKind::InvalidArgument, "row matrix does not match the background width");
    if (samples == 0) fail(ErrorKind::InvalidArgument, "at least one sample is required");
    const std::size_t n = rows.size() / p;

    ShapleyEstimate est;
    est.phi.rows = n;
    est.phi.features.resize(p);
    est.phi.values.assign(n * p, 0.0);
    est.mean_abs.assign(p, 0.0);

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(p);
    std::vector<double> x(p);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = rows.subspan(i * p, p);
        for (std::size_t s = 0; s < samples; ++s) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            for (std::size_t a = p; a > 1; --a) {
                const auto b = static_cast<std::size_t>((rng() >> 11) * 0x1.0p-53 * static_cast<double>(a));
                std::swap(order[a - 1], order[std::min(b, a - 1)]);
            }
            std::copy(background.begin(), background.end(), x.begin());
            double prev = predict(x);
            for (std::size_t j : order) {
                x[j] = row[j];
                const double cur = predict(x);
                est.phi.at(i, j) += cur - prev;
                prev = cur;
            }
        }
        for (std::size_t j = 0; j < p; ++j) {
            est.phi.at(i, j) /= static_cast<double>(samples);
            est.mean_abs[j] += std::abs(est.phi.at(i, j));
        }
    }
    for (double& v : est.mean_abs) v /= static_cast<double>(n);
    return est;
}

ShapleyEstimate mc_shapley_oracle(const RidgeModel& model, const Dataset& dataset, std::size_t samples,
                                  std::uint64_t seed) {
    const std::size_t p = model.predictors.size();
    std::vector<double> rows(dataset.n_rows() * p);
    std::vector<double> background(p);
    for (std::size_t j = 0; j < p; ++j) {
        const auto& col = dataset.numeric_column(model.predictors[j]);
        background[j] = std::accumulate(col.numeric.begin(), col.numeric.end(), 0.0) /
                        static_cast<double>(col.numeric.size());
        for (std::size_t i = 0; i < dataset.n_rows(); ++i) rows[i * p + j] = col.numeric[i];
    }
    auto est = mc_shapley_oracle([&](std::span<const double> x) { return model.predict(x); }, rows, background,
                                 samples, seed);
    est.phi.features = model.predictors;
    return est;
}

ImportanceRanking rank_features(const Attributions& phi, const std::string& target) {
    ImportanceRanking out;
    out.target = target;
    out.features = phi.features;
    const std::size_t p = phi.features.size();
    out.scores.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < phi.rows; ++i) out.scores[j] += std::abs(phi.at(i, j));
        if (phi.rows > 0) out.scores[j] /= static_cast<double>(phi.rows);
    }
    auto tied = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(a, b)); };
    out.ranks.assign(p, 1);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t o = 0; o < p; ++o)
            if (o != j && out.scores[o] > out.scores[j] && !tied(out.scores[o], out.scores[j])) ++out.ranks[j];
    return out;
}

}  // namespace cif
