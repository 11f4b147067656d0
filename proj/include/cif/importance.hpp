#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cif/dataset.hpp"

namespace cif {

// Ridge regression on z-scored predictors. `coefficients` are on the
// standardized scale; raw_coefficients() converts them to original units.
struct RidgeModel {
    std::string target;
    std::vector<std::string> predictors;
    std::vector<double> means;
    std::vector<double> stds;
    std::vector<double> coefficients;
    double intercept = 0.0;
    double lambda = 1.0;

    std::vector<double> raw_coefficients() const;
    // Prediction for one row given in original units, predictor order.
    double predict(std::span<const double> raw_row) const;
};

// Predictors default to every numeric column except the target. A binary
// target is regressed on its 0/1 values.
RidgeModel fit_ridge(const Dataset& dataset, const std::string& target, double lambda = 1.0,
                     std::vector<std::string> predictors = {});

// Row-major n×p attribution matrix.
struct Attributions {
    std::vector<std::string> features;
    std::size_t rows = 0;
    std::vector<double> values;

    double at(std::size_t row, std::size_t feature) const { return values[row * features.size() + feature]; }
    double& at(std::size_t row, std::size_t feature) { return values[row * features.size() + feature]; }
};

// Exact Shapley values of a linear model with independent features:
// phi_ij = beta_j * (z_ij - mean_j).
Attributions linear_shapley(const RidgeModel& model, const Dataset& dataset);

struct ShapleyEstimate {
    Attributions phi;
    std::vector<double> mean_abs;  // per feature
};

using PredictFn = std::function<double(std::span<const double>)>;

// Permutation-sampling Shapley estimate against a black-box predictor.
// Features outside the coalition take their background value. `rows` is
// row-major n×p in original units. Deterministic for a given seed.
ShapleyEstimate mc_shapley_oracle(const PredictFn& predict, std::span<const double> rows,
                                  std::span<const double> background, std::size_t samples, std::uint64_t seed);
ShapleyEstimate mc_shapley_oracle(const RidgeModel& model, const Dataset& dataset, std::size_t samples,
                                  std::uint64_t seed);

struct ImportanceRanking {
    std::string target;
    std::vector<std::string> features;
    std::vector<double> scores;  // mean |phi|
    std::vector<int> ranks;      // competition ranking, 1 = most important
};

ImportanceRanking rank_features(const Attributions& phi, const std::string& target);

}  // namespace cif
