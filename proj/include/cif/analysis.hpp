#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cif/clustering.hpp"
#include "cif/dataset.hpp"
#include "cif/importance.hpp"
#include "cif/pairgrid.hpp"
#include "cif/seriation.hpp"
#include "cif/similarity.hpp"

namespace cif {

// One pass of the interactive loop: grid, source cluster, ranked list,
// aggregated matrix and its ordering. Shared by the CLI and the service so
// both emit the same payload.
struct AnalysisRequest {
    ClusteringParams params;
    std::string feature_x;
    std::string feature_y;
    std::optional<std::size_t> source_row;
    std::optional<int> source_cluster;
    Aggregation aggregation = Aggregation::Max;
    OrderingMethod ordering = OrderingMethod::Olo;
    std::vector<std::string> excluded;
};

struct AnalysisTimings {
    double grid_ms = 0.0;
    double similarity_ms = 0.0;
    double seriation_ms = 0.0;
};

struct AnalysisResult {
    std::shared_ptr<const PairGrid> grid;
    SourceSelection source;
    std::optional<std::size_t> source_row;
    std::vector<SimilarityRecord> list;
    SimilarityMatrix matrix;   // original feature order
    SimilarityMatrix ordered;  // after applying `ordering`
    std::optional<LinkageTree> linkage;
    Ordering ordering;
    AnalysisTimings timings;
};

AnalysisResult run_analysis(const Dataset& dataset, GridCache& cache, const AnalysisRequest& request,
                            std::size_t threads);

// JSON views. All of them are meant to go through canonical_dump().
nlohmann::json report_json(const AnalysisResult& result);
nlohmann::json timings_json(const AnalysisTimings& timings);
nlohmann::json dataset_json(const Dataset& dataset);
nlohmann::json histogram_json(const Histogram& histogram);
nlohmann::json labeling_json(const ClusterLabeling& labeling);
nlohmann::json params_json(const ClusteringParams& params);
nlohmann::json importance_json(const ImportanceRanking& ranking, double lambda);

// Reads {"algorithm": ..., "params": {...}} from a request body; absent
// fields keep their defaults. Throws InvalidArgument on malformed input.
ClusteringParams params_from_json(const nlohmann::json& body);

}  // namespace cif
