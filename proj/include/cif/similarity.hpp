#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cif/pairgrid.hpp"

namespace cif {

// Sorted, duplicate-free row indices.
using RowSet = std::vector<std::size_t>;

// |A ∩ B| / |A ∪ B| over sorted row sets. Throws InvalidArgument when both are empty.
double jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b);

struct SourceSelection {
    FeaturePairKey pair;
    int cluster_id = 0;
    RowSet members;
};

// Rows carrying `cluster_id`, ascending.
RowSet cluster_members(const ClusterLabeling& labeling, int cluster_id);

// The cluster containing `row_index` in the grid entry for `pair`. Noise rows
// raise Unprocessable with kNoiseSelectionMessage.
SourceSelection resolve_point(const PairGrid& grid, const FeaturePairKey& pair, std::size_t row_index);
SourceSelection select_cluster(const PairGrid& grid, const FeaturePairKey& pair, int cluster_id);

struct SimilarityRecord {
    FeaturePairKey pair;
    int cluster_id = 0;
    double jaccard = 0.0;
    std::size_t cluster_size = 0;
};

// Every non-noise cluster of every successfully clustered pair other than the
// source pair, by Jaccard descending, then pair key, then cluster id.
std::vector<SimilarityRecord> rank_clusters(const SourceSelection& source, const PairGrid& grid);

enum class Aggregation { Max, Mean };

std::string to_string(Aggregation aggregation);
Aggregation parse_aggregation(const std::string& text);

double aggregate(std::span<const double> scores, Aggregation method);

struct SimilarityMatrix {
    std::vector<std::string> features;
    // d×d, row-major; nullopt on the diagonal and for pairs that failed to
    // cluster or produced no non-noise cluster.
    std::vector<std::optional<double>> cells;
    Aggregation aggregation = Aggregation::Max;
    std::vector<std::size_t> ordering;

    std::size_t size() const { return features.size(); }
    const std::optional<double>& at(std::size_t row, std::size_t col) const { return cells[row * size() + col]; }
    std::optional<double>& at(std::size_t row, std::size_t col) { return cells[row * size() + col]; }
};

// Cell (x, y) aggregates the Jaccard scores of every non-noise cluster of
// pair (min(x, y), max(x, y)) against the source members. The source pair's
// own cell is included. The initial ordering is the identity.
SimilarityMatrix build_matrix(const SourceSelection& source, const PairGrid& grid, Aggregation method);

}  // namespace cif
