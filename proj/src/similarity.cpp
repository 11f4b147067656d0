#include "cif/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "cif/error.hpp"

namespace cif {

namespace {

const ClusterLabeling& labeling_for(const PairGrid& grid, const FeaturePairKey& pair) {
    const PairEntry* entry = grid.find(pair);
    if (entry == nullptr) fail(ErrorKind::NotFound, "no grid entry for the requested feature pair");
    if (!entry->ok()) fail(ErrorKind::Unprocessable, "the requested feature pair failed to cluster: " + entry->error);
    return *entry->labeling;
}

// Members of every cluster 0..n_clusters-1 in one pass.
std::vector<RowSet> all_members(const ClusterLabeling& labeling) {
    std::vector<RowSet> out(static_cast<std::size_t>(labeling.n_clusters));
    for (std::size_t r = 0; r < labeling.labels.size(); ++r)
        if (labeling.labels[r] != kNoise) out[static_cast<std::size_t>(labeling.labels[r])].push_back(r);
    return out;
}

}  // namespace

double jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    if (a.empty() && b.empty()) fail(ErrorKind::InvalidArgument, "Jaccard index is undefined for two empty sets");
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++common;
            ++ia;
            ++ib;
        }
    }
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

RowSet cluster_members(const ClusterLabeling& labeling, int cluster_id) {
    RowSet out;
    for (std::size_t r = 0; r < labeling.labels.size(); ++r)
        if (labeling.labels[r] == cluster_id) out.push_back(r);
    return out;
}

SourceSelection resolve_point(const PairGrid& grid, const FeaturePairKey& pair, std::size_t row_index) {
    const auto& labeling = labeling_for(grid, pair);
    if (row_index >= labeling.labels.size())
        fail(ErrorKind::InvalidArgument, "row index " + std::to_string(row_index) + " is out of range (" +
                                             std::to_string(labeling.labels.size()) + " rows)");
    const int label = labeling.labels[row_index];
    if (label == kNoise) fail(ErrorKind::Unprocessable, kNoiseSelectionMessage);
    return {pair, label, cluster_members(labeling, label)};
}

SourceSelection select_cluster(const PairGrid& grid, const FeaturePairKey& pair, int cluster_id) {
    const auto& labeling = labeling_for(grid, pair);
    if (cluster_id == kNoise) fail(ErrorKind::Unprocessable, kNoiseSelectionMessage);
    if (cluster_id < 0 || cluster_id >= labeling.n_clusters)
        fail(ErrorKind::InvalidArgument, "cluster " + std::to_string(cluster_id) + " does not exist (" +
                                             std::to_string(labeling.n_clusters) + " clusters)");
    return {pair, cluster_id, cluster_members(labeling, cluster_id)};
}

std::vector<SimilarityRecord> rank_clusters(const SourceSelection& source, const PairGrid& grid) {
    if (grid.entries.empty()) fail(ErrorKind::InvalidArgument, "empty pair grid");
    std::vector<SimilarityRecord> records;
    for (const auto& [key, entry] : grid.entries) {
        if (key == source.pair || !entry.ok()) continue;
        const auto members = all_members(*entry.labeling);
        for (std::size_t c = 0; c < members.size(); ++c)
            records.push_back({key, static_cast<int>(c), jaccard(source.members, members[c]), members[c].size()});
    }
    std::sort(records.begin(), records.end(), [](const SimilarityRecord& a, const SimilarityRecord& b) {
        if (a.jaccard != b.jaccard) return a.jaccard > b.jaccard;
        if (a.pair != b.pair) return a.pair < b.pair;
        return a.cluster_id < b.cluster_id;
    });
    return records;
}

std::string to_string(Aggregation aggregation) {
    return aggregation == Aggregation::Max ? "max" : "mean";
}

Aggregation parse_aggregation(const std::string& text) {
    std::string lower;
    for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "max" || lower == "maximum") return Aggregation::Max;
    if (lower == "mean" || lower == "average") return Aggregation::Mean;
    fail(ErrorKind::InvalidArgument, "unknown aggregation '" + text + "' (expected max or mean)");
}

double aggregate(std::span<const double> scores, Aggregation method) {
    if (scores.empty()) fail(ErrorKind::InvalidArgument, "cannot aggregate an empty score list");
    if (method == Aggregation::Max) return *std::max_element(scores.begin(), scores.end());
    return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

SimilarityMatrix build_matrix(const SourceSelection& source, const PairGrid& grid, Aggregation method) {
    if (grid.entries.empty()) fail(ErrorKind::InvalidArgument, "empty pair grid");
    SimilarityMatrix m;
    m.features = grid.features;
    m.aggregation = method;
    const std::size_t d = m.features.size();
    m.cells.assign(d * d, std::nullopt);
    m.ordering.resize(d);
    std::iota(m.ordering.begin(), m.ordering.end(), std::size_t{0});

    std::vector<double> scores;
    for (const auto& [key, entry] : grid.entries) {
        if (!entry.ok()) continue;
        scores.clear();
        for (const auto& members : all_members(*entry.labeling)) scores.push_back(jaccard(source.members, members));
        if (scores.empty()) continue;  // all noise
        const double value = aggregate(scores, method);
        m.at(key.i, key.j) = value;
        m.at(key.j, key.i) = value;
    }
    return m;
}

}  // namespace cif
