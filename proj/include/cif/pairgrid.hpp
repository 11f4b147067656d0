#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cif/clustering.hpp"
#include "cif/dataset.hpp"

namespace cif {

// Indices into the pairable feature list (numeric, not excluded), i < j.
struct FeaturePairKey {
    std::size_t i = 0;
    std::size_t j = 0;

    auto operator<=>(const FeaturePairKey&) const = default;
};

// Numeric features in file order minus `excluded`. Throws NotFound for an
// excluded name that is not a numeric feature.
std::vector<std::string> pairable_features(const Dataset& dataset,
                                           const std::vector<std::string>& excluded = {});

// Lexicographic (i, then j). Throws InvalidArgument when fewer than two features.
std::vector<FeaturePairKey> enumerate_pairs(std::size_t feature_count);
std::vector<FeaturePairKey> enumerate_pairs(const Dataset& dataset,
                                            const std::vector<std::string>& excluded = {});

// Result for one pair: either a labeling or the error that prevented it.
struct PairEntry {
    std::optional<ClusterLabeling> labeling;
    std::string error;

    bool ok() const { return labeling.has_value(); }
};

struct PairGrid {
    std::string dataset_id;
    ClusteringParams params;
    std::vector<std::string> features;
    std::map<FeaturePairKey, PairEntry> entries;
    bool complete = false;

    std::size_t failures() const;
    const PairEntry* find(const FeaturePairKey& key) const;
    // Key for two feature names, in either order. Throws NotFound.
    FeaturePairKey key_for(const std::string& a, const std::string& b) const;
};

// Z-scores both features and runs the configured kernel.
ClusterLabeling cluster_pair(const Dataset& dataset, const std::string& feature_x,
                             const std::string& feature_y, const ClusteringParams& params);

// Memoizes labelings per (dataset id, feature names, canonical params) and
// complete grids per (dataset id, canonical params, pairable features).
// Concurrent requests for the same key are coalesced. With a cache
// directory, grids are written through to
// <dir>/<dataset-id>/<params-hash>/grid.json and reloaded on a miss.
class GridCache {
public:
    explicit GridCache(std::optional<std::filesystem::path> directory = std::nullopt);

    ClusterLabeling compute_pair(const Dataset& dataset, const std::string& feature_x,
                                 const std::string& feature_y, const ClusteringParams& params);

    // Per-pair failures are recorded in the entry; throws only when every pair fails.
    std::shared_ptr<const PairGrid> compute_grid(const Dataset& dataset, const ClusteringParams& params,
                                                 std::size_t parallelism,
                                                 const std::vector<std::string>& excluded = {});

    struct Stats {
        std::size_t pair_hits = 0;
        std::size_t pair_misses = 0;
        std::size_t grid_hits = 0;
        std::size_t grid_misses = 0;
        std::size_t disk_loads = 0;
    };
    Stats stats() const;

    static std::string params_hash(const ClusteringParams& params, const std::vector<std::string>& features);

private:
    using PairFuture = std::shared_future<ClusterLabeling>;
    using GridFuture = std::shared_future<std::shared_ptr<const PairGrid>>;

    std::shared_ptr<const PairGrid> build_grid(const Dataset& dataset, const ClusteringParams& params,
                                               std::size_t parallelism, std::vector<std::string> features);
    std::filesystem::path grid_path(const std::string& dataset_id, const std::string& hash) const;

    std::optional<std::filesystem::path> directory_;
    mutable std::mutex mutex_;
    std::map<std::string, PairFuture> pairs_;
    std::map<std::string, GridFuture> grids_;
    Stats stats_;
};

// Versioned JSON form of a grid; used for the on-disk cache.
std::string serialize_grid(const PairGrid& grid);
PairGrid deserialize_grid(const std::string& text);

inline constexpr int kGridFormatVersion = 1;

}  // namespace cif
