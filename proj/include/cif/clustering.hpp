#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cif {

enum class Algorithm { KMeans, Dbscan };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);

struct ClusteringParams {
    Algorithm algorithm = Algorithm::KMeans;
    int k = 5;
    double eps = 0.5;  // z-score units
    int min_samples = 5;
    std::uint64_t seed = 42;
    int max_iter = 300;
    double tol = 1e-4;  // max centroid shift

    // Throws InvalidArgument when the fields relevant to `algorithm` are out of range.
    void validate() const;

    // Stable textual form used in cache keys.
    std::string canonical() const;

    bool operator==(const ClusteringParams&) const = default;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline constexpr int kNoise = -1;

struct ClusterLabeling {
    std::vector<int> labels;  // >= 0, or kNoise (DBSCAN only)
    int n_clusters = 0;
    double inertia = 0.0;     // K-Means only
    ClusteringParams params;

    bool operator==(const ClusterLabeling&) const = default;
};

// Renumbers non-noise labels in order of first appearance by row: the cluster
// of the lowest-index non-noise row becomes 0, the next new one 1, and so on.
// Returns the number of distinct non-noise labels.
int canonicalize_labels(std::vector<int>& labels);

struct KMeansRun {
    ClusterLabeling labeling;
    // Inertia after each assignment step, in order; the last entry is the
    // final inertia.
    std::vector<double> inertia_history;
};

std::size_t count_distinct(std::span<const Point2> points);

// Lloyd's algorithm with k-means++ seeding driven by a mt19937_64 seeded with
// params.seed.
ClusterLabeling kmeans_2d(std::span<const Point2> points, const ClusteringParams& params);
KMeansRun kmeans_2d_traced(std::span<const Point2> points, const ClusteringParams& params);

// Density clustering with closed eps-balls that include the point itself.
ClusterLabeling dbscan_2d(std::span<const Point2> points, const ClusteringParams& params);

// Dispatches on params.algorithm.
ClusterLabeling cluster_2d(std::span<const Point2> points, const ClusteringParams& params);

}  // namespace cif
