#include "cif/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <random>
#include <set>
#include <unordered_map>

#include "cif/error.hpp"

namespace cif {

namespace {

double sq_dist(const Point2& a, const Point2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Uniform double in [0, 1) from the top 53 bits; std::uniform_real_distribution
// is not specified bit-for-bit across standard libraries.
double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<Point2> kmeans_plus_plus(std::span<const Point2> points, int k, std::mt19937_64& rng) {
    const std::size_t n = points.size();
    std::vector<Point2> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    const auto first = std::min<std::size_t>(static_cast<std::size_t>(unit_draw(rng) * n), n - 1);
    centroids.push_back(points[first]);

    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = sq_dist(points[i], centroids.back());

    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (double d : nearest) total += d;
        const double target = unit_draw(rng) * total;
        std::size_t pick = n;
        double cumulative = 0.0;
        std::size_t last_positive = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (nearest[i] <= 0.0) continue;
            last_positive = i;
            cumulative += nearest[i];
            if (cumulative > target) {
                pick = i;
                break;
            }
        }
        if (pick == n) pick = last_positive;  // rounding at the top of the range
        centroids.push_back(points[pick]);
        for (std::size_t i = 0; i < n; ++i)
            nearest[i] = std::min(nearest[i], sq_dist(points[i], centroids.back()));
    }
    return centroids;
}

// Nearest-centroid assignment, ties to the lowest index. Returns inertia.
double assign(std::span<const Point2> points, const std::vector<Point2>& centroids,
              std::vector<int>& labels, std::vector<double>& distances) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        int best = 0;
        double best_d = sq_dist(points[i], centroids[0]);
        for (std::size_t c = 1; c < centroids.size(); ++c) {
            const double d = sq_dist(points[i], centroids[c]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        labels[i] = best;
        distances[i] = best_d;
        inertia += best_d;
    }
    return inertia;
}

}  // namespace

std::string to_string(Algorithm algorithm) {
    return algorithm == Algorithm::KMeans ? "kmeans" : "dbscan";
}

Algorithm parse_algorithm(const std::string& text) {
    std::string lower;
    for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "kmeans" || lower == "k-means") return Algorithm::KMeans;
    if (lower == "dbscan") return Algorithm::Dbscan;
    fail(ErrorKind::InvalidArgument, "unknown algorithm '" + text + "' (expected kmeans or dbscan)");
}

void ClusteringParams::validate() const {
    if (algorithm == Algorithm::KMeans) {
        if (k < 1) fail(ErrorKind::InvalidArgument, "k must be at least 1");
        if (max_iter < 1) fail(ErrorKind::InvalidArgument, "max_iter must be at least 1");
        if (!(tol >= 0.0)) fail(ErrorKind::InvalidArgument, "tol must be nonnegative");
    } else {
        if (!(eps > 0.0) || !std::isfinite(eps)) fail(ErrorKind::InvalidArgument, "eps must be positive");
        if (min_samples < 1) fail(ErrorKind::InvalidArgument, "min_samples must be at least 1");
    }
}

std::string ClusteringParams::canonical() const {
    char buf[160];
    if (algorithm == Algorithm::KMeans)
        std::snprintf(buf, sizeof buf, "kmeans;k=%d;max_iter=%d;tol=%.17g;seed=%llu", k, max_iter, tol,
                      static_cast<unsigned long long>(seed));
    else
        std::snprintf(buf, sizeof buf, "dbscan;eps=%.17g;min_samples=%d;seed=%llu", eps, min_samples,
                      static_cast<unsigned long long>(seed));
    return buf;
}

int canonicalize_labels(std::vector<int>& labels) {
    std::unordered_map<int, int> remap;
    for (int& l : labels) {
        if (l == kNoise) continue;
        auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
        l = it->second;
    }
    return static_cast<int>(remap.size());
}

std::size_t count_distinct(std::span<const Point2> points) {
    std::set<std::pair<double, double>> seen;
    for (const auto& p : points) seen.emplace(p.x, p.y);
    return seen.size();
}

KMeansRun kmeans_2d_traced(std::span<const Point2> points, const ClusteringParams& params) {
    ClusteringParams p = params;
    p.algorithm = Algorithm::KMeans;
    p.validate();
    if (points.empty()) fail(ErrorKind::InvalidArgument, "k-means on empty input");
    const std::size_t distinct = count_distinct(points);
    if (static_cast<std::size_t>(p.k) > distinct)
        fail(ErrorKind::InvalidArgument, "k=" + std::to_string(p.k) + " exceeds the " +
                                             std::to_string(distinct) + " distinct points");

    std::mt19937_64 rng(p.seed);
    std::vector<Point2> centroids = kmeans_plus_plus(points, p.k, rng);

    const std::size_t n = points.size();
    const auto k = static_cast<std::size_t>(p.k);
    std::vector<int> labels(n, 0);
    std::vector<double> distances(n, 0.0);
    KMeansRun run;

    for (int iter = 0; iter < p.max_iter; ++iter) {
        run.inertia_history.push_back(assign(points, centroids, labels, distances));

        std::vector<Point2> next(k);
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(labels[i]);
            next[c].x += points[i].x;
            next[c].y += points[i].y;
            ++sizes[c];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) continue;
            next[c].x /= static_cast<double>(sizes[c]);
            next[c].y /= static_cast<double>(sizes[c]);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) continue;
            // Reseed an emptied cluster at the point farthest from its centroid.
            const auto far = static_cast<std::size_t>(
                std::max_element(distances.begin(), distances.end()) - distances.begin());
            next[c] = points[far];
            distances[far] = 0.0;
        }

        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) shift = std::max(shift, std::sqrt(sq_dist(centroids[c], next[c])));
        centroids = std::move(next);
        if (shift <= p.tol) break;
    }
    run.inertia_history.push_back(assign(points, centroids, labels, distances));

    run.labeling.inertia = run.inertia_history.back();
    run.labeling.n_clusters = canonicalize_labels(labels);
    run.labeling.labels = std::move(labels);
    run.labeling.params = p;
    return run;
}

ClusterLabeling kmeans_2d(std::span<const Point2> points, const ClusteringParams& params) {
    return kmeans_2d_traced(points, params).labeling;
}

ClusterLabeling dbscan_2d(std::span<const Point2> points, const ClusteringParams& params) {
    ClusteringParams p = params;
    p.algorithm = Algorithm::Dbscan;
    p.validate();
    if (points.empty()) fail(ErrorKind::InvalidArgument, "DBSCAN on empty input");

    const std::size_t n = points.size();
    const double eps2 = p.eps * p.eps;
    std::vector<std::vector<std::size_t>> neighbors(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (sq_dist(points[i], points[j]) <= eps2) neighbors[i].push_back(j);

    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i)
        core[i] = neighbors[i].size() >= static_cast<std::size_t>(p.min_samples);

    std::vector<int> labels(n, kNoise);
    int next_label = 0;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (!core[seed] || labels[seed] != kNoise) continue;
        const int label = next_label++;
        labels[seed] = label;
        std::deque<std::size_t> frontier{seed};
        while (!frontier.empty()) {
            const std::size_t cur = frontier.front();
            frontier.pop_front();
            for (std::size_t nb : neighbors[cur]) {
                if (labels[nb] != kNoise) continue;
                labels[nb] = label;
                if (core[nb]) frontier.push_back(nb);
            }
        }
    }

    ClusterLabeling out;
    out.n_clusters = canonicalize_labels(labels);
    out.labels = std::move(labels);
    out.params = p;
    return out;
}

ClusterLabeling cluster_2d(std::span<const Point2> points, const ClusteringParams& params) {
    return params.algorithm == Algorithm::KMeans ? kmeans_2d(points, params) : dbscan_2d(points, params);
}

}  // namespace cif
