#pragma once

// Brute-force reference implementations used only by the tests. None of
// them share code paths with the library routines they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cif/clustering.hpp"
#include "cif/seriation.hpp"

namespace oracle {

inline double naive_jaccard(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    const std::set<std::size_t> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::set<std::size_t> inter, uni;
    for (auto x : sa) {
        uni.insert(x);
        if (sb.count(x)) inter.insert(x);
    }
    for (auto x : sb) uni.insert(x);
    return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

// Partition as a set of row sets; noise rows are omitted.
inline std::set<std::set<std::size_t>> partition(const std::vector<int>& labels) {
    std::map<int, std::set<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0) groups[labels[i]].insert(i);
    std::set<std::set<std::size_t>> out;
    for (auto& [_, g] : groups) out.insert(g);
    return out;
}

inline std::set<std::size_t> noise_rows(const std::vector<int>& labels) {
    std::set<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] < 0) out.insert(i);
    return out;
}

// Minimum k-means inertia over every assignment of points to k labels.
inline std::pair<double, std::vector<int>> best_partition_inertia(const std::vector<cif::Point2>& pts, int k) {
    const std::size_t n = pts.size();
    std::vector<int> assign(n, 0), best_assign;
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        std::vector<double> sx(k, 0), sy(k, 0), cnt(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sx[assign[i]] += pts[i].x;
            sy[assign[i]] += pts[i].y;
            cnt[assign[i]] += 1;
        }
        bool all_used = std::all_of(cnt.begin(), cnt.end(), [](double c) { return c > 0; });
        if (all_used) {
            double in = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double cx = sx[assign[i]] / cnt[assign[i]], cy = sy[assign[i]] / cnt[assign[i]];
                in += (pts[i].x - cx) * (pts[i].x - cx) + (pts[i].y - cy) * (pts[i].y - cy);
            }
            if (in < best) {
                best = in;
                best_assign = assign;
            }
        }
        std::size_t pos = 0;
        while (pos < n && ++assign[pos] == k) assign[pos++] = 0;
        if (pos == n) break;
    }
    return {best, best_assign};
}

// DBSCAN by definition: core points, connected components of the core graph
// via union-find, then each border point joins the component whose smallest
// core index is lowest among components with a core point in reach.
inline std::vector<int> dbscan(const std::vector<cif::Point2>& pts, double eps, int min_samples) {
    const std::size_t n = pts.size();
    auto close = [&](std::size_t a, std::size_t b) {
        const double dx = pts[a].x - pts[b].x, dy = pts[a].y - pts[b].y;
        return dx * dx + dy * dy <= eps * eps;
    };
    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) {
        int c = 0;
        for (std::size_t j = 0; j < n; ++j) c += close(i, j);
        core[i] = c >= min_samples;
    }
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (core[i] && core[j] && close(i, j)) parent[find(i)] = find(j);
    // Smallest core index of each component.
    std::map<std::size_t, std::size_t> min_core;
    for (std::size_t i = 0; i < n; ++i)
        if (core[i]) {
            auto r = find(i);
            if (!min_core.count(r)) min_core[r] = i;
        }
    std::vector<int> labels(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) {
            labels[i] = static_cast<int>(min_core[find(i)]);
            continue;
        }
        std::optional<std::size_t> best;
        for (std::size_t j = 0; j < n; ++j)
            if (core[j] && close(i, j)) {
                const std::size_t m = min_core[find(j)];
                if (!best || m < *best) best = m;
            }
        if (best) labels[i] = static_cast<int>(*best);
    }
    return labels;
}

// Every leaf order reachable by flipping subtrees: 2^(n-1) combinations.
inline double brute_force_olo_cost(const cif::LinkageTree& tree, const cif::DistanceMatrix& d) {
    const std::size_t internal = tree.merges.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << internal); ++mask) {
        std::vector<std::size_t> order;
        std::vector<std::size_t> stack{tree.root()};
        while (!stack.empty()) {
            const std::size_t node = stack.back();
            stack.pop_back();
            if (node < tree.n_leaves) {
                order.push_back(node);
                continue;
            }
            const std::size_t t = node - tree.n_leaves;
            const auto& m = tree.merges[t];
            const bool flip = (mask >> t) & 1u;
            stack.push_back(flip ? m.a : m.b);
            stack.push_back(flip ? m.b : m.a);
        }
        double cost = 0;
        for (std::size_t p = 1; p < order.size(); ++p) cost += d(order[p - 1], order[p]);
        best = std::min(best, cost);
    }
    return best;
}

inline double log_choose(double n, double k) {
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

// E[J] when a set of size `s` is drawn uniformly from `universe` rows and
// compared with a fixed set of size `m`: sum over the hypergeometric
// distribution of the overlap x of x / (s + m - x).
inline double expected_random_jaccard(std::size_t universe, std::size_t m, std::size_t s) {
    const double N = static_cast<double>(universe);
    double expectation = 0.0;
    const std::size_t lo = (s + m > universe) ? s + m - universe : 0;
    for (std::size_t x = lo; x <= std::min(s, m); ++x) {
        const double logp = log_choose(static_cast<double>(m), static_cast<double>(x)) +
                            log_choose(N - static_cast<double>(m), static_cast<double>(s - x)) -
                            log_choose(N, static_cast<double>(s));
        const double denom = static_cast<double>(s + m - x);
        if (denom > 0) expectation += std::exp(logp) * static_cast<double>(x) / denom;
    }
    return expectation;
}

inline std::vector<std::size_t> random_subset(std::mt19937_64& rng, std::size_t universe, double p) {
    std::bernoulli_distribution keep(p);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < universe; ++i)
        if (keep(rng)) out.push_back(i);
    return out;
}

inline cif::DistanceMatrix random_euclidean_distances(std::mt19937_64& rng, std::size_t d, std::size_t dims = 3) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::vector<double>> pts(d, std::vector<double>(dims));
    for (auto& p : pts)
        for (auto& v : p) v = g(rng);
    cif::DistanceMatrix out(d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a + 1; b < d; ++b) {
            double s = 0;
            for (std::size_t k = 0; k < dims; ++k) s += (pts[a][k] - pts[b][k]) * (pts[a][k] - pts[b][k]);
            out(a, b) = out(b, a) = std::sqrt(s);
        }
    return out;
}

}  // namespace oracle
