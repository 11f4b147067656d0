#include "cif/seriation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "cif/error.hpp"

namespace cif {

DistanceMatrix feature_distances(const SimilarityMatrix& matrix) {
    const std::size_t d = matrix.size();
    if (d < 2) fail(ErrorKind::InvalidArgument, "seriation needs at least two features");
    auto profile = [&](std::size_t row, std::size_t col) {
        if (row == col) return 1.0;
        return matrix.at(row, col).value_or(0.0);
    };
    DistanceMatrix out(d);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
            double ss = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = profile(a, c) - profile(b, c);
                ss += diff * diff;
            }
            out(a, b) = out(b, a) = std::sqrt(ss);
        }
    }
    return out;
}

std::vector<std::size_t> LinkageTree::leaf_order() const {
    std::vector<std::size_t> order;
    if (n_leaves == 0) return order;
    std::vector<std::size_t> stack{root()};
    while (!stack.empty()) {
        const std::size_t node = stack.back();
        stack.pop_back();
        if (node < n_leaves) {
            order.push_back(node);
        } else {
            const Merge& m = merges[node - n_leaves];
            stack.push_back(m.b);
            stack.push_back(m.a);
        }
    }
    return order;
}

LinkageTree hierarchical_cluster(const DistanceMatrix& distances) {
    const std::size_t n = distances.size();
    if (n < 2) fail(ErrorKind::InvalidArgument, "hierarchical clustering needs at least two items");
    for (std::size_t a = 0; a < n; ++a) {
        if (distances(a, a) != 0.0) fail(ErrorKind::InvalidArgument, "distance matrix diagonal must be zero");
        for (std::size_t b = a + 1; b < n; ++b) {
            const double x = distances(a, b);
            const double y = distances(b, a);
            if (!std::isfinite(x) || x < 0.0) fail(ErrorKind::InvalidArgument, "distances must be finite and nonnegative");
            if (std::abs(x - y) > 1e-12 * std::max(1.0, std::abs(x)))
                fail(ErrorKind::InvalidArgument, "distance matrix must be symmetric");
        }
    }

    const std::size_t total = 2 * n - 1;
    DistanceMatrix dist(total);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) dist(a, b) = distances(a, b);
    std::vector<std::size_t> size(total, 1);
    std::vector<std::size_t> active(n);
    std::iota(active.begin(), active.end(), std::size_t{0});

    LinkageTree tree;
    tree.n_leaves = n;
    for (std::size_t step = 0; step + 1 < n; ++step) {
        // `active` stays sorted, so the scan visits (a, b) lexicographically.
        std::size_t best_a = 0, best_b = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < active.size(); ++x)
            for (std::size_t y = x + 1; y < active.size(); ++y)
                if (dist(active[x], active[y]) < best) {
                    best = dist(active[x], active[y]);
                    best_a = active[x];
                    best_b = active[y];
                }

        const std::size_t node = n + step;
        size[node] = size[best_a] + size[best_b];
        const auto wa = static_cast<double>(size[best_a]);
        const auto wb = static_cast<double>(size[best_b]);
        for (std::size_t other : active) {
            if (other == best_a || other == best_b) continue;
            const double d = (wa * dist(best_a, other) + wb * dist(best_b, other)) / (wa + wb);
            dist(node, other) = dist(other, node) = d;
        }
        tree.merges.push_back({best_a, best_b, best});
        std::erase(active, best_a);
        std::erase(active, best_b);
        active.push_back(node);
    }
    return tree;
}

std::string to_string(OrderingMethod method) {
    return method == OrderingMethod::Original ? "original" : "olo";
}

OrderingMethod parse_ordering(const std::string& text) {
    std::string lower;
    for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "original") return OrderingMethod::Original;
    if (lower == "olo" || lower == "optimal_leaf_ordering") return OrderingMethod::Olo;
    fail(ErrorKind::InvalidArgument, "unknown ordering '" + text + "' (expected original or olo)");
}

double ordering_cost(const std::vector<std::size_t>& permutation, const DistanceMatrix& distances) {
    double cost = 0.0;
    for (std::size_t p = 1; p < permutation.size(); ++p) cost += distances(permutation[p - 1], permutation[p]);
    return cost;
}

namespace {

// Dynamic program over the tree. best(l, r) is the minimum cost of ordering
// the subtree rooted at lca(l, r) so that it starts with leaf l and ends with
// leaf r; l and r always lie in different children of that subtree's root.
class LeafOrderSolver {
public:
    LeafOrderSolver(const LinkageTree& tree, const DistanceMatrix& dist)
        : tree_(tree), dist_(dist), n_(tree.n_leaves), best_(n_), lca_(n_ * n_, 0) {
        const std::size_t total = n_ + tree.merges.size();
        leaves_.resize(total);
        contains_.assign(total, std::vector<bool>(n_, false));
        for (std::size_t leaf = 0; leaf < n_; ++leaf) {
            leaves_[leaf] = {leaf};
            contains_[leaf][leaf] = true;
            lca_[leaf * n_ + leaf] = leaf;
        }
        for (std::size_t t = 0; t < tree.merges.size(); ++t) {
            const std::size_t v = n_ + t;
            const auto& m = tree.merges[t];
            leaves_[v] = leaves_[m.a];
            leaves_[v].insert(leaves_[v].end(), leaves_[m.b].begin(), leaves_[m.b].end());
            for (std::size_t leaf : leaves_[v]) contains_[v][leaf] = true;
            solve_node(v, m.a, m.b);
        }
    }

    std::vector<std::size_t> best_order() {
        const std::size_t root = tree_.root();
        if (root < n_) return {root};
        double target = std::numeric_limits<double>::infinity();
        for (std::size_t l : leaves_[root])
            for (std::size_t r : opposite(root, l)) target = std::min(target, best_(l, r));

        // Every order starts with its left endpoint, so the smallest feasible
        // start wins outright; later positions decide among its candidates.
        std::size_t start = n_;
        for (std::size_t l : leaves_[root])
            for (std::size_t r : opposite(root, l))
                if (near(best_(l, r), target)) start = std::min(start, l);
        const std::vector<std::size_t>* chosen = nullptr;
        for (std::size_t r : opposite(root, start)) {
            if (!near(best_(start, r), target)) continue;
            const auto& candidate = sequence(start, r);
            if (chosen == nullptr || candidate < *chosen) chosen = &candidate;
        }
        return *chosen;
    }

private:
    static bool near(double value, double target) {
        return std::abs(value - target) <= 1e-12 * (1.0 + std::abs(target));
    }

    std::size_t child_containing(std::size_t node, std::size_t leaf) const {
        const auto& m = tree_.merges[node - n_];
        return contains_[m.a][leaf] ? m.a : m.b;
    }

    // Leaves that can end an ordering of `node` that starts with `leaf`.
    const std::vector<std::size_t>& opposite(std::size_t node, std::size_t leaf) const {
        if (node < n_) return leaves_[node];
        const auto& m = tree_.merges[node - n_];
        return contains_[m.a][leaf] ? leaves_[m.b] : leaves_[m.a];
    }

    double split_cost(std::size_t l, std::size_t m, std::size_t k, std::size_t r) const {
        return (best_(l, m) + dist_(m, k)) + best_(k, r);
    }

    void solve_node(std::size_t v, std::size_t a, std::size_t b) {
        std::vector<double> through(n_);
        for (std::size_t l : leaves_[a]) {
            const auto& ends_a = opposite(a, l);
            for (std::size_t k : leaves_[b]) {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t m : ends_a) best = std::min(best, best_(l, m) + dist_(m, k));
                through[k] = best;
            }
            for (std::size_t r : leaves_[b]) {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t k : opposite(b, r)) best = std::min(best, through[k] + best_(k, r));
                best_(l, r) = best_(r, l) = best;
                lca_[l * n_ + r] = lca_[r * n_ + l] = v;
            }
        }
    }

    // Lexicographically smallest optimal order of lca(l, r) from l to r.
    const std::vector<std::size_t>& sequence(std::size_t l, std::size_t r) {
        const std::size_t key = l * n_ + r;
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        if (l == r) return memo_.emplace(key, std::vector<std::size_t>{l}).first->second;

        const std::size_t v = lca_[key];
        const std::size_t first = child_containing(v, l);
        const std::size_t second = child_containing(v, r);
        const double target = best_(l, r);

        const std::vector<std::size_t>* prefix = nullptr;
        std::size_t prefix_end = 0;
        for (std::size_t m : opposite(first, l)) {
            bool feasible = false;
            for (std::size_t k : opposite(second, r)) feasible = feasible || near(split_cost(l, m, k, r), target);
            if (!feasible) continue;
            const auto& candidate = sequence(l, m);
            if (prefix == nullptr || candidate < *prefix) {
                prefix = &candidate;
                prefix_end = m;
            }
        }
        const std::vector<std::size_t>* suffix = nullptr;
        for (std::size_t k : opposite(second, r)) {
            if (!near(split_cost(l, prefix_end, k, r), target)) continue;
            const auto& candidate = sequence(k, r);
            if (suffix == nullptr || candidate < *suffix) suffix = &candidate;
        }

        std::vector<std::size_t> out = *prefix;
        out.insert(out.end(), suffix->begin(), suffix->end());
        return memo_.emplace(key, std::move(out)).first->second;
    }

    const LinkageTree& tree_;
    const DistanceMatrix& dist_;
    std::size_t n_;
    DistanceMatrix best_;
    std::vector<std::size_t> lca_;
    std::vector<std::vector<std::size_t>> leaves_;
    std::vector<std::vector<bool>> contains_;
    std::map<std::size_t, std::vector<std::size_t>> memo_;
};

}  // namespace

Ordering optimal_leaf_order(const LinkageTree& tree, const DistanceMatrix& distances) {
    if (tree.n_leaves != distances.size())
        fail(ErrorKind::InvalidArgument, "linkage tree has " + std::to_string(tree.n_leaves) +
                                             " leaves but the distance matrix has " +
                                             std::to_string(distances.size()) + " rows");
    if (tree.n_leaves == 0) fail(ErrorKind::InvalidArgument, "empty linkage tree");
    if (tree.merges.size() + 1 != tree.n_leaves) fail(ErrorKind::InvalidArgument, "malformed linkage tree");

    Ordering out;
    out.method = OrderingMethod::Olo;
    out.permutation = LeafOrderSolver(tree, distances).best_order();
    out.cost = ordering_cost(out.permutation, distances);
    return out;
}

SimilarityMatrix apply_order(const SimilarityMatrix& matrix, const std::vector<std::size_t>& ordering) {
    const std::size_t d = matrix.size();
    if (ordering.size() != d)
        fail(ErrorKind::InvalidArgument, "ordering length does not match the matrix dimension");
    std::vector<bool> seen(d, false);
    for (std::size_t idx : ordering) {
        if (idx >= d || seen[idx]) fail(ErrorKind::InvalidArgument, "ordering is not a permutation");
        seen[idx] = true;
    }
    SimilarityMatrix out;
    out.aggregation = matrix.aggregation;
    out.features.resize(d);
    out.ordering.resize(d);
    out.cells.assign(d * d, std::nullopt);
    for (std::size_t p = 0; p < d; ++p) {
        out.features[p] = matrix.features[ordering[p]];
        out.ordering[p] = matrix.ordering[ordering[p]];
        for (std::size_t q = 0; q < d; ++q) out.at(p, q) = matrix.at(ordering[p], ordering[q]);
    }
    return out;
}

}  // namespace cif
