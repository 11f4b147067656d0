#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cif/similarity.hpp"

namespace cif {

// Dense symmetric d×d matrix, row-major.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t a, std::size_t b) const { return data_[a * n_ + b]; }
    double& operator()(std::size_t a, std::size_t b) { return data_[a * n_ + b]; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

// Euclidean distance between matrix rows, with the diagonal read as 1.0 and
// undefined cells as 0.0.
DistanceMatrix feature_distances(const SimilarityMatrix& matrix);

struct Merge {
    std::size_t a = 0;  // smaller node id
    std::size_t b = 0;
    double height = 0.0;
};

// Leaves are 0..n-1; merge t creates node n + t.
struct LinkageTree {
    std::size_t n_leaves = 0;
    std::vector<Merge> merges;

    std::size_t root() const { return n_leaves == 1 ? 0 : n_leaves + merges.size() - 1; }
    // Leaves left to right as built (first child before second).
    std::vector<std::size_t> leaf_order() const;
};

// Average linkage (UPGMA). Ties between candidate merges go to the smallest
// (node_a, node_b) pair.
LinkageTree hierarchical_cluster(const DistanceMatrix& distances);

enum class OrderingMethod { Original, Olo };

std::string to_string(OrderingMethod method);
OrderingMethod parse_ordering(const std::string& text);

struct Ordering {
    std::vector<std::size_t> permutation;
    OrderingMethod method = OrderingMethod::Original;
    double cost = 0.0;  // sum of adjacent-leaf distances
};

double ordering_cost(const std::vector<std::size_t>& permutation, const DistanceMatrix& distances);

// Among all leaf orders reachable by flipping subtrees, one that minimises
// the summed distance between neighbours; ties go to the lexicographically
// smallest permutation.
Ordering optimal_leaf_order(const LinkageTree& tree, const DistanceMatrix& distances);

// Permutes rows and columns by `ordering` (new position p holds old index ordering[p]).
SimilarityMatrix apply_order(const SimilarityMatrix& matrix, const std::vector<std::size_t>& ordering);

}  // namespace cif
