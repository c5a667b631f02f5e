#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string>
#include <vector>

namespace loopdet {

/// Symmetric k-nearest-neighbor graph over descriptor rows. Neighbor lists
/// are sorted, self-loops excluded; degree counts the node itself plus its
/// neighbors (the self-inclusion used by aggregation).
struct FeatureGraph {
    std::size_t n_nodes = 0;
    std::vector<std::vector<int>> neighbors;
    std::vector<std::vector<double>> weights;  // parallel to neighbors
    std::vector<int> degree;

    double weight_between(int i, int j) const;  // 0 if no edge
    bool has_edge(int i, int j) const;
};

enum class KnnMetric { euclidean };

/// Exact brute-force kNN (ties broken by lower row index), symmetrized by
/// edge union, unit weights. O(n^2 d); parallel across query rows.
FeatureGraph knn_graph(const Eigen::MatrixXd& X, std::size_t k,
                       KnnMetric metric = KnnMetric::euclidean);

/// Replaces weights with 1/sqrt(deg(i) * deg(j)). The implied self-weight of
/// node i is 1/deg(i), read off the degree array by the aggregation step.
FeatureGraph normalize_adjacency(const FeatureGraph& g);

/// Writes one "i j weight" line per undirected edge (i < j).
void save_edge_list(const FeatureGraph& g, const std::string& path);

}  // namespace loopdet
