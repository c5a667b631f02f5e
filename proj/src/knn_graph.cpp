#include "loopdet/knn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace loopdet {

double FeatureGraph::weight_between(int i, int j) const {
    const auto& nb = neighbors[static_cast<std::size_t>(i)];
    const auto it = std::lower_bound(nb.begin(), nb.end(), j);
    if (it == nb.end() || *it != j) return 0.0;
    return weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(it - nb.begin())];
}

bool FeatureGraph::has_edge(int i, int j) const {
    const auto& nb = neighbors[static_cast<std::size_t>(i)];
    return std::binary_search(nb.begin(), nb.end(), j);
}

FeatureGraph knn_graph(const Eigen::MatrixXd& X, std::size_t k, KnnMetric) {
    const std::size_t n = static_cast<std::size_t>(X.rows());
    if (k >= n) throw std::invalid_argument("knn_graph: k must be < number of rows");
    if (k == 0) throw std::invalid_argument("knn_graph: k must be positive");

    std::vector<std::vector<int>> knn(n);
    const auto worker = [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<double, int>> dists(n - 1);
        for (std::size_t i = begin; i < end; ++i) {
            std::size_t m = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double d2 = (X.row(static_cast<Eigen::Index>(i)) -
                                   X.row(static_cast<Eigen::Index>(j)))
                                      .squaredNorm();
                dists[m++] = {d2, static_cast<int>(j)};
            }
            std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k),
                              dists.end());
            knn[i].resize(k);
            for (std::size_t s = 0; s < k; ++s) knn[i][s] = dists[s].second;
        }
    };

    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min(hw, n);
    if (n_threads <= 1 || n < 64) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + n_threads - 1) / n_threads;
        for (std::size_t t = 0; t < n_threads; ++t) {
            const std::size_t b = t * chunk, e = std::min(n, b + chunk);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }

    // Symmetrize by union.
    FeatureGraph g;
    g.n_nodes = n;
    g.neighbors.assign(n, {});
    for (std::size_t i = 0; i < n; ++i)
        for (int j : knn[i]) {
            g.neighbors[i].push_back(j);
            g.neighbors[static_cast<std::size_t>(j)].push_back(static_cast<int>(i));
        }
    g.weights.resize(n);
    g.degree.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& nb = g.neighbors[i];
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        g.weights[i].assign(nb.size(), 1.0);
        g.degree[i] = static_cast<int>(nb.size()) + 1;
    }
    return g;
}

FeatureGraph normalize_adjacency(const FeatureGraph& g) {
    FeatureGraph out = g;
    for (std::size_t i = 0; i < g.n_nodes; ++i) {
        if (!std::is_sorted(g.neighbors[i].begin(), g.neighbors[i].end()))
            throw std::invalid_argument("normalize_adjacency: neighbor lists must be sorted");
        for (std::size_t s = 0; s < g.neighbors[i].size(); ++s) {
            const int j = g.neighbors[i][s];
            if (!g.has_edge(j, static_cast<int>(i)))
                throw std::invalid_argument("normalize_adjacency: graph must be symmetric");
            out.weights[i][s] =
                1.0 / std::sqrt(static_cast<double>(g.degree[i]) *
                                static_cast<double>(g.degree[static_cast<std::size_t>(j)]));
        }
    }
    return out;
}

void save_edge_list(const FeatureGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    for (std::size_t i = 0; i < g.n_nodes; ++i)
        for (std::size_t s = 0; s < g.neighbors[i].size(); ++s) {
            const int j = g.neighbors[i][s];
            if (static_cast<int>(i) < j) out << i << ' ' << j << ' ' << g.weights[i][s] << "\n";
        }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace loopdet
