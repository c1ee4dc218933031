#include "drsne/neighbors.hpp"

#include <cmath>
#include <string>

#include "drsne/error.hpp"
#include "drsne/kernels.hpp"

namespace drsne {

DistanceMatrix pairwise_distances(const Matrix& points, const Exec& exec) {
    if (points.rows() < 2) throw InvalidArgument("pairwise_distances needs at least 2 points");
    DistanceMatrix out;
    kernels::squared_distances(points, out.d, exec);
    for (double& v : out.d.values()) v = std::sqrt(v);
    return out;
}

NeighborGraph knn(const Matrix& points, std::size_t k, const Exec& exec) {
    const std::size_t n = points.rows();
    if (k < 1 || k >= n) {
        throw InvalidArgument("k = " + std::to_string(k) + " must be in [1, n - 1] for n = " + std::to_string(n));
    }
    NeighborGraph g;
    g.n = n;
    g.k = k;
    g.idx.resize(n * k);
    g.dist.resize(n * k);
    kernels::knn_rows(points, k, g.idx, g.dist, exec);
    return g;
}

ReverseAdjacency reverse_adjacency(const NeighborGraph& graph) {
    ReverseAdjacency rev;
    rev.offsets.assign(graph.n + 1, 0);
    for (const auto j : graph.idx) ++rev.offsets[j + 1];
    for (std::size_t i = 0; i < graph.n; ++i) rev.offsets[i + 1] += rev.offsets[i];
    rev.sources.resize(graph.idx.size());
    rev.slots.resize(graph.idx.size());
    std::vector<std::size_t> cursor(rev.offsets.begin(), rev.offsets.end() - 1);
    // Rows are visited in ascending order, so each reverse list is sorted by source.
    for (std::size_t i = 0; i < graph.n; ++i) {
        for (std::size_t m = 0; m < graph.k; ++m) {
            const std::size_t j = graph.idx[i * graph.k + m];
            rev.sources[cursor[j]] = static_cast<std::uint32_t>(i);
            rev.slots[cursor[j]] = static_cast<std::uint32_t>(m);
            ++cursor[j];
        }
    }
    return rev;
}

}  // namespace drsne
