#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "drsne/matrix.hpp"
#include "drsne/parallel.hpp"

namespace drsne {

/// Symmetric n x n Euclidean distance matrix with zero diagonal.
struct DistanceMatrix {
    Matrix d;

    std::size_t n() const noexcept { return d.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return d(i, j); }
};

/// k nearest other points of every point, ascending by (distance, index).
struct NeighborGraph {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::uint32_t> idx;  // n * k
    std::vector<double> dist;        // n * k

    std::span<const std::uint32_t> neighbors(std::size_t i) const { return {idx.data() + i * k, k}; }
    std::span<const double> distances(std::size_t i) const { return {dist.data() + i * k, k}; }
};

/// Exact pairwise Euclidean distances between the rows of points.
DistanceMatrix pairwise_distances(const Matrix& points, const Exec& exec = {});

/// Brute-force kNN, self excluded, ties broken by ascending index. Requires 1 <= k <= n-1.
NeighborGraph knn(const Matrix& points, std::size_t k, const Exec& exec = {});

/// Reverse adjacency of a graph in CSR form: for every point m, the points i with
/// m in N_k(i), in ascending order of i.
struct ReverseAdjacency {
    std::vector<std::size_t> offsets;        // n + 1
    std::vector<std::uint32_t> sources;      // i
    std::vector<std::uint32_t> slots;        // position of m inside row i
};

ReverseAdjacency reverse_adjacency(const NeighborGraph& graph);

}  // namespace drsne
