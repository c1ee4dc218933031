#pragma once

// Hot O(n^2) and O(nk) loops of the pipeline. Every kernel has a sequential reference
// version (namespace serial) and an OpenMP row-parallel version (namespace omp). The
// dispatching wrappers at the bottom pick one from an Exec policy.
//
// The OpenMP versions only write per-row outputs; any cross-row total is formed by the
// caller in index order, so results agree with the serial versions up to the
// associativity of the per-row sums.

#include <cstddef>
#include <cstdint>
#include <span>

#include "drsne/matrix.hpp"
#include "drsne/parallel.hpp"

namespace drsne::kernels {

/// Read-only CSR rows: entries of row i are [offsets[i], offsets[i+1]).
struct CsrView {
    std::span<const std::size_t> offsets;
    std::span<const std::uint32_t> cols;
    std::span<const double> vals;
};

/// Fixed-width neighbor lists plus their reverse lists (see ReverseAdjacency).
struct NeighborView {
    std::size_t k = 0;
    std::span<const std::uint32_t> idx;
    std::span<const std::size_t> rev_offsets;
    std::span<const std::uint32_t> rev_sources;
};

namespace serial {

void squared_distances(const Matrix& x, Matrix& out);
void knn_rows(const Matrix& x, std::size_t k, std::span<std::uint32_t> idx, std::span<double> dist);
/// row_sums[i] = sum_{j != i} w_ij, rep_i = sum_j w_ij^2 (z_i - z_j), w_ij = 1 / (1 + |z_i - z_j|^2).
/// Visits each unordered pair once.
void student_t_repulsion(const Matrix& z, std::span<double> row_sums, Matrix& rep);
/// att_i = sum_j p_ij w_ij (z_i - z_j); row_p_log_w[i] = sum_j p_ij log w_ij.
/// p must be symmetric with sorted rows; each unordered pair is visited once.
void sparse_attraction(const CsrView& p, const Matrix& z, Matrix& att, std::span<double> row_p_log_w);
/// sums[i] = sum over neighbors l of |z_i - z_l|.
void neighbor_distance_sums(const Matrix& z, const NeighborView& nb, std::span<double> sums);
/// grad_i = coef_i sum_{l in N(i)} u_il + sum_{m : i in N(m)} coef_m u_im, u_ab = (z_a - z_b) / |z_a - z_b|.
void density_gather(const Matrix& z, const NeighborView& nb, std::span<const double> coef, Matrix& grad);

}  // namespace serial

namespace omp {

void squared_distances(const Matrix& x, Matrix& out, int threads);
void knn_rows(const Matrix& x, std::size_t k, std::span<std::uint32_t> idx, std::span<double> dist, int threads);
/// Same contract as serial::student_t_repulsion; each row visits all n - 1 partners.
void student_t_repulsion(const Matrix& z, std::span<double> row_sums, Matrix& rep, int threads);
void sparse_attraction(const CsrView& p, const Matrix& z, Matrix& att, std::span<double> row_p_log_w, int threads);
void neighbor_distance_sums(const Matrix& z, const NeighborView& nb, std::span<double> sums, int threads);
void density_gather(const Matrix& z, const NeighborView& nb, std::span<const double> coef, Matrix& grad, int threads);

}  // namespace omp

inline void squared_distances(const Matrix& x, Matrix& out, const Exec& exec) {
    exec.parallel() ? omp::squared_distances(x, out, exec.threads) : serial::squared_distances(x, out);
}
inline void knn_rows(const Matrix& x, std::size_t k, std::span<std::uint32_t> idx, std::span<double> dist,
                     const Exec& exec) {
    exec.parallel() ? omp::knn_rows(x, k, idx, dist, exec.threads) : serial::knn_rows(x, k, idx, dist);
}
inline void student_t_repulsion(const Matrix& z, std::span<double> row_sums, Matrix& rep, const Exec& exec) {
    exec.parallel() ? omp::student_t_repulsion(z, row_sums, rep, exec.threads)
                    : serial::student_t_repulsion(z, row_sums, rep);
}
inline void sparse_attraction(const CsrView& p, const Matrix& z, Matrix& att, std::span<double> row_p_log_w,
                              const Exec& exec) {
    exec.parallel() ? omp::sparse_attraction(p, z, att, row_p_log_w, exec.threads)
                    : serial::sparse_attraction(p, z, att, row_p_log_w);
}
inline void neighbor_distance_sums(const Matrix& z, const NeighborView& nb, std::span<double> sums,
                                   const Exec& exec) {
    exec.parallel() ? omp::neighbor_distance_sums(z, nb, sums, exec.threads)
                    : serial::neighbor_distance_sums(z, nb, sums);
}
inline void density_gather(const Matrix& z, const NeighborView& nb, std::span<const double> coef, Matrix& grad,
                           const Exec& exec) {
    exec.parallel() ? omp::density_gather(z, nb, coef, grad, exec.threads)
                    : serial::density_gather(z, nb, coef, grad);
}

}  // namespace drsne::kernels
