#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "drsne/matrix.hpp"
#include "drsne/neighbors.hpp"
#include "drsne/parallel.hpp"

namespace drsne {

inline constexpr double kDensityEpsilon = 1e-8;

/// kNN density rho_i = k / max(S_i, eps), S_i the sum of distances to the k neighbors,
/// its unit-mean normalization and the log of the latter. eps only matters for
/// coincident points; above it the normalized values are exactly scale free.
struct DensityEstimate {
    std::vector<double> rho;
    std::vector<double> rho_tilde;
    std::vector<double> log_rho_tilde;

    std::size_t n() const noexcept { return rho.size(); }
};

DensityEstimate density_from_sums(std::span<const double> neighbor_sums, std::size_t k,
                                  double eps = kDensityEpsilon);

DensityEstimate knn_density(const NeighborGraph& graph, double eps = kDensityEpsilon);

/// Mean squared difference of normalized log densities between the reference estimate
/// and the configuration z, whose densities are evaluated on the fixed index sets of
/// graph (distances recomputed in z).
double density_loss(const DensityEstimate& high, const Matrix& z, const NeighborGraph& graph,
                    double eps = kDensityEpsilon, const Exec& exec = {});

/// Exact gradient of density_loss with respect to z (n x d), including the
/// normalization mean.
Matrix density_loss_gradient(const DensityEstimate& high, const Matrix& z, const NeighborGraph& graph,
                             double eps = kDensityEpsilon, const Exec& exec = {});

/// Reusable evaluator for the optimizer: builds the reverse adjacency once.
class DensityObjective {
public:
    DensityObjective(DensityEstimate high, NeighborGraph graph, double eps = kDensityEpsilon);

    double loss(const Matrix& z, const Exec& exec) const;
    /// Returns the loss and writes the gradient into grad (resized as needed).
    double loss_and_gradient(const Matrix& z, Matrix& grad, const Exec& exec) const;

    /// Replace the index sets, e.g. with neighbors recomputed in the embedding.
    void set_graph(NeighborGraph graph);

    const NeighborGraph& graph() const noexcept { return graph_; }
    const DensityEstimate& reference() const noexcept { return high_; }

private:
    DensityEstimate high_;
    NeighborGraph graph_;
    ReverseAdjacency reverse_;
    double eps_;
};

enum class CorrelationKind { pearson, spearman };

double pearson_correlation(std::span<const double> a, std::span<const double> b);
double spearman_correlation(std::span<const double> a, std::span<const double> b);

/// Correlation of the two log_rho_tilde vectors. Throws if either has zero variance.
double density_correlation(const DensityEstimate& high, const DensityEstimate& low,
                           CorrelationKind kind = CorrelationKind::pearson);

}  // namespace drsne
