#include "drsne/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "drsne/error.hpp"
#include "drsne/kernels.hpp"

namespace drsne {

DensityEstimate density_from_sums(std::span<const double> neighbor_sums, std::size_t k, double eps) {
    const std::size_t n = neighbor_sums.size();
    DensityEstimate est;
    est.rho.resize(n);
    est.rho_tilde.resize(n);
    est.log_rho_tilde.resize(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        est.rho[i] = static_cast<double>(k) / std::max(neighbor_sums[i], eps);
        mean += est.rho[i];
    }
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        est.rho_tilde[i] = est.rho[i] / mean;
        est.log_rho_tilde[i] = std::log(est.rho_tilde[i]);
    }
    return est;
}

DensityEstimate knn_density(const NeighborGraph& graph, double eps) {
    std::vector<double> sums(graph.n, 0.0);
    for (std::size_t i = 0; i < graph.n; ++i) {
        for (const double d : graph.distances(i)) sums[i] += d;
    }
    return density_from_sums(sums, graph.k, eps);
}

DensityObjective::DensityObjective(DensityEstimate high, NeighborGraph graph, double eps)
    : high_(std::move(high)), graph_(std::move(graph)), reverse_(reverse_adjacency(graph_)), eps_(eps) {
    if (high_.n() != graph_.n) {
        throw InvalidArgument("density estimate has " + std::to_string(high_.n()) + " points, graph has " +
                              std::to_string(graph_.n));
    }
}

void DensityObjective::set_graph(NeighborGraph graph) {
    if (graph.n != high_.n()) throw InvalidArgument("replacement graph has the wrong point count");
    graph_ = std::move(graph);
    reverse_ = reverse_adjacency(graph_);
}

double DensityObjective::loss(const Matrix& z, const Exec& exec) const {
    if (z.rows() != high_.n()) throw InvalidArgument("configuration and density estimate differ in point count");
    const kernels::NeighborView nb{graph_.k, graph_.idx, reverse_.offsets, reverse_.sources};
    std::vector<double> sums(z.rows());
    kernels::neighbor_distance_sums(z, nb, sums, exec);
    const DensityEstimate low = density_from_sums(sums, graph_.k, eps_);
    double loss = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) {
        const double r = high_.log_rho_tilde[i] - low.log_rho_tilde[i];
        loss += r * r;
    }
    return loss / static_cast<double>(z.rows());
}

double DensityObjective::loss_and_gradient(const Matrix& z, Matrix& grad, const Exec& exec) const {
    if (z.rows() != high_.n()) throw InvalidArgument("configuration and density estimate differ in point count");
    const std::size_t n = z.rows();
    const double inv_n = 1.0 / static_cast<double>(n);
    const kernels::NeighborView nb{graph_.k, graph_.idx, reverse_.offsets, reverse_.sources};
    std::vector<double> sums(n);
    kernels::neighbor_distance_sums(z, nb, sums, exec);
    const DensityEstimate low = density_from_sums(sums, graph_.k, eps_);

    std::vector<double> residual(n);
    double loss = 0.0;
    double residual_sum = 0.0;
    double rho_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        residual[i] = high_.log_rho_tilde[i] - low.log_rho_tilde[i];
        loss += residual[i] * residual[i];
        residual_sum += residual[i];
        rho_mean += low.rho[i];
    }
    rho_mean *= inv_n;

    // dL/dS_j: the own-term through log S_j plus the shared term through log(mean rho).
    std::vector<double> coef(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (sums[j] <= eps_) {
            coef[j] = 0.0;  // rho_j is flat in S_j below eps
            continue;
        }
        coef[j] = 2.0 * inv_n * (residual[j] - residual_sum * low.rho[j] * inv_n / rho_mean) / sums[j];
    }
    kernels::density_gather(z, nb, coef, grad, exec);
    return loss * inv_n;
}

double density_loss(const DensityEstimate& high, const Matrix& z, const NeighborGraph& graph, double eps,
                    const Exec& exec) {
    return DensityObjective(high, graph, eps).loss(z, exec);
}

Matrix density_loss_gradient(const DensityEstimate& high, const Matrix& z, const NeighborGraph& graph, double eps,
                             const Exec& exec) {
    Matrix grad;
    DensityObjective(high, graph, eps).loss_and_gradient(z, grad, exec);
    return grad;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw InvalidArgument("correlation needs two vectors of equal length >= 2");
    }
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) throw InvalidArgument("correlation undefined for a zero-variance vector");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    return pearson_correlation(ra, rb);
}

double density_correlation(const DensityEstimate& high, const DensityEstimate& low, CorrelationKind kind) {
    if (high.n() != low.n()) throw InvalidArgument("density estimates differ in point count");
    return kind == CorrelationKind::pearson ? pearson_correlation(high.log_rho_tilde, low.log_rho_tilde)
                                            : spearman_correlation(high.log_rho_tilde, low.log_rho_tilde);
}

}  // namespace drsne
