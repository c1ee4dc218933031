#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "drsne/kernels.hpp"
#include "drsne/neighbors.hpp"

namespace drsne {

/// Per-point Gaussian precisions that hit a target perplexity over the kNN support.
struct PerplexityCalibration {
    std::vector<double> beta;                  // precision per point, in 1 / (distance units)^2
    std::vector<double> achieved_perplexity;
    std::vector<bool> hit_iteration_cap;       // rows that stopped at the bisection cap

    std::size_t capped_rows() const;
};

struct CalibrationOptions {
    double entropy_tolerance_bits = 1e-4;
    int max_iterations = 200;
    double beta_min = 1e-12;
    double beta_max = 1e12;
};

/// Bisection for beta_i so that 2^H(p_.|i) equals the target perplexity, where
/// p_j|i is proportional to exp(-beta_i d_ij^2) over the neighbors of i.
/// Requires 1 < perplexity <= k. Throws if a row has only zero distances.
PerplexityCalibration calibrate_betas(const NeighborGraph& graph, double perplexity,
                                      const CalibrationOptions& options = {});

/// p_j|i for the neighbors of row i, in neighbor order.
std::vector<double> conditional_row(const NeighborGraph& graph, const PerplexityCalibration& calibration,
                                    std::size_t i);

/// Symmetric joint probabilities over the symmetrized kNN edge set.
///
/// Both ordered entries (i, j) and (j, i) are stored, with equal values, in CSR rows
/// sorted by column. Without exaggeration the stored values sum to one.
class AffinityMatrix {
public:
    AffinityMatrix() = default;
    AffinityMatrix(std::size_t n, std::vector<std::size_t> offsets, std::vector<std::uint32_t> cols,
                   std::vector<double> vals);

    std::size_t n() const noexcept { return n_; }
    std::size_t nnz() const noexcept { return vals_.size(); }

    std::span<const std::uint32_t> cols(std::size_t i) const { return {cols_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]}; }
    std::span<const double> vals(std::size_t i) const { return {vals_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]}; }

    /// p_ij, zero outside the support.
    double at(std::size_t i, std::size_t j) const;

    /// Sum over all stored ordered pairs.
    double total_mass() const noexcept { return mass_; }
    /// Sum over stored pairs of p_ij log p_ij (zero entries skipped).
    double p_log_p() const noexcept { return p_log_p_; }

    kernels::CsrView view() const noexcept { return {offsets_, cols_, vals_}; }

    /// Copy with every entry multiplied by factor.
    AffinityMatrix scaled(double factor) const;

private:
    void summarize();

    std::size_t n_ = 0;
    double mass_ = 0.0;
    double p_log_p_ = 0.0;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> cols_;
    std::vector<double> vals_;
};

/// p_ij = (p_j|i + p_i|j) / 2n, with p_j|i = 0 when j is not a neighbor of i.
AffinityMatrix joint_affinities(const NeighborGraph& graph, const PerplexityCalibration& calibration);

/// Early exaggeration: every p_ij multiplied by factor (total mass becomes factor).
AffinityMatrix exaggerate(const AffinityMatrix& p, double factor);

}  // namespace drsne
