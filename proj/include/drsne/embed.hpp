#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "drsne/affinity.hpp"
#include "drsne/density.hpp"
#include "drsne/matrix.hpp"
#include "drsne/parallel.hpp"
#include "drsne/preprocess.hpp"

namespace drsne {

struct OptimizerConfig {
    double lambda = 0.0;               // density weight
    std::size_t k_kl = 0;              // 0: round(3 * perplexity), capped at n - 1
    std::size_t k_density = 300;       // capped at n - 1 only when allow_k_cap is set
    double perplexity = 30.0;
    std::size_t iterations = 1000;
    std::size_t warmup_iters = 250;
    double exaggeration_factor = 12.0;
    double learning_rate = 0.5;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double clip_norm = 5.0;
    double init_std = 1e-2;
    std::uint64_t seed = 0;
    std::size_t dim = 2;
    bool dense_affinities = false;     // conditionals over all j != i instead of the kNN support
    std::size_t density_recompute_every = 0;  // 0: fixed high-dimensional index sets
    double density_eps = kDensityEpsilon;
    bool allow_k_cap = false;          // clamp k_density to n - 1 instead of rejecting

    /// k_kl after applying the default rule for a data set of n points.
    std::size_t resolved_k_kl(std::size_t n) const;
    std::size_t resolved_k_density(std::size_t n) const;

    /// Throws InvalidArgument when a field is out of range for n points.
    void validate(std::size_t n) const;
};

struct LossRecord {
    std::size_t iteration = 0;
    double kl = 0.0;
    double density = 0.0;   // unweighted
    double total = 0.0;     // objective actually optimized at this step
    double grad_norm = 0.0; // before clipping
};

struct Embedding {
    Matrix z;
    OptimizerConfig config;
    std::size_t iterations_run = 0;
    std::vector<LossRecord> trace;
    double setup_seconds = 0.0;
    double optimize_seconds = 0.0;
    std::size_t capped_calibration_rows = 0;

    double seconds_per_iteration() const {
        return iterations_run == 0 ? 0.0 : optimize_seconds / static_cast<double>(iterations_run);
    }
};

/// Dense Student-t similarities, normalized over ordered pairs; q_ii = 0.
Matrix student_t_similarities(const Matrix& z);

/// (1/n) sum over stored ordered pairs of p_ij log(p_ij / q_ij).
double kl_loss(const AffinityMatrix& p, const Matrix& q);

/// Exact gradient of kl_loss(p, student_t_similarities(z)) with respect to z, for any
/// total mass of p (so it also differentiates the exaggerated loss).
Matrix kl_gradient(const AffinityMatrix& p, const Matrix& z, const Exec& exec = {});

/// Fused O(n^2) evaluation of the KL loss and its gradient without forming q.
double kl_loss_and_gradient(const AffinityMatrix& p, const Matrix& z, Matrix& grad, const Exec& exec = {});

/// Warm-up objective for an exaggerated matrix p_ex = factor * P:
///   (1/n) [sum p_ex log(p_ex / w) + log Z],  Z = sum_{i != j} w_ij.
/// Its gradient is (4/n) sum_j (p_ex_ij - q_ij) w_ij (z_i - z_j), so attraction is
/// amplified while repulsion keeps its unexaggerated weight. Equals kl_loss_and_gradient
/// when p_ex has unit mass.
double exaggerated_loss_and_gradient(const AffinityMatrix& p_ex, const Matrix& z, Matrix& grad,
                                     const Exec& exec = {});

/// The post-warm-up objective KL + lambda * density, and its gradient.
struct ObjectiveValue {
    double kl = 0.0;
    double density = 0.0;
    double total = 0.0;
};

ObjectiveValue drsne_objective(const AffinityMatrix& p, const DensityObjective& density, double lambda,
                               const Matrix& z, Matrix* grad, const Exec& exec = {});

/// Rescales grad to global norm max_norm if it is longer. Returns the norm before clipping.
double clip_by_global_norm(Matrix& grad, double max_norm);

/// Gaussian initial coordinates, N(0, init_std^2), from config.seed.
Matrix gaussian_init(std::size_t n, const OptimizerConfig& config);

/// Full pipeline: kNN graphs, perplexity calibration, joint P, warm-up with exaggerated
/// P, then KL + lambda * density under Adam with global-norm gradient clipping.
/// Throws NumericalError if a loss or coordinate becomes non-finite.
Embedding run_drsne(const DataMatrix& data, const OptimizerConfig& config, const Exec& exec = {});

}  // namespace drsne
