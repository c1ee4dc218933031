#include "drsne/embed.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "drsne/error.hpp"
#include "drsne/kernels.hpp"
#include "drsne/neighbors.hpp"
#include "drsne/rng.hpp"

namespace drsne {

std::size_t OptimizerConfig::resolved_k_kl(std::size_t n) const {
    if (n < 2) return 0;
    if (dense_affinities) return n - 1;
    if (k_kl != 0) return k_kl;
    const auto k = static_cast<std::size_t>(std::llround(3.0 * perplexity));
    return std::min(std::max<std::size_t>(k, 1), n - 1);
}

std::size_t OptimizerConfig::resolved_k_density(std::size_t n) const {
    if (allow_k_cap && n >= 2) return std::min(k_density, n - 1);
    return k_density;
}

void OptimizerConfig::validate(std::size_t n) const {
    auto fail = [](const std::string& msg) { throw InvalidArgument("invalid optimizer config: " + msg); };
    if (n < 2) fail("need at least 2 points");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda must be finite and >= 0");
    if (iterations < 1) fail("iterations must be >= 1");
    if (warmup_iters > iterations) fail("warmup_iters must not exceed iterations");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be > 0");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) fail("adam_beta1 must be in [0, 1)");
    if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) fail("adam_beta2 must be in [0, 1)");
    if (!(adam_eps > 0.0)) fail("adam_eps must be > 0");
    if (!(clip_norm > 0.0)) fail("clip_norm must be > 0");
    if (!(init_std > 0.0) || !std::isfinite(init_std)) fail("init_std must be > 0");
    if (!(exaggeration_factor >= 1.0) || !std::isfinite(exaggeration_factor)) fail("exaggeration_factor must be >= 1");
    if (dim < 1 || dim > 3) fail("target dimension must be 1, 2 or 3");
    if (!(density_eps > 0.0) || !std::isfinite(density_eps)) fail("density_eps must be > 0");
    const std::size_t kk = resolved_k_kl(n);
    if (kk < 1 || kk > n - 1) fail("k_kl = " + std::to_string(kk) + " must be in [1, n - 1 = " + std::to_string(n - 1) + "]");
    if (!(perplexity > 1.0) || !(perplexity < static_cast<double>(kk))) {
        fail("perplexity " + std::to_string(perplexity) + " must be > 1 and < k_kl = " + std::to_string(kk));
    }
    const std::size_t kd = resolved_k_density(n);
    if (kd < 1 || kd > n - 1) {
        fail("k_density = " + std::to_string(kd) + " must be in [1, n - 1 = " + std::to_string(n - 1) + "]");
    }
}

Matrix student_t_similarities(const Matrix& z) {
    const std::size_t n = z.rows();
    if (n < 2) throw InvalidArgument("student_t_similarities needs at least 2 points");
    Matrix q(n, n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            q(i, j) = 1.0 / (1.0 + squared_distance(z.row(i), z.row(j)));
            total += q(i, j);
        }
    }
    for (double& v : q.values()) v /= total;
    return q;
}

double kl_loss(const AffinityMatrix& p, const Matrix& q) {
    if (q.rows() != p.n() || q.cols() != p.n()) throw InvalidArgument("q must be n x n for the affinity matrix");
    double s = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) {
        const auto cols = p.cols(i);
        const auto vals = p.vals(i);
        for (std::size_t e = 0; e < cols.size(); ++e) {
            if (vals[e] <= 0.0) continue;
            const double qij = std::max(q(i, cols[e]), std::numeric_limits<double>::min());
            s += vals[e] * std::log(vals[e] / qij);
        }
    }
    return s / static_cast<double>(p.n());
}

namespace {

// Shared fused pass: loss = (1/n) [sum p log p - sum p log w + c log Z] with
// gradient (4/n) (att - (c / Z) rep). c = M gives KL(P || Q) for any mass M, c = 1
// the classic exaggerated objective.
double fused_loss_and_gradient(const AffinityMatrix& p, const Matrix& z, Matrix& grad, bool unit_log_z,
                               const Exec& exec) {
    const std::size_t n = z.rows();
    const std::size_t d = z.cols();
    if (p.n() != n) throw InvalidArgument("affinity matrix and configuration differ in point count");

    std::vector<double> row_sums(n);
    Matrix rep;
    kernels::student_t_repulsion(z, row_sums, rep, exec);
    std::vector<double> row_p_log_w(n);
    Matrix att;
    kernels::sparse_attraction(p.view(), z, att, row_p_log_w, exec);

    double normalizer = 0.0;
    double p_log_w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        normalizer += row_sums[i];
        p_log_w += row_p_log_w[i];
    }
    const double c = unit_log_z ? 1.0 : p.total_mass();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double repulsion_scale = c / normalizer;
    grad = Matrix(n, d);
    for (std::size_t e = 0; e < n * d; ++e) {
        grad.data()[e] = 4.0 * inv_n * (att.data()[e] - repulsion_scale * rep.data()[e]);
    }
    return inv_n * (p.p_log_p() - p_log_w + c * std::log(normalizer));
}

}  // namespace

double kl_loss_and_gradient(const AffinityMatrix& p, const Matrix& z, Matrix& grad, const Exec& exec) {
    return fused_loss_and_gradient(p, z, grad, false, exec);
}

double exaggerated_loss_and_gradient(const AffinityMatrix& p_ex, const Matrix& z, Matrix& grad, const Exec& exec) {
    return fused_loss_and_gradient(p_ex, z, grad, true, exec);
}

Matrix kl_gradient(const AffinityMatrix& p, const Matrix& z, const Exec& exec) {
    Matrix grad;
    kl_loss_and_gradient(p, z, grad, exec);
    return grad;
}

ObjectiveValue drsne_objective(const AffinityMatrix& p, const DensityObjective& density, double lambda,
                               const Matrix& z, Matrix* grad, const Exec& exec) {
    ObjectiveValue v;
    if (grad == nullptr) {
        Matrix scratch;
        v.kl = kl_loss_and_gradient(p, z, scratch, exec);
        v.density = density.loss(z, exec);
    } else {
        v.kl = kl_loss_and_gradient(p, z, *grad, exec);
        Matrix g_density;
        v.density = density.loss_and_gradient(z, g_density, exec);
        for (std::size_t e = 0; e < grad->size(); ++e) grad->data()[e] += lambda * g_density.data()[e];
    }
    v.total = v.kl + lambda * v.density;
    return v;
}

double clip_by_global_norm(Matrix& grad, double max_norm) {
    double norm2 = 0.0;
    for (const double g : grad.values()) norm2 += g * g;
    const double norm = std::sqrt(norm2);
    if (norm > max_norm) {
        const double s = max_norm / norm;
        for (double& g : grad.values()) g *= s;
    }
    return norm;
}

Matrix gaussian_init(std::size_t n, const OptimizerConfig& config) {
    Rng rng(config.seed);
    NormalSampler normal;
    Matrix z(n, config.dim);
    for (double& v : z.values()) v = config.init_std * normal(rng);
    return z;
}

namespace {

bool all_finite(const Matrix& m) {
    return std::all_of(m.values().begin(), m.values().end(), [](double v) { return std::isfinite(v); });
}

NeighborGraph truncate(const NeighborGraph& g, std::size_t k) {
    NeighborGraph out;
    out.n = g.n;
    out.k = k;
    out.idx.resize(g.n * k);
    out.dist.resize(g.n * k);
    for (std::size_t i = 0; i < g.n; ++i) {
        std::copy_n(g.idx.begin() + static_cast<std::ptrdiff_t>(i * g.k), k, out.idx.begin() + static_cast<std::ptrdiff_t>(i * k));
        std::copy_n(g.dist.begin() + static_cast<std::ptrdiff_t>(i * g.k), k, out.dist.begin() + static_cast<std::ptrdiff_t>(i * k));
    }
    return out;
}

}  // namespace

Embedding run_drsne(const DataMatrix& data, const OptimizerConfig& config, const Exec& exec) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();

    data.validate();
    const std::size_t n = data.n();
    config.validate(n);
    const std::size_t k_kl = config.resolved_k_kl(n);
    const std::size_t k_density = config.resolved_k_density(n);

    // One kNN pass at the larger k; the smaller graph is its sorted prefix.
    const NeighborGraph wide = knn(data.values, std::max(k_kl, k_density), exec);
    const NeighborGraph kl_graph = wide.k == k_kl ? wide : truncate(wide, k_kl);
    NeighborGraph density_graph = wide.k == k_density ? wide : truncate(wide, k_density);

    const PerplexityCalibration calibration = calibrate_betas(kl_graph, config.perplexity);
    const AffinityMatrix p = joint_affinities(kl_graph, calibration);
    const AffinityMatrix p_early = exaggerate(p, config.exaggeration_factor);
    DensityEstimate high = knn_density(density_graph, config.density_eps);
    DensityObjective density(std::move(high), std::move(density_graph), config.density_eps);

    Embedding out;
    out.config = config;
    out.config.k_kl = k_kl;
    out.config.k_density = k_density;
    out.capped_calibration_rows = calibration.capped_rows();
    out.z = gaussian_init(n, config);
    out.trace.reserve(config.iterations);

    const std::size_t coords = n * config.dim;
    std::vector<double> m1(coords, 0.0);
    std::vector<double> m2(coords, 0.0);
    Matrix grad;
    Matrix grad_density;
    Matrix last_finite = out.z;

    const auto optimize_start = clock::now();
    out.setup_seconds = std::chrono::duration<double>(optimize_start - start).count();

    double beta1_power = 1.0;
    double beta2_power = 1.0;
    for (std::size_t t = 0; t < config.iterations; ++t) {
        const bool warmup = t < config.warmup_iters;
        if (!warmup && config.density_recompute_every > 0 &&
            (t - config.warmup_iters) % config.density_recompute_every == 0) {
            density.set_graph(knn(out.z, k_density, exec));
        }

        LossRecord rec;
        rec.iteration = t;
        rec.kl = warmup ? exaggerated_loss_and_gradient(p_early, out.z, grad, exec)
                        : kl_loss_and_gradient(p, out.z, grad, exec);
        if (warmup || config.lambda == 0.0) {
            rec.density = density.loss(out.z, exec);
            rec.total = warmup ? rec.kl : rec.kl + config.lambda * rec.density;
        } else {
            rec.density = density.loss_and_gradient(out.z, grad_density, exec);
            for (std::size_t e = 0; e < coords; ++e) grad.data()[e] += config.lambda * grad_density.data()[e];
            rec.total = rec.kl + config.lambda * rec.density;
        }

        rec.grad_norm = clip_by_global_norm(grad, config.clip_norm);
        if (!std::isfinite(rec.total) || !std::isfinite(rec.grad_norm)) {
            throw NumericalError("non-finite loss or gradient at iteration " + std::to_string(t), t, last_finite);
        }

        beta1_power *= config.adam_beta1;
        beta2_power *= config.adam_beta2;
        const double bias1 = 1.0 - beta1_power;
        const double bias2 = 1.0 - beta2_power;
        for (std::size_t e = 0; e < coords; ++e) {
            const double g = grad.data()[e];
            m1[e] = config.adam_beta1 * m1[e] + (1.0 - config.adam_beta1) * g;
            m2[e] = config.adam_beta2 * m2[e] + (1.0 - config.adam_beta2) * g * g;
            const double step = (m1[e] / bias1) / (std::sqrt(m2[e] / bias2) + config.adam_eps);
            out.z.data()[e] -= config.learning_rate * step;
        }
        if (!all_finite(out.z)) {
            throw NumericalError("non-finite coordinates after iteration " + std::to_string(t), t, last_finite);
        }
        last_finite = out.z;
        out.trace.push_back(rec);
        out.iterations_run = t + 1;
    }
    out.optimize_seconds = std::chrono::duration<double>(clock::now() - optimize_start).count();
    return out;
}

}  // namespace drsne
