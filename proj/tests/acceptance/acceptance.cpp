// Acceptance checks for the eight release criteria. Prints one PASS/FAIL line per
// criterion and exits nonzero if any fails. Pass criterion numbers as arguments to run
// a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "drsne/anomaly.hpp"
#include "drsne/cli.hpp"
#include "drsne/data.hpp"
#include "drsne/embed.hpp"
#include "drsne/metrics.hpp"
#include "drsne/rng.hpp"
#include "test_support.hpp"

using namespace drsne;
using testing::random_matrix;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

Matrix dense(const AffinityMatrix& p) {
    Matrix out(p.n(), p.n());
    for (std::size_t i = 0; i < p.n(); ++i) {
        for (std::size_t j = 0; j < p.n(); ++j) out(i, j) = p.at(i, j);
    }
    return out;
}

std::vector<std::vector<std::size_t>> index_sets(const NeighborGraph& g) {
    std::vector<std::vector<std::size_t>> sets(g.n);
    for (std::size_t i = 0; i < g.n; ++i) sets[i].assign(g.neighbors(i).begin(), g.neighbors(i).end());
    return sets;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// 1. Gradients of the KL term, the density term and their weighted sum against
//    central differences of the dense oracle losses.
Outcome gradients() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(2024);
    std::uniform_int_distribution<std::size_t> size(8, 25);
    std::uniform_real_distribution<double> log_lambda(-3.0, 1.0);
    double worst_kl = 0.0, worst_dens = 0.0, worst_total = 0.0;
    const int instances = 24;
    for (int t = 0; t < instances; ++t) {
        const std::size_t n = size(rng);
        const Matrix x = random_matrix(n, 4, 100 + t);
        const Matrix z = random_matrix(n, 2, 200 + t);
        const std::size_t k_kl = std::min<std::size_t>(n - 1, 9);
        const NeighborGraph gk = knn(x, k_kl);
        const AffinityMatrix p = joint_affinities(gk, calibrate_betas(gk, 3.0));
        const NeighborGraph gd = knn(x, 5);
        const DensityEstimate high = knn_density(gd);
        const DensityObjective dens(high, gd);
        const Matrix pd = dense(p);
        const auto sets = index_sets(gd);
        const double lambda = std::pow(10.0, log_lambda(rng));

        auto kl_f = [&](const Matrix& y) { return testing::kl_oracle(pd, y); };
        auto dens_f = [&](const Matrix& y) { return testing::density_loss_oracle(high.log_rho_tilde, y, sets); };
        auto total_f = [&](const Matrix& y) { return kl_f(y) + lambda * dens_f(y); };

        worst_kl = std::max(worst_kl, testing::max_relative_error(kl_gradient(p, z), testing::fd_gradient(kl_f, z)));
        worst_dens = std::max(worst_dens, testing::max_relative_error(density_loss_gradient(high, z, gd),
                                                                      testing::fd_gradient(dens_f, z)));
        Matrix grad;
        drsne_objective(p, dens, lambda, z, &grad);
        worst_total = std::max(worst_total, testing::max_relative_error(grad, testing::fd_gradient(total_f, z)));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Outcome o;
    o.pass = worst_kl <= 1e-4 && worst_dens <= 1e-4 && worst_total <= 1e-4 && secs < 60.0;
    o.detail = fmt("%d instances, max rel err kl %.2e, density %.2e, total %.2e (<= 1e-4), %.1f s", instances, worst_kl,
                   worst_dens, worst_total, secs);
    return o;
}

// 2. Invariances of the density loss, density correlation, P mass and q mass.
Outcome invariances() {
    double loss_drift = 0.0, dc_drift = 0.0, mass_err = 0.0, q_err = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Matrix x = random_matrix(40, 5, 300 + s);
        const Matrix z = random_matrix(40, 2, 400 + s);
        const NeighborGraph g = knn(x, 6);
        const DensityEstimate high = knn_density(g);
        const double base = density_loss(high, z, g);
        for (const double alpha : {1e-3, 0.5, 3.0, 1e3}) {
            const Matrix moved = testing::affine(z, alpha, {17.0 * static_cast<double>(s) - 5.0, 0.25});
            loss_drift = std::max(loss_drift, std::abs(density_loss(high, moved, g) - base));
        }

        const double dc = density_correlation(knn_density(knn(x, 6)), knn_density(knn(z, 6)));
        for (const auto& [a, b] : std::vector<std::pair<double, double>>{{2.0, 0.1}, {1e-2, 7.5}, {1e3, 1e3}}) {
            const Matrix xs = testing::affine(x, a, std::vector<double>(5, 0.0));
            const Matrix zs = testing::affine(z, b, {0.0, 0.0});
            dc_drift = std::max(dc_drift, std::abs(density_correlation(knn_density(knn(xs, 6)), knn_density(knn(zs, 6))) - dc));
        }

        const NeighborGraph gk = knn(x, 15);
        const AffinityMatrix p = joint_affinities(gk, calibrate_betas(gk, 5.0));
        double mass = 0.0;
        for (std::size_t i = 0; i < p.n(); ++i) {
            for (const double v : p.vals(i)) mass += v;
        }
        mass_err = std::max(mass_err, std::abs(mass - 1.0));

        const Matrix q = student_t_similarities(random_matrix(40, 2, 500 + s, 10.0));
        double qs = 0.0;
        for (const double v : q.values()) qs += v;
        q_err = std::max(q_err, std::abs(qs - 1.0));
    }
    Outcome o;
    o.pass = loss_drift <= 1e-10 && dc_drift <= 1e-10 && mass_err <= 1e-8 && q_err <= 1e-12;
    o.detail = fmt("density loss drift %.2e (<= 1e-10), DC drift %.2e (<= 1e-10), |sum P - 1| %.2e (<= 1e-8), "
                   "|sum q - 1| %.2e (<= 1e-12)",
                   loss_drift, dc_drift, mass_err, q_err);
    return o;
}

// 3. Metrics and detectors against brute-force oracles.
Outcome oracles() {
    double tw = 0.0, sil = 0.0, st = 0.0, lof = 0.0, knn_d = 0.0, cent = 0.0, ap = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Matrix x = random_matrix(50, 5, 600 + s);
        const Matrix z = random_matrix(50, 2, 700 + s);
        for (const std::size_t k : {3, 10, 24}) {
            tw = std::max(tw, std::abs(trustworthiness(x, z, k) - testing::trustworthiness_oracle(x, z, k)));
            tw = std::max(tw, std::abs(continuity(x, z, k) - testing::trustworthiness_oracle(z, x, k)));
        }
        std::vector<int> labels(50);
        for (std::size_t i = 0; i < 50; ++i) labels[i] = static_cast<int>((i * 7 + s) % 4);
        sil = std::max(sil, std::abs(silhouette(z, labels) - testing::silhouette_oracle(z, labels)));
        st = std::max(st, std::abs(stress(x, z) - testing::stress_oracle(x, z)));

        const auto l = lof_score(z, 6).scores;
        const auto lo = testing::lof_oracle(z, 6);
        const auto kn = knn_score(z, 6).scores;
        const auto ko = testing::knn_score_oracle(z, 6);
        const auto c = centroid_score(z).scores;
        const auto co = testing::centroid_oracle(z);
        for (std::size_t i = 0; i < 50; ++i) {
            lof = std::max(lof, std::abs(l[i] - lo[i]));
            knn_d = std::max(knn_d, std::abs(kn[i] - ko[i]));
            cent = std::max(cent, std::abs(c[i] - co[i]));
        }

        Rng rng(800 + s);
        std::vector<double> scores(50);
        std::vector<bool> flags(50);
        for (std::size_t i = 0; i < 50; ++i) {
            scores[i] = static_cast<double>(rng() % 12);
            flags[i] = rng() % 5 == 0;
        }
        flags[0] = true;
        flags[1] = false;
        ap = std::max(ap, std::abs(auprc(scores, flags) - testing::auprc_oracle(scores, flags)));
    }
    Outcome o;
    o.pass = tw <= 1e-12 && sil <= 1e-12 && st <= 1e-12 && lof <= 1e-9 && knn_d <= 1e-12 && cent <= 1e-12 && ap <= 1e-9;
    o.detail = fmt("max abs diff: tw/continuity %.1e, silhouette %.1e, stress %.1e, knn %.1e, centroid %.1e "
                   "(<= 1e-12); lof %.1e, auprc %.1e (<= 1e-9)",
                   tw, sil, st, knn_d, cent, lof, ap);
    return o;
}

// 4. Spiral: some lambda reaches DC >= 0.95 and TW >= 0.98.
Outcome spiral() {
    const SpiralSample s = gen_spiral_plain(2000, 1.5 * M_PI, 4.5 * M_PI, M_PI, 0.8, 0.15, 1);
    const DataMatrix d = standardize(s.data);
    std::string detail;
    bool pass = false;
    for (const double lambda : {1e-4, 1e-3, 5e-3, 1e-2, 5e-2, 1e-1}) {
        OptimizerConfig c;
        c.lambda = lambda;
        c.k_density = 40;
        c.seed = 0;
        const Embedding e = run_drsne(d, c);
        const MetricReport r = evaluate(d.values, e.z, std::nullopt, 40);
        pass = pass || (r.density_correlation >= 0.95 && r.trustworthiness >= 0.98);
        detail += fmt("%slambda=%g DC=%.4f TW=%.4f", detail.empty() ? "" : "; ", lambda, r.density_correlation,
                      r.trustworthiness);
    }
    return {pass, detail + " (need DC >= 0.95 and TW >= 0.98 at one lambda)"};
}

// Five Gaussian components in 10-D with spreads from 0.25 to 4.
DataMatrix heterogeneous_mixture() {
    const std::size_t n = 1500, dim = 10;
    const double sd[5] = {0.25, 0.5, 1.0, 2.0, 4.0};
    Rng rng(42);
    NormalSampler normal;
    Matrix centers(5, dim);
    for (double& v : centers.values()) v = 8.0 * normal(rng);
    DataMatrix d;
    d.values = Matrix(n, dim);
    d.labels = std::vector<int>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % 5;
        (*d.labels)[i] = static_cast<int>(c);
        for (std::size_t j = 0; j < dim; ++j) d.values(i, j) = centers(c, j) + sd[c] * normal(rng);
    }
    return standardize(d);
}

// 5. Mean DC non-decreasing in lambda (0.02 slack); TW at 0.1 below TW at 1e-3.
Outcome tradeoff() {
    const DataMatrix d = heterogeneous_mixture();
    const std::vector<double> lambdas{0.0, 1e-3, 1e-2, 1e-1};
    std::vector<double> dc_mean, tw_mean;
    for (const double lambda : lambdas) {
        std::vector<double> dc, tw;
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            OptimizerConfig c;
            c.lambda = lambda;
            c.k_density = 300;
            c.learning_rate = 0.02;
            c.seed = seed;
            const Embedding e = run_drsne(d, c);
            const MetricReport r = evaluate(d.values, e.z, std::nullopt, 300);
            dc.push_back(r.density_correlation);
            tw.push_back(r.trustworthiness);
        }
        dc_mean.push_back(mean(dc));
        tw_mean.push_back(mean(tw));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < lambdas.size(); ++i) monotone = monotone && dc_mean[i] >= dc_mean[i - 1] - 0.02;
    const bool tw_drop = tw_mean[3] < tw_mean[1];
    std::string detail;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        detail += fmt("%slambda=%g DC=%.4f TW=%.4f", i == 0 ? "" : "; ", lambdas[i], dc_mean[i], tw_mean[i]);
    }
    return {monotone && tw_drop, detail + fmt(" (DC non-decreasing: %s, TW(0.1) < TW(1e-3): %s)",
                                              monotone ? "yes" : "no", tw_drop ? "yes" : "no")};
}

// 6. Per-iteration time ratio between n = 2000 and n = 1000 in [3, 5].
Outcome scaling() {
    OptimizerConfig c;
    c.perplexity = 10.0;
    c.k_density = 30;
    c.lambda = 0.01;
    c.iterations = 300;
    c.warmup_iters = 100;
    const DataMatrix small = standardize(gen_spiral_plain(1000, 1.5 * M_PI, 4.5 * M_PI, M_PI, 0.8, 0.15, 1).data);
    const DataMatrix large = standardize(gen_spiral_plain(2000, 1.5 * M_PI, 4.5 * M_PI, M_PI, 0.8, 0.15, 1).data);
    std::vector<double> t_small, t_large;
    for (int r = 0; r < 5; ++r) {
        c.seed = static_cast<std::uint64_t>(r);
        t_small.push_back(run_drsne(small, c, Exec::sequential()).seconds_per_iteration());
        t_large.push_back(run_drsne(large, c, Exec::sequential()).seconds_per_iteration());
    }
    const double ratio = mean(t_large) / mean(t_small);
    return {ratio >= 3.0 && ratio <= 5.0,
            fmt("5 runs each, mean s/iter n=1000 %.3e, n=2000 %.3e, ratio %.3f (need [3, 5])", mean(t_small),
                mean(t_large), ratio)};
}

// 7. kNN-distance AUPRC of the best-DC embedding of the density spiral.
Outcome anomaly() {
    const SpiralSample s = gen_density_spiral(SpiralConfig{});
    double best_dc = -2.0, best_lambda = 0.0;
    Matrix best;
    for (const double lambda : {1e-4, 1e-3, 5e-3, 1e-2}) {
        OptimizerConfig c;
        c.lambda = lambda;
        c.k_density = 40;
        const Embedding e = run_drsne(s.data, c);
        const double dc = evaluate(s.data.values, e.z, std::nullopt, 40).density_correlation;
        if (dc > best_dc) {
            best_dc = dc;
            best_lambda = lambda;
            best = e.z;
        }
    }
    const auto& flags = *s.data.anomaly;
    const double rate = static_cast<double>(std::count(flags.begin(), flags.end(), true)) / static_cast<double>(flags.size());
    const double ap = auprc(knn_score(best, 40).scores, flags);
    return {ap >= 0.15, fmt("best DC %.4f at lambda=%g, knn AUPRC %.4f at anomaly rate %.3f (need >= 0.15)", best_dc,
                            best_lambda, ap, rate)};
}

// 8. Two identical embed invocations write identical bytes.
Outcome determinism() {
    testing::TempDir dir("acceptance");
    DataMatrix d = gen_spiral_plain(600, 1.5 * M_PI, 4.5 * M_PI, M_PI, 0.8, 0.15, 3).data;
    save_csv(d, dir.file("in.csv"), {"x", "y"});
    std::vector<std::string> paths;
    for (const char* name : {"a.csv", "b.csv"}) {
        std::ostringstream out, err;
        const int rc = cli::run({"embed", "-i", dir.file("in.csv"), "-o", dir.file(name), "--seed", "11",
                                 "--k-density", "40", "--lambda", "0.01", "--iterations", "400"},
                                out, err);
        if (rc != 0) return {false, "embed exited with " + std::to_string(rc) + ": " + err.str()};
        paths.push_back(dir.file(name));
    }
    const std::string a = testing::read_file(paths[0]);
    const std::string b = testing::read_file(paths[1]);
    return {!a.empty() && a == b, fmt("%zu and %zu bytes, %s", a.size(), b.size(), a == b ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"gradient correctness", gradients}, {"invariance suite", invariances}, {"oracle equivalence", oracles},
        {"spiral reproduction", spiral},     {"lambda trade-off", tradeoff},    {"complexity scaling", scaling},
        {"anomaly downstream", anomaly},     {"determinism", determinism}};
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.contains(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("criterion %d %s: %s [%s] (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
