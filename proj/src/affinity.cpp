#include "drsne/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "drsne/error.hpp"

namespace drsne {

namespace {

// Entropy in bits of p_m proportional to exp(-b x_m); x >= 0 with min 0.
double entropy_bits(std::span<const double> x, double b) {
    double sum = 0.0;
    double weighted = 0.0;
    for (const double xm : x) {
        const double e = std::exp(-b * xm);
        sum += e;
        weighted += xm * e;
    }
    return std::log2(sum) + b * weighted / (sum * std::numbers::ln2);
}

}  // namespace

std::size_t PerplexityCalibration::capped_rows() const {
    return static_cast<std::size_t>(std::count(hit_iteration_cap.begin(), hit_iteration_cap.end(), true));
}

PerplexityCalibration calibrate_betas(const NeighborGraph& graph, double perplexity,
                                      const CalibrationOptions& options) {
    if (!(perplexity > 1.0) || !std::isfinite(perplexity)) {
        throw InvalidArgument("perplexity must be a finite value > 1, got " + std::to_string(perplexity));
    }
    if (perplexity > static_cast<double>(graph.k)) {
        throw InvalidArgument("perplexity " + std::to_string(perplexity) + " exceeds the neighborhood size k = " +
                              std::to_string(graph.k));
    }
    const double target = std::log2(perplexity);
    PerplexityCalibration out;
    out.beta.resize(graph.n);
    out.achieved_perplexity.resize(graph.n);
    out.hit_iteration_cap.assign(graph.n, false);

    std::vector<double> x(graph.k);
    for (std::size_t i = 0; i < graph.n; ++i) {
        const auto dist = graph.distances(i);
        double d2_min = dist[0] * dist[0];
        double d2_max = d2_min;
        for (const double d : dist) {
            d2_min = std::min(d2_min, d * d);
            d2_max = std::max(d2_max, d * d);
        }
        if (d2_max == 0.0) {
            throw InvalidArgument("point " + std::to_string(i) +
                                  " has only zero neighbor distances (duplicate points); cannot calibrate perplexity");
        }
        // Search in units of the row's mean offset so the result is scale-equivariant.
        double scale = 0.0;
        for (std::size_t m = 0; m < graph.k; ++m) {
            x[m] = dist[m] * dist[m] - d2_min;
            scale += x[m];
        }
        scale /= static_cast<double>(graph.k);
        if (scale <= 0.0) scale = 1.0;
        for (double& v : x) v /= scale;

        double lo = options.beta_min;
        double hi = options.beta_max;
        bool lo_known = false;
        bool hi_known = false;
        double b = 1.0;
        double h = entropy_bits(x, b);
        int it = 0;
        while (std::abs(h - target) > options.entropy_tolerance_bits && it < options.max_iterations) {
            if (h > target) {
                lo = b;
                lo_known = true;
                b = hi_known ? 0.5 * (lo + hi) : std::min(2.0 * b, options.beta_max);
            } else {
                hi = b;
                hi_known = true;
                b = lo_known ? 0.5 * (lo + hi) : std::max(0.5 * b, options.beta_min);
            }
            h = entropy_bits(x, b);
            ++it;
        }
        out.hit_iteration_cap[i] = std::abs(h - target) > options.entropy_tolerance_bits;
        out.beta[i] = b / scale;
        out.achieved_perplexity[i] = std::exp2(h);
    }
    return out;
}

std::vector<double> conditional_row(const NeighborGraph& graph, const PerplexityCalibration& calibration,
                                    std::size_t i) {
    const auto dist = graph.distances(i);
    double d2_min = dist[0] * dist[0];
    for (const double d : dist) d2_min = std::min(d2_min, d * d);
    std::vector<double> p(graph.k);
    double sum = 0.0;
    for (std::size_t m = 0; m < graph.k; ++m) {
        p[m] = std::exp(-calibration.beta[i] * (dist[m] * dist[m] - d2_min));
        sum += p[m];
    }
    for (double& v : p) v /= sum;
    return p;
}

AffinityMatrix::AffinityMatrix(std::size_t n, std::vector<std::size_t> offsets, std::vector<std::uint32_t> cols,
                               std::vector<double> vals)
    : n_(n), offsets_(std::move(offsets)), cols_(std::move(cols)), vals_(std::move(vals)) {
    if (offsets_.size() != n_ + 1 || cols_.size() != vals_.size() || offsets_.back() != vals_.size()) {
        throw InvalidArgument("inconsistent CSR layout for affinity matrix");
    }
    summarize();
}

void AffinityMatrix::summarize() {
    mass_ = 0.0;
    p_log_p_ = 0.0;
    for (const double v : vals_) {
        mass_ += v;
        if (v > 0.0) p_log_p_ += v * std::log(v);
    }
}

double AffinityMatrix::at(std::size_t i, std::size_t j) const {
    const auto c = cols(i);
    const auto it = std::lower_bound(c.begin(), c.end(), static_cast<std::uint32_t>(j));
    if (it == c.end() || *it != j) return 0.0;
    return vals_[offsets_[i] + static_cast<std::size_t>(it - c.begin())];
}

AffinityMatrix AffinityMatrix::scaled(double factor) const {
    AffinityMatrix out = *this;
    for (double& v : out.vals_) v *= factor;
    out.summarize();
    return out;
}

AffinityMatrix joint_affinities(const NeighborGraph& graph, const PerplexityCalibration& calibration) {
    if (calibration.beta.size() != graph.n) {
        throw InvalidArgument("calibration has " + std::to_string(calibration.beta.size()) +
                              " rows, graph has " + std::to_string(graph.n));
    }
    const std::size_t n = graph.n;
    const double norm = 1.0 / (2.0 * static_cast<double>(n));
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> entries;
    entries.reserve(2 * n * graph.k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = conditional_row(graph, calibration, i);
        const auto nb = graph.neighbors(i);
        for (std::size_t m = 0; m < graph.k; ++m) {
            const double v = p[m] * norm;
            entries.emplace_back(static_cast<std::uint32_t>(i), nb[m], v);
            entries.emplace_back(nb[m], static_cast<std::uint32_t>(i), v);
        }
    }
    // Sort by (row, col) only; within equal keys the insertion order is kept so the
    // merged sums do not depend on the sort implementation.
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });

    std::vector<std::size_t> offsets(n + 1, 0);
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (std::size_t e = 0; e < entries.size(); ++e) {
        const auto [r, c, v] = entries[e];
        if (!cols.empty() && e > 0 && std::get<0>(entries[e - 1]) == r && std::get<1>(entries[e - 1]) == c) {
            vals.back() += v;
            continue;
        }
        cols.push_back(c);
        vals.push_back(v);
        ++offsets[r + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
    return AffinityMatrix(n, std::move(offsets), std::move(cols), std::move(vals));
}

AffinityMatrix exaggerate(const AffinityMatrix& p, double factor) {
    if (!std::isfinite(factor)) throw InvalidArgument("exaggeration factor must be finite");
    return p.scaled(factor);
}

}  // namespace drsne
