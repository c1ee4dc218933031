#include "drsne/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "drsne/error.hpp"
#include "drsne/neighbors.hpp"

namespace drsne {

namespace {

using Ranked = std::vector<std::pair<double, std::uint32_t>>;

// (squared distance, index) to every other point, unsorted.
void distance_row(const Matrix& x, std::size_t i, Ranked& out) {
    out.clear();
    for (std::size_t j = 0; j < x.rows(); ++j) {
        if (j != i) out.emplace_back(squared_distance(x.row(i), x.row(j)), static_cast<std::uint32_t>(j));
    }
}

}  // namespace

double trustworthiness(const Matrix& high, const Matrix& z, std::size_t k, const Exec& exec) {
    const std::size_t n = high.rows();
    if (z.rows() != n) throw InvalidArgument("trustworthiness: point sets differ in size");
    if (k < 1 || 2 * k >= n) {
        throw InvalidArgument("trustworthiness needs 1 <= k < n / 2, got k = " + std::to_string(k) +
                              " for n = " + std::to_string(n));
    }
    std::vector<double> penalty(n, 0.0);
    parallel_for(exec, n, [&](std::size_t i) {
        Ranked row;
        row.reserve(n - 1);
        distance_row(high, i, row);
        std::sort(row.begin(), row.end());
        std::vector<std::size_t> rank(n, 0);
        for (std::size_t r = 0; r < row.size(); ++r) rank[row[r].second] = r + 1;

        distance_row(z, i, row);
        std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end());
        double s = 0.0;
        for (std::size_t m = 0; m < k; ++m) {
            const std::size_t r = rank[row[m].second];
            if (r > k) s += static_cast<double>(r - k);
        }
        penalty[i] = s;
    });
    const double total = std::accumulate(penalty.begin(), penalty.end(), 0.0);
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    return 1.0 - 2.0 / (nn * kk * (2.0 * nn - 3.0 * kk - 1.0)) * total;
}

double continuity(const Matrix& high, const Matrix& z, std::size_t k, const Exec& exec) {
    return trustworthiness(z, high, k, exec);
}

double silhouette(const Matrix& z, std::span<const int> labels, const Exec& exec) {
    const std::size_t n = z.rows();
    if (labels.size() != n) throw InvalidArgument("silhouette: label count does not match point count");
    std::map<int, std::size_t> cluster_of;
    for (const int l : labels) cluster_of.emplace(l, 0);
    if (cluster_of.size() < 2) throw InvalidArgument("silhouette needs at least 2 distinct labels");
    std::size_t next = 0;
    for (auto& [label, id] : cluster_of) id = next++;
    const std::size_t clusters = cluster_of.size();
    std::vector<std::size_t> cid(n);
    std::vector<std::size_t> size(clusters, 0);
    for (std::size_t i = 0; i < n; ++i) {
        cid[i] = cluster_of.at(labels[i]);
        ++size[cid[i]];
    }

    std::vector<double> s(n, 0.0);
    parallel_for(exec, n, [&](std::size_t i) {
        if (size[cid[i]] <= 1) return;
        std::vector<double> sums(clusters, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sums[cid[j]] += std::sqrt(squared_distance(z.row(i), z.row(j)));
        }
        const double a = sums[cid[i]] / static_cast<double>(size[cid[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < clusters; ++c) {
            if (c != cid[i]) b = std::min(b, sums[c] / static_cast<double>(size[c]));
        }
        const double denom = std::max(a, b);
        s[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    });
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);
}

double stress(const Matrix& high, const Matrix& z, const Exec& exec) {
    const std::size_t n = high.rows();
    if (z.rows() != n) throw InvalidArgument("stress: point sets differ in size");
    if (n < 2) throw InvalidArgument("stress needs at least 2 points");
    std::vector<double> num(n, 0.0);
    std::vector<double> den(n, 0.0);
    parallel_for(exec, n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = std::sqrt(squared_distance(high.row(i), high.row(j)));
            const double dz = std::sqrt(squared_distance(z.row(i), z.row(j)));
            num[i] += (dx - dz) * (dx - dz);
            den[i] += dx * dx;
        }
    });
    const double denominator = std::accumulate(den.begin(), den.end(), 0.0);
    if (denominator <= 0.0) throw InvalidArgument("stress undefined: all original points coincide");
    return std::sqrt(std::accumulate(num.begin(), num.end(), 0.0) / denominator);
}

std::string MetricReport::to_json() const {
    nlohmann::ordered_json j;
    j["trustworthiness"] = trustworthiness;
    j["continuity"] = continuity;
    if (silhouette) j["silhouette"] = *silhouette;
    j["stress"] = stress;
    j["density_correlation"] = density_correlation;
    j["k_eval"] = k_eval;
    return j.dump(2);
}

MetricReport evaluate(const Matrix& high, const Matrix& z, const std::optional<std::vector<int>>& labels,
                      std::size_t k_eval, CorrelationKind kind, const Exec& exec) {
    if (high.rows() != z.rows()) {
        throw InvalidArgument("row count mismatch: data has " + std::to_string(high.rows()) + " rows, embedding has " +
                              std::to_string(z.rows()));
    }
    MetricReport r;
    r.k_eval = k_eval;
    r.trustworthiness = trustworthiness(high, z, k_eval, exec);
    r.continuity = continuity(high, z, k_eval, exec);
    if (labels) r.silhouette = silhouette(z, *labels, exec);
    r.stress = stress(high, z, exec);
    const DensityEstimate dh = knn_density(knn(high, k_eval, exec));
    const DensityEstimate dz = knn_density(knn(z, k_eval, exec));
    r.density_correlation = density_correlation(dh, dz, kind);
    return r;
}

}  // namespace drsne
