#include "drsne/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "drsne/error.hpp"
#include "drsne/neighbors.hpp"
#include "drsne/rng.hpp"

namespace drsne {

std::string_view to_string(Detector d) {
    switch (d) {
        case Detector::knn_dist: return "knn";
        case Detector::lof: return "lof";
        case Detector::iforest: return "iforest";
        case Detector::centroid: return "centroid";
    }
    return "unknown";
}

Detector parse_detector(std::string_view name) {
    if (name == "knn" || name == "knn_dist") return Detector::knn_dist;
    if (name == "lof") return Detector::lof;
    if (name == "iforest" || name == "if") return Detector::iforest;
    if (name == "centroid" || name == "cent") return Detector::centroid;
    throw InvalidArgument("unknown detector '" + std::string(name) + "'");
}

AnomalyScores knn_score(const Matrix& z, std::size_t k, const Exec& exec) {
    const NeighborGraph g = knn(z, k, exec);
    AnomalyScores out{std::vector<double>(g.n, 0.0), Detector::knn_dist, "k=" + std::to_string(k)};
    for (std::size_t i = 0; i < g.n; ++i) {
        for (const double d : g.distances(i)) out.scores[i] += d;
    }
    return out;
}

AnomalyScores lof_score(const Matrix& z, std::size_t k, const Exec& exec) {
    constexpr double kGuard = 1e-12;
    const NeighborGraph g = knn(z, k, exec);
    const std::size_t n = g.n;
    std::vector<double> lrd(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto nb = g.neighbors(i);
        const auto dist = g.distances(i);
        double reach = 0.0;
        for (std::size_t m = 0; m < k; ++m) {
            const double k_distance = g.distances(nb[m])[k - 1];
            reach += std::max(k_distance, dist[m]);
        }
        lrd[i] = 1.0 / (reach / static_cast<double>(k) + kGuard);
    }
    AnomalyScores out{std::vector<double>(n, 0.0), Detector::lof, "k=" + std::to_string(k)};
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto j : g.neighbors(i)) s += lrd[j];
        out.scores[i] = s / static_cast<double>(k) / lrd[i];
    }
    return out;
}

namespace {

struct IsolationTree {
    struct Node {
        int feature = -1;       // -1 marks a leaf
        double split = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        std::size_t size = 0;   // points reaching a leaf
    };
    std::vector<Node> nodes;

    std::size_t build(const Matrix& x, std::vector<std::size_t>& rows, std::size_t begin, std::size_t end,
                      std::size_t depth, std::size_t height_limit, Rng& rng) {
        const std::size_t id = nodes.size();
        nodes.push_back({});
        const std::size_t count = end - begin;
        if (depth >= height_limit || count <= 1) {
            nodes[id].size = count;
            return id;
        }
        // Only features that still vary in this node can separate points.
        std::vector<std::pair<std::size_t, std::pair<double, double>>> candidates;
        for (std::size_t f = 0; f < x.cols(); ++f) {
            double lo = x(rows[begin], f);
            double hi = lo;
            for (std::size_t r = begin + 1; r < end; ++r) {
                lo = std::min(lo, x(rows[r], f));
                hi = std::max(hi, x(rows[r], f));
            }
            if (hi > lo) candidates.push_back({f, {lo, hi}});
        }
        if (candidates.empty()) {
            nodes[id].size = count;
            return id;
        }
        const auto& [feature, range] = candidates[uniform_index(rng, candidates.size())];
        const double split = range.first + uniform01(rng) * (range.second - range.first);
        const auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                        rows.begin() + static_cast<std::ptrdiff_t>(end),
                                        [&](std::size_t r) { return x(r, feature) < split; });
        const auto middle = static_cast<std::size_t>(mid - rows.begin());
        nodes[id].feature = static_cast<int>(feature);
        nodes[id].split = split;
        const std::size_t left = build(x, rows, begin, middle, depth + 1, height_limit, rng);
        const std::size_t right = build(x, rows, middle, end, depth + 1, height_limit, rng);
        nodes[id].left = left;
        nodes[id].right = right;
        return id;
    }

    double path_length(std::span<const double> point) const {
        std::size_t id = 0;
        double depth = 0.0;
        while (nodes[id].feature >= 0) {
            id = point[static_cast<std::size_t>(nodes[id].feature)] < nodes[id].split ? nodes[id].left : nodes[id].right;
            depth += 1.0;
        }
        return depth + average_path_length(nodes[id].size);
    }
};

}  // namespace

double average_path_length(std::size_t m) {
    constexpr double kEulerGamma = 0.57721566490153286061;
    if (m <= 1) return 0.0;
    if (m == 2) return 1.0;
    const double md = static_cast<double>(m);
    return 2.0 * (std::log(md - 1.0) + kEulerGamma) - 2.0 * (md - 1.0) / md;
}

AnomalyScores iforest_score(const Matrix& z, const IForestParams& params, const Exec& exec) {
    const std::size_t n = z.rows();
    if (n < 2) throw InvalidArgument("isolation forest needs at least 2 points");
    if (params.trees < 1 || params.subsample < 2) throw InvalidArgument("isolation forest needs trees >= 1 and subsample >= 2");
    const std::size_t psi = std::min(params.subsample, n);
    const auto height_limit = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(psi))));

    std::vector<std::vector<double>> depth(params.trees);
    parallel_for(exec, params.trees, [&](std::size_t t) {
        Rng rng(params.seed + t);
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t s = 0; s < psi; ++s) {
            const std::size_t pick = s + uniform_index(rng, n - s);
            std::swap(pool[s], pool[pick]);
        }
        pool.resize(psi);
        IsolationTree tree;
        tree.build(z, pool, 0, psi, 0, height_limit, rng);
        depth[t].resize(n);
        for (std::size_t i = 0; i < n; ++i) depth[t][i] = tree.path_length(z.row(i));
    });

    AnomalyScores out{std::vector<double>(n, 0.0), Detector::iforest,
                      "trees=" + std::to_string(params.trees) + ",subsample=" + std::to_string(params.subsample) +
                          ",seed=" + std::to_string(params.seed)};
    const double norm = average_path_length(psi);
    for (std::size_t i = 0; i < n; ++i) {
        double mean = 0.0;
        for (std::size_t t = 0; t < params.trees; ++t) mean += depth[t][i];
        mean /= static_cast<double>(params.trees);
        out.scores[i] = std::exp2(-mean / norm);
    }
    return out;
}

AnomalyScores centroid_score(const Matrix& z) {
    const std::size_t n = z.rows();
    if (n < 1) throw InvalidArgument("centroid score needs at least 1 point");
    std::vector<double> mean(z.cols(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < z.cols(); ++c) mean[c] += z(i, c);
    }
    for (double& m : mean) m /= static_cast<double>(n);
    AnomalyScores out{std::vector<double>(n), Detector::centroid, ""};
    for (std::size_t i = 0; i < n; ++i) out.scores[i] = std::sqrt(squared_distance(z.row(i), mean));
    return out;
}

double auprc(std::span<const double> scores, const std::vector<bool>& is_anomaly) {
    const std::size_t n = scores.size();
    if (is_anomaly.size() != n) throw InvalidArgument("auprc: score and flag counts differ");
    const auto positives = static_cast<std::size_t>(std::count(is_anomaly.begin(), is_anomaly.end(), true));
    if (positives == 0 || positives == n) throw InvalidArgument("auprc needs at least one positive and one negative");
    for (const double s : scores) {
        if (!std::isfinite(s)) throw InvalidArgument("auprc: non-finite score");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double ap = 0.0;
    std::size_t seen = 0;
    std::size_t hits = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        std::size_t block_hits = 0;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            if (is_anomaly[order[j]]) ++block_hits;
            ++j;
        }
        seen += j - i;
        hits += block_hits;
        if (block_hits > 0) {
            const double precision = static_cast<double>(hits) / static_cast<double>(seen);
            ap += precision * static_cast<double>(block_hits) / static_cast<double>(positives);
        }
        i = j;
    }
    return ap;
}

}  // namespace drsne
