#include "drsne/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <omp.h>

namespace drsne::kernels::omp {

namespace {
using index_t = long long;
}

void squared_distances(const Matrix& x, Matrix& out, int threads) {
    const std::size_t n = x.rows();
    out = Matrix(n, n, 0.0);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (index_t ii = 0; ii < static_cast<index_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) out(i, j) = squared_distance(x.row(i), x.row(j));
        }
    }
}

void knn_rows(const Matrix& x, std::size_t k, std::span<std::uint32_t> idx, std::span<double> dist, int threads) {
    const std::size_t n = x.rows();
#pragma omp parallel num_threads(threads)
    {
        std::vector<std::pair<double, std::uint32_t>> row(n - 1);
#pragma omp for schedule(dynamic, 16)
        for (index_t ii = 0; ii < static_cast<index_t>(n); ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            std::size_t c = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                row[c++] = {squared_distance(x.row(i), x.row(j)), static_cast<std::uint32_t>(j)};
            }
            std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end());
            for (std::size_t m = 0; m < k; ++m) {
                idx[i * k + m] = row[m].second;
                dist[i * k + m] = std::sqrt(row[m].first);
            }
        }
    }
}

namespace {

// Embeddings of dimension <= 3 are copied into three zero-padded coordinate columns
// so the inner loop is branch-free and vectorizes.
void repulsion_low_dim(const Matrix& z, std::span<double> row_sums, Matrix& rep, int threads) {
    const std::size_t n = z.rows();
    const std::size_t d = z.cols();
    std::vector<double> cols(3 * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t c = 0; c < d; ++c) cols[c * n + j] = z(j, c);
    }
    const double* x = cols.data();
    const double* y = x + n;
    const double* u = y + n;
#pragma omp parallel for schedule(static) num_threads(threads)
    for (index_t ii = 0; ii < static_cast<index_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double xi = x[i], yi = y[i], ui = u[i];
        double sum = 0.0, r0 = 0.0, r1 = 0.0, r2 = 0.0;
#pragma omp simd reduction(+ : sum, r0, r1, r2)
        for (std::size_t j = 0; j < n; ++j) {
            const double a = xi - x[j];
            const double b = yi - y[j];
            const double c = ui - u[j];
            const double w = 1.0 / (1.0 + a * a + b * b + c * c);
            sum += w;
            r0 += w * w * a;
            r1 += w * w * b;
            r2 += w * w * c;
        }
        // The j == i term adds w = 1 and no force.
        row_sums[i] = sum - 1.0;
        const double r[3] = {r0, r1, r2};
        for (std::size_t c = 0; c < d; ++c) rep(i, c) = r[c];
    }
}

void repulsion_generic(const Matrix& z, std::span<double> row_sums, Matrix& rep, int threads) {
    const std::size_t n = z.rows();
    const std::size_t d = z.cols();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (index_t ii = 0; ii < static_cast<index_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* zi = z.data() + i * d;
        double* ri = rep.data() + i * d;
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double* zj = z.data() + j * d;
            double d2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = zi[c] - zj[c];
                d2 += diff * diff;
            }
            const double w = 1.0 / (1.0 + d2);
            const double w2 = w * w;
            sum += w;
            for (std::size_t c = 0; c < d; ++c) ri[c] += w2 * (zi[c] - zj[c]);
        }
        row_sums[i] = sum;
    }
}

}  // namespace

void student_t_repulsion(const Matrix& z, std::span<double> row_sums, Matrix& rep, int threads) {
    rep = Matrix(z.rows(), z.cols(), 0.0);
    if (z.cols() <= 3) {
        repulsion_low_dim(z, row_sums, rep, threads);
    } else {
        repulsion_generic(z, row_sums, rep, threads);
    }
}

void sparse_attraction(const CsrView& p, const Matrix& z, Matrix& att, std::span<double> row_p_log_w, int threads) {
    const std::size_t n = z.rows();
    const std::size_t d = z.cols();
    att = Matrix(n, d, 0.0);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (index_t ii = 0; ii < static_cast<index_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* zi = z.data() + i * d;
        double* ai = att.data() + i * d;
        double plogw = 0.0;
        for (std::size_t e = p.offsets[i]; e < p.offsets[i + 1]; ++e) {
            const double* zj = z.data() + static_cast<std::size_t>(p.cols[e]) * d;
            double d2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = zi[c] - zj[c];
                d2 += diff * diff;
            }
            const double w = 1.0 / (1.0 + d2);
            const double pw = p.vals[e] * w;
            for (std::size_t c = 0; c < d; ++c) ai[c] += pw * (zi[c] - zj[c]);
            plogw -= p.vals[e] * std::log(1.0 + d2);
        }
        row_p_log_w[i] = plogw;
    }
}

void neighbor_distance_sums(const Matrix& z, const NeighborView& nb, std::span<double> sums, int threads) {
    const std::size_t n = z.rows();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (index_t ii = 0; ii < static_cast<index_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double s = 0.0;
        for (std::size_t m = 0; m < nb.k; ++m) {
            s += std::sqrt(squared_distance(z.row(i), z.row(nb.idx[i * nb.k + m])));
        }
        sums[i] = s;
    }
}

void density_gather(const Matrix& z, const NeighborView& nb, std::span<const double> coef, Matrix& grad, int threads) {
    const std::size_t n = z.rows();
    const std::size_t d = z.cols();
    grad = Matrix(n, d, 0.0);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (index_t ii = 0; ii < static_cast<index_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* zi = z.data() + i * d;
        double* gi = grad.data() + i * d;
        for (std::size_t m = 0; m < nb.k; ++m) {
            const double* zl = z.data() + static_cast<std::size_t>(nb.idx[i * nb.k + m]) * d;
            const double r = std::sqrt(squared_distance({zi, d}, {zl, d}));
            if (r <= 0.0) continue;
            const double s = coef[i] / r;
            for (std::size_t c = 0; c < d; ++c) gi[c] += s * (zi[c] - zl[c]);
        }
        for (std::size_t e = nb.rev_offsets[i]; e < nb.rev_offsets[i + 1]; ++e) {
            const std::size_t m = nb.rev_sources[e];
            const double* zm = z.data() + m * d;
            const double r = std::sqrt(squared_distance({zi, d}, {zm, d}));
            if (r <= 0.0) continue;
            const double s = coef[m] / r;
            for (std::size_t c = 0; c < d; ++c) gi[c] += s * (zi[c] - zm[c]);
        }
    }
}

}  // namespace drsne::kernels::omp
