#include "drsne/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace drsne::kernels::serial {

void squared_distances(const Matrix& x, Matrix& out) {
    const std::size_t n = x.rows();
    out = Matrix(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d2 = squared_distance(x.row(i), x.row(j));
            out(i, j) = d2;
            out(j, i) = d2;
        }
    }
}

void knn_rows(const Matrix& x, std::size_t k, std::span<std::uint32_t> idx, std::span<double> dist) {
    const std::size_t n = x.rows();
    std::vector<std::pair<double, std::uint32_t>> row(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
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

namespace {

// Coordinates and outputs are held column-wise so the updates of the partners j > i
// are contiguous and the inner loop vectorizes.
template <std::size_t D>
void repulsion_fixed(const Matrix& z, std::span<double> row_sums, Matrix& rep) {
    const std::size_t n = z.rows();
    std::vector<double> pos(D * n);
    std::vector<double> acc(D * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t c = 0; c < D; ++c) pos[c * n + j] = z(j, c);
    }
    double* sums = row_sums.data();
    for (std::size_t i = 0; i < n; ++i) {
        const double* x[D];
        double* r[D];
        double zi[D];
        double ri[D] = {};
        for (std::size_t c = 0; c < D; ++c) {
            x[c] = pos.data() + c * n;
            r[c] = acc.data() + c * n;
            zi[c] = x[c][i];
        }
        double sum = 0.0;
        if constexpr (D == 1) {
#pragma omp simd reduction(+ : sum, ri[:1])
            for (std::size_t j = i + 1; j < n; ++j) {
                const double a = zi[0] - x[0][j];
                const double w = 1.0 / (1.0 + a * a);
                sum += w;
                sums[j] += w;
                ri[0] += w * w * a;
                r[0][j] -= w * w * a;
            }
        } else if constexpr (D == 2) {
#pragma omp simd reduction(+ : sum, ri[:2])
            for (std::size_t j = i + 1; j < n; ++j) {
                const double a = zi[0] - x[0][j];
                const double b = zi[1] - x[1][j];
                const double w = 1.0 / (1.0 + a * a + b * b);
                const double w2 = w * w;
                sum += w;
                sums[j] += w;
                ri[0] += w2 * a;
                ri[1] += w2 * b;
                r[0][j] -= w2 * a;
                r[1][j] -= w2 * b;
            }
        } else {
#pragma omp simd reduction(+ : sum, ri[:3])
            for (std::size_t j = i + 1; j < n; ++j) {
                const double a = zi[0] - x[0][j];
                const double b = zi[1] - x[1][j];
                const double c = zi[2] - x[2][j];
                const double w = 1.0 / (1.0 + a * a + b * b + c * c);
                const double w2 = w * w;
                sum += w;
                sums[j] += w;
                ri[0] += w2 * a;
                ri[1] += w2 * b;
                ri[2] += w2 * c;
                r[0][j] -= w2 * a;
                r[1][j] -= w2 * b;
                r[2][j] -= w2 * c;
            }
        }
        sums[i] += sum;
        for (std::size_t c = 0; c < D; ++c) r[c][i] += ri[c];
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t c = 0; c < D; ++c) rep(j, c) = acc[c * n + j];
    }
}

void repulsion_generic(const Matrix& z, std::span<double> row_sums, Matrix& rep) {
    const std::size_t n = z.rows();
    const std::size_t d = z.cols();
    for (std::size_t i = 0; i < n; ++i) {
        const double* zi = z.data() + i * d;
        double* ri = rep.data() + i * d;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* zj = z.data() + j * d;
            double* rj = rep.data() + j * d;
            double d2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = zi[c] - zj[c];
                d2 += diff * diff;
            }
            const double w = 1.0 / (1.0 + d2);
            const double w2 = w * w;
            row_sums[i] += w;
            row_sums[j] += w;
            for (std::size_t c = 0; c < d; ++c) {
                const double f = w2 * (zi[c] - zj[c]);
                ri[c] += f;
                rj[c] -= f;
            }
        }
    }
}

}  // namespace

void student_t_repulsion(const Matrix& z, std::span<double> row_sums, Matrix& rep) {
    std::fill(row_sums.begin(), row_sums.end(), 0.0);
    rep = Matrix(z.rows(), z.cols(), 0.0);
    switch (z.cols()) {
        case 1: repulsion_fixed<1>(z, row_sums, rep); break;
        case 2: repulsion_fixed<2>(z, row_sums, rep); break;
        case 3: repulsion_fixed<3>(z, row_sums, rep); break;
        default: repulsion_generic(z, row_sums, rep);
    }
}

namespace {

// D == 0 reads the dimension at run time. Each stored pair (i, j) with j > i is visited
// once and applied to both rows, which relies on p being symmetric.
template <std::size_t D>
void attraction_upper(const CsrView& p, const Matrix& z, Matrix& att, std::span<double> row_p_log_w) {
    const std::size_t n = z.rows();
    const std::size_t d = D == 0 ? z.cols() : D;
    const double* zd = z.data();
    double* ad = att.data();
    for (std::size_t i = 0; i < n; ++i) {
        const double* zi = zd + i * d;
        const auto first = p.cols.begin() + static_cast<std::ptrdiff_t>(p.offsets[i]);
        const auto last = p.cols.begin() + static_cast<std::ptrdiff_t>(p.offsets[i + 1]);
        const auto start = static_cast<std::size_t>(std::upper_bound(first, last, static_cast<std::uint32_t>(i)) - p.cols.begin());
        for (std::size_t e = start; e < p.offsets[i + 1]; ++e) {
            const std::size_t j = p.cols[e];
            const double* zj = zd + j * d;
            double d2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = zi[c] - zj[c];
                d2 += diff * diff;
            }
            const double pw = p.vals[e] / (1.0 + d2);
            for (std::size_t c = 0; c < d; ++c) {
                const double f = pw * (zi[c] - zj[c]);
                ad[i * d + c] += f;
                ad[j * d + c] -= f;
            }
            const double plogw = p.vals[e] * std::log(1.0 + d2);
            row_p_log_w[i] -= plogw;
            row_p_log_w[j] -= plogw;
        }
    }
}

}  // namespace

void sparse_attraction(const CsrView& p, const Matrix& z, Matrix& att, std::span<double> row_p_log_w) {
    att = Matrix(z.rows(), z.cols(), 0.0);
    std::fill(row_p_log_w.begin(), row_p_log_w.end(), 0.0);
    switch (z.cols()) {
        case 1: attraction_upper<1>(p, z, att, row_p_log_w); break;
        case 2: attraction_upper<2>(p, z, att, row_p_log_w); break;
        case 3: attraction_upper<3>(p, z, att, row_p_log_w); break;
        default: attraction_upper<0>(p, z, att, row_p_log_w);
    }
}

void neighbor_distance_sums(const Matrix& z, const NeighborView& nb, std::span<double> sums) {
    const std::size_t n = z.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t m = 0; m < nb.k; ++m) {
            s += std::sqrt(squared_distance(z.row(i), z.row(nb.idx[i * nb.k + m])));
        }
        sums[i] = s;
    }
}

void density_gather(const Matrix& z, const NeighborView& nb, std::span<const double> coef, Matrix& grad) {
    const std::size_t n = z.rows();
    const std::size_t d = z.cols();
    grad = Matrix(n, d, 0.0);
    // Each forward edge (i, l) of S_i pushes +coef_i u_il to i and -coef_i u_il to l,
    // in edge order; the reverse lists are not needed.
    for (std::size_t i = 0; i < n; ++i) {
        const double* zi = z.data() + i * d;
        double* gi = grad.data() + i * d;
        for (std::size_t m = 0; m < nb.k; ++m) {
            const std::size_t l = nb.idx[i * nb.k + m];
            const double* zl = z.data() + l * d;
            double* gl = grad.data() + l * d;
            const double r = std::sqrt(squared_distance({zi, d}, {zl, d}));
            if (r <= 0.0) continue;
            const double s = coef[i] / r;
            for (std::size_t c = 0; c < d; ++c) {
                const double f = s * (zi[c] - zl[c]);
                gi[c] += f;
                gl[c] -= f;
            }
        }
    }
}

}  // namespace drsne::kernels::serial
