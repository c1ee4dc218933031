#include "drsne/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "drsne/error.hpp"

namespace drsne {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> as_eigen(const Matrix& m) {
    return {m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

}  // namespace

void DataMatrix::validate() const {
    if (values.rows() < 2) throw InvalidArgument("data needs at least 2 rows, got " + std::to_string(values.rows()));
    if (values.cols() < 1) throw InvalidArgument("data needs at least 1 feature column");
    for (std::size_t i = 0; i < values.rows(); ++i) {
        for (std::size_t j = 0; j < values.cols(); ++j) {
            if (!std::isfinite(values(i, j))) {
                throw InvalidArgument("non-finite value at row " + std::to_string(i) + ", column " + std::to_string(j));
            }
        }
    }
    if (labels && labels->size() != values.rows()) {
        throw InvalidArgument("label count " + std::to_string(labels->size()) + " does not match row count " +
                              std::to_string(values.rows()));
    }
    if (anomaly && anomaly->size() != values.rows()) {
        throw InvalidArgument("anomaly flag count " + std::to_string(anomaly->size()) +
                              " does not match row count " + std::to_string(values.rows()));
    }
}

DataMatrix standardize(const DataMatrix& data) {
    data.validate();
    const std::size_t n = data.n();
    const std::size_t dim = data.dim();
    DataMatrix out = data;
    for (std::size_t j = 0; j < dim; ++j) {
        double mean = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += data.values(i, j);
            scale = std::max(scale, std::abs(data.values(i, j)));
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = data.values(i, j) - mean;
            var += c * c;
        }
        const double sd = std::sqrt(var / static_cast<double>(n));
        // Constant up to rounding: center only.
        const bool constant = sd <= 1e-14 * std::max(scale, 1e-300);
        for (std::size_t i = 0; i < n; ++i) {
            const double c = data.values(i, j) - mean;
            out.values(i, j) = constant ? 0.0 : c / sd;
        }
    }
    return out;
}

PcaModel pca_fit(const DataMatrix& data, std::size_t m) {
    data.validate();
    const std::size_t n = data.n();
    const std::size_t dim = data.dim();
    if (m == 0 || m > std::min(n, dim)) {
        throw InvalidArgument("PCA dimension " + std::to_string(m) + " must be in [1, min(n, D) = " +
                              std::to_string(std::min(n, dim)) + "]");
    }

    const auto x = as_eigen(data.values);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;

    Eigen::MatrixXd basis;      // D x m
    Eigen::VectorXd variances;  // m
    if (dim <= n) {
        const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        if (eig.info() != Eigen::Success) throw Error("covariance eigendecomposition failed");
        // Eigenvalues come out ascending.
        basis = eig.eigenvectors().rightCols(static_cast<Eigen::Index>(m)).rowwise().reverse();
        variances = eig.eigenvalues().tail(static_cast<Eigen::Index>(m)).reverse();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
        basis = svd.matrixV().leftCols(static_cast<Eigen::Index>(m));
        variances = svd.singularValues().head(static_cast<Eigen::Index>(m)).array().square() /
                    static_cast<double>(n);
    }

    PcaModel model;
    model.mean.assign(mean.data(), mean.data() + dim);
    model.components = Matrix(dim, m);
    model.explained_variance.resize(m);
    for (std::size_t c = 0; c < m; ++c) {
        Eigen::Index arg = 0;
        basis.col(static_cast<Eigen::Index>(c)).cwiseAbs().maxCoeff(&arg);
        const double sign = basis(arg, static_cast<Eigen::Index>(c)) < 0.0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < dim; ++r) {
            model.components(r, c) = sign * basis(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
        model.explained_variance[c] = std::max(0.0, variances(static_cast<Eigen::Index>(c)));
    }
    return model;
}

DataMatrix pca_transform(const PcaModel& model, const DataMatrix& data) {
    if (data.dim() != model.input_dim()) {
        throw InvalidArgument("PCA model expects " + std::to_string(model.input_dim()) + " columns, data has " +
                              std::to_string(data.dim()));
    }
    const std::size_t n = data.n();
    const std::size_t m = model.output_dim();
    DataMatrix out;
    out.labels = data.labels;
    out.anomaly = data.anomaly;
    out.values = Matrix(n, m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < model.input_dim(); ++r) {
            const double c = data.values(i, r) - model.mean[r];
            for (std::size_t k = 0; k < m; ++k) out.values(i, k) += c * model.components(r, k);
        }
    }
    return out;
}

Matrix pca_inverse_transform(const PcaModel& model, const Matrix& scores) {
    if (scores.cols() != model.output_dim()) {
        throw InvalidArgument("score matrix has " + std::to_string(scores.cols()) + " columns, model has " +
                              std::to_string(model.output_dim()) + " components");
    }
    Matrix out(scores.rows(), model.input_dim(), 0.0);
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        for (std::size_t r = 0; r < model.input_dim(); ++r) {
            double s = model.mean[r];
            for (std::size_t k = 0; k < model.output_dim(); ++k) s += scores(i, k) * model.components(r, k);
            out(i, r) = s;
        }
    }
    return out;
}

}  // namespace drsne
