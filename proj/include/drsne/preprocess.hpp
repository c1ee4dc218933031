#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "drsne/matrix.hpp"

namespace drsne {

/// Pipeline input: n points in D dimensions with optional class labels and anomaly flags.
struct DataMatrix {
    Matrix values;
    std::optional<std::vector<int>> labels;
    std::optional<std::vector<bool>> anomaly;

    std::size_t n() const noexcept { return values.rows(); }
    std::size_t dim() const noexcept { return values.cols(); }

    /// Throws InvalidArgument if n < 2, D < 1, an entry is non-finite, or the
    /// label/anomaly vectors have the wrong length.
    void validate() const;
};

/// Principal axes of a centered data set.
struct PcaModel {
    std::vector<double> mean;                 // D
    Matrix components;                        // D x m, orthonormal columns
    std::vector<double> explained_variance;   // m, descending, population variance

    std::size_t input_dim() const noexcept { return components.rows(); }
    std::size_t output_dim() const noexcept { return components.cols(); }
};

/// Column-wise z-scoring with the population standard deviation. Constant columns are
/// centered and left at zero.
DataMatrix standardize(const DataMatrix& data);

/// Top-m principal directions. Uses the D x D covariance eigendecomposition when
/// D <= n and a thin SVD of the centered matrix otherwise. Each component is signed so
/// its largest-magnitude entry is positive.
PcaModel pca_fit(const DataMatrix& data, std::size_t m);

/// (values - mean) * components. Labels and flags are carried over.
DataMatrix pca_transform(const PcaModel& model, const DataMatrix& data);

/// Back-projection: scores * components^T + mean.
Matrix pca_inverse_transform(const PcaModel& model, const Matrix& scores);

}  // namespace drsne
