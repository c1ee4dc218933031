#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drsne/density.hpp"
#include "drsne/matrix.hpp"
#include "drsne/parallel.hpp"

namespace drsne {

/// Venna-Kaski trustworthiness: penalizes embedding neighbors that are far in the
/// original space. Requires k < n / 2.
double trustworthiness(const Matrix& high, const Matrix& z, std::size_t k, const Exec& exec = {});

/// Continuity: trustworthiness with the two spaces swapped.
double continuity(const Matrix& high, const Matrix& z, std::size_t k, const Exec& exec = {});

/// Mean silhouette; singleton clusters contribute zero. Needs two distinct labels.
double silhouette(const Matrix& z, std::span<const int> labels, const Exec& exec = {});

/// sqrt(sum (dX - dZ)^2 / sum dX^2) over unordered pairs, raw distances.
double stress(const Matrix& high, const Matrix& z, const Exec& exec = {});

struct MetricReport {
    double trustworthiness = 0.0;
    double continuity = 0.0;
    std::optional<double> silhouette;
    double stress = 0.0;
    double density_correlation = 0.0;
    std::size_t k_eval = 0;

    std::string to_json() const;
};

/// All metrics; density correlation recomputes kNN densities at k_eval in both spaces.
MetricReport evaluate(const Matrix& high, const Matrix& z, const std::optional<std::vector<int>>& labels,
                      std::size_t k_eval, CorrelationKind kind = CorrelationKind::pearson,
                      const Exec& exec = {});

}  // namespace drsne
