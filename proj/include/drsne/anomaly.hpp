#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drsne/matrix.hpp"
#include "drsne/parallel.hpp"

namespace drsne {

enum class Detector { knn_dist, lof, iforest, centroid };

std::string_view to_string(Detector d);
/// Accepts knn, knn_dist, lof, iforest, if, centroid, cent.
Detector parse_detector(std::string_view name);

/// Anomaly scores, higher is more anomalous.
struct AnomalyScores {
    std::vector<double> scores;
    Detector detector = Detector::knn_dist;
    std::string params;  // compact "key=value,..." description
};

/// Sum of distances to the k nearest other points.
AnomalyScores knn_score(const Matrix& z, std::size_t k, const Exec& exec = {});

/// Local Outlier Factor with exactly-k neighborhoods.
AnomalyScores lof_score(const Matrix& z, std::size_t k, const Exec& exec = {});

struct IForestParams {
    std::size_t trees = 100;
    std::size_t subsample = 256;
    std::uint64_t seed = 0;
};

/// Isolation Forest. Tree t draws from its own stream seeded with seed + t.
AnomalyScores iforest_score(const Matrix& z, const IForestParams& params = {}, const Exec& exec = {});

/// Distance to the mean of z.
AnomalyScores centroid_score(const Matrix& z);

/// Average unsuccessful-search path length of a binary search tree on m points, as used
/// to normalize isolation depths: 0 for m <= 1, 1 for m == 2,
/// 2 (ln(m-1) + Euler gamma) - 2 (m-1)/m otherwise.
double average_path_length(std::size_t m);

/// Average precision with tied scores ranked as one block.
/// Throws InvalidArgument without at least one positive and one negative.
double auprc(std::span<const double> scores, const std::vector<bool>& is_anomaly);

}  // namespace drsne
