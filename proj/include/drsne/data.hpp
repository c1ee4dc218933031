#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "drsne/embed.hpp"
#include "drsne/preprocess.hpp"

namespace drsne {

/// Spiral (t cos t, t sin t) sampled along t with weight
/// w(t) = max(0.05, 1 + amplitude * sin(2 pi t / period)).
struct SpiralConfig {
    std::size_t n = 2000;
    double t_min = 1.5 * 3.141592653589793;
    double t_max = 4.5 * 3.141592653589793;
    double density_period = 3.141592653589793;
    double density_amplitude = 0.8;
    double noise_std = 0.15;
    std::size_t ambient_dim = 10;
    double anomaly_percentile = 5.0;
    bool orthonormal_projection = true;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Generator output that keeps the latent quantities for inspection.
struct SpiralSample {
    DataMatrix data;
    std::vector<double> t;        // sampled arc parameter per row
    std::vector<double> weight;   // w(t) per row
    Matrix plane;                 // noisy 2-D points before projection
    Matrix projection;            // ambient_dim x 2 (empty for the plain spiral)
    std::size_t warnings = 0;     // 1 when the 0.05 floor of w is active
};

double spiral_weight(double t, double amplitude, double period);

/// Density spiral: rejection-sample t against w, map to the plane, add Gaussian noise,
/// project with a seeded random ambient_dim x 2 matrix, standardize, and flag the
/// ceil(n * percentile / 100) points with the lowest w as anomalies.
SpiralSample gen_density_spiral(const SpiralConfig& config);

/// 2-D spiral with the same sampling, no projection, standardization or flags.
SpiralSample gen_spiral_plain(std::size_t n, double t_min, double t_max, double density_period,
                              double density_amplitude, double noise_std, std::uint64_t seed);

struct CsvOptions {
    bool has_header = true;
    std::optional<std::string> label_column;    // header name or 0-based index
    std::optional<std::string> anomaly_column;  // header name or 0-based index
};

struct CsvTable {
    DataMatrix data;
    std::vector<std::string> feature_names;
};

CsvTable load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes features (17 significant digits), then label and anomaly columns if present.
void save_csv(const DataMatrix& data, const std::filesystem::path& path,
              const std::vector<std::string>& feature_names = {});

/// Writes a file through a temporary sibling and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string format_double(double v);

/// Sidecar paths next to an embedding CSV.
std::filesystem::path provenance_path(const std::filesystem::path& csv);
std::filesystem::path loss_trace_path(const std::filesystem::path& csv);

nlohmann::json config_to_json(const OptimizerConfig& config);

/// Embedding CSV (header dim0..dim{d-1}), provenance JSON and loss-trace CSV.
/// extra is merged into the provenance object (e.g. attached metrics).
void save_embedding(const Embedding& embedding, const std::filesystem::path& path,
                    const nlohmann::json& extra = nlohmann::json::object());

std::string loss_trace_csv(const std::vector<LossRecord>& trace);

}  // namespace drsne
