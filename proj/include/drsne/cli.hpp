#pragma once

// Command-line front end. run() is the whole program minus process exit, so tests can
// drive it with an argument vector and capture both streams.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drsne/density.hpp"
#include "drsne/embed.hpp"
#include "drsne/metrics.hpp"
#include "drsne/parallel.hpp"
#include "drsne/preprocess.hpp"

namespace drsne::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

enum class SweepAxis { lambda, k_density, pca_dim, perplexity };

std::string to_string(SweepAxis axis);
SweepAxis parse_axis(std::string_view name);

struct SweepSpec {
    SweepAxis axis = SweepAxis::lambda;
    std::vector<double> values;
    std::size_t repeats = 1;       // run r uses seed fixed.seed + r
    OptimizerConfig fixed;
    bool standardize = true;
    std::size_t pca_dim = 0;       // 0 keeps every input column
    std::size_t k_eval = 30;
    CorrelationKind correlation = CorrelationKind::pearson;

    void validate() const;
};

struct SweepRun {
    double axis_value = 0.0;
    std::uint64_t seed = 0;
    std::optional<MetricReport> metrics;  // empty when the run failed
    std::string error;
    double wall_seconds = 0.0;
};

struct Stat {
    double mean = 0.0;
    double std = 0.0;   // population
};

struct SweepSummary {
    double axis_value = 0.0;
    std::size_t runs = 0;
    std::size_t failures = 0;
    Stat trustworthiness, continuity, density_correlation, stress, wall_seconds;
    std::optional<Stat> silhouette;
};

/// Embeds and evaluates every (value, repeat) pair. Metrics are taken against the
/// input after optional standardization and before PCA, so PCA settings share one
/// reference space. A failing run is recorded and the sweep continues. Rows are
/// ordered by (axis_value, seed).
std::vector<SweepRun> run_sweep(const DataMatrix& data, const SweepSpec& spec, const Exec& exec = {});

/// One summary per distinct axis value, over the successful runs.
std::vector<SweepSummary> summarize_sweep(const std::vector<SweepRun>& runs);

std::string sweep_detail_csv(const std::vector<SweepRun>& runs);
std::string sweep_summary_csv(const std::vector<SweepSummary>& rows);

/// Runs the program on args (without the program name). Returns the exit code:
/// 0 success, 2 usage or configuration error, 3 I/O or numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace drsne::cli
