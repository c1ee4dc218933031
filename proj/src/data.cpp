#include "drsne/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <system_error>

#include <unistd.h>

#include "drsne/error.hpp"
#include "drsne/rng.hpp"

namespace drsne {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Generators

void SpiralConfig::validate() const {
    auto fail = [](const std::string& msg) { throw InvalidArgument("invalid spiral config: " + msg); };
    if (n < 10) fail("n must be >= 10");
    if (!(t_min >= 0.0) || !(t_max > t_min)) fail("need t_max > t_min >= 0");
    if (!(density_period > 0.0)) fail("density_period must be > 0");
    if (!(density_amplitude >= 0.0) || !std::isfinite(density_amplitude)) fail("density_amplitude must be >= 0");
    if (!(noise_std >= 0.0)) fail("noise_std must be >= 0");
    if (ambient_dim < 2) fail("ambient_dim must be >= 2");
    if (!(anomaly_percentile >= 0.0 && anomaly_percentile < 100.0)) fail("anomaly_percentile must be in [0, 100)");
}

double spiral_weight(double t, double amplitude, double period) {
    return std::max(0.05, 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * t / period));
}

namespace {

// Rejection sampling of t against w, then the noisy planar spiral.
SpiralSample sample_plane(std::size_t n, double t_min, double t_max, double period, double amplitude,
                          double noise_std, Rng& rng) {
    SpiralSample s;
    s.warnings = 1.0 - amplitude < 0.05 ? 1 : 0;  // the floor of w is active
    const double w_max = 1.0 + amplitude;
    s.t.reserve(n);
    s.weight.reserve(n);
    while (s.t.size() < n) {
        const double t = t_min + uniform01(rng) * (t_max - t_min);
        const double w = spiral_weight(t, amplitude, period);
        if (uniform01(rng) * w_max < w) {
            s.t.push_back(t);
            s.weight.push_back(w);
        }
    }
    NormalSampler normal;
    s.plane = Matrix(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        s.plane(i, 0) = s.t[i] * std::cos(s.t[i]) + noise_std * normal(rng);
        s.plane(i, 1) = s.t[i] * std::sin(s.t[i]) + noise_std * normal(rng);
    }
    return s;
}

}  // namespace

SpiralSample gen_density_spiral(const SpiralConfig& config) {
    config.validate();
    Rng rng(config.seed);
    SpiralSample s = sample_plane(config.n, config.t_min, config.t_max, config.density_period,
                                  config.density_amplitude, config.noise_std, rng);

    // ambient_dim x 2 Gaussian matrix, columns orthonormalized by Gram-Schmidt.
    NormalSampler normal;
    s.projection = Matrix(config.ambient_dim, 2);
    for (double& v : s.projection.values()) v = normal(rng);
    if (config.orthonormal_projection) {
        for (std::size_t c = 0; c < 2; ++c) {
            for (std::size_t prev = 0; prev < c; ++prev) {
                double dot = 0.0;
                for (std::size_t r = 0; r < config.ambient_dim; ++r) dot += s.projection(r, c) * s.projection(r, prev);
                for (std::size_t r = 0; r < config.ambient_dim; ++r) s.projection(r, c) -= dot * s.projection(r, prev);
            }
            double norm = 0.0;
            for (std::size_t r = 0; r < config.ambient_dim; ++r) norm += s.projection(r, c) * s.projection(r, c);
            norm = std::sqrt(norm);
            for (std::size_t r = 0; r < config.ambient_dim; ++r) s.projection(r, c) /= norm;
        }
    }

    DataMatrix raw;
    raw.values = Matrix(config.n, config.ambient_dim);
    for (std::size_t i = 0; i < config.n; ++i) {
        for (std::size_t r = 0; r < config.ambient_dim; ++r) {
            raw.values(i, r) = s.projection(r, 0) * s.plane(i, 0) + s.projection(r, 1) * s.plane(i, 1);
        }
    }
    s.data = standardize(raw);

    // Flag the ceil(n * pct / 100) lowest-weight samples, ties by index.
    const auto count = static_cast<std::size_t>(
        std::ceil(static_cast<double>(config.n) * config.anomaly_percentile / 100.0 - 1e-9));
    std::vector<std::size_t> order(config.n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.weight[a] < s.weight[b]; });
    std::vector<bool> flags(config.n, false);
    for (std::size_t m = 0; m < std::min(count, config.n); ++m) flags[order[m]] = true;
    s.data.anomaly = std::move(flags);
    return s;
}

SpiralSample gen_spiral_plain(std::size_t n, double t_min, double t_max, double density_period,
                              double density_amplitude, double noise_std, std::uint64_t seed) {
    SpiralConfig check;
    check.n = n;
    check.t_min = t_min;
    check.t_max = t_max;
    check.density_period = density_period;
    check.density_amplitude = density_amplitude;
    check.noise_std = noise_std;
    check.validate();
    Rng rng(seed);
    SpiralSample s = sample_plane(n, t_min, t_max, density_period, density_amplitude, noise_std, rng);
    s.data.values = s.plane;
    return s;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& cell, double& out) {
    const std::string t = trim(cell);
    if (t.empty()) return false;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, t.data() + t.size(), out);
    return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

std::size_t resolve_column(const std::string& spec, const std::vector<std::string>& header, std::size_t columns,
                           const std::string& what) {
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (trim(header[c]) == spec) return c;
    }
    std::size_t idx = 0;
    const auto res = std::from_chars(spec.data(), spec.data() + spec.size(), idx);
    if (res.ec == std::errc() && res.ptr == spec.data() + spec.size() && idx < columns) return idx;
    throw InvalidArgument(what + " column '" + spec + "' not found");
}

}  // namespace

CsvTable load_csv(const fs::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::vector<std::string> header;
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = options.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (header_pending) {
            header = std::move(cells);
            header_pending = false;
            continue;
        }
        rows.push_back(std::move(cells));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) throw IoError("'" + path.string() + "': no data rows");
    const std::size_t columns = rows.front().size();
    if (!header.empty() && header.size() != columns) {
        throw IoError("'" + path.string() + "': header has " + std::to_string(header.size()) + " fields, line " +
                      std::to_string(line_numbers.front()) + " has " + std::to_string(columns));
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != columns) {
            throw IoError("'" + path.string() + "': line " + std::to_string(line_numbers[r]) + " has " +
                          std::to_string(rows[r].size()) + " fields, expected " + std::to_string(columns));
        }
    }

    std::optional<std::size_t> label_col;
    std::optional<std::size_t> anomaly_col;
    if (options.label_column) label_col = resolve_column(*options.label_column, header, columns, "label");
    if (options.anomaly_column) anomaly_col = resolve_column(*options.anomaly_column, header, columns, "anomaly");
    if (label_col && anomaly_col && *label_col == *anomaly_col) {
        throw InvalidArgument("label and anomaly columns must differ");
    }

    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < columns; ++c) {
        if (c != label_col && c != anomaly_col) feature_cols.push_back(c);
    }
    if (feature_cols.empty()) throw IoError("'" + path.string() + "': no feature columns");

    CsvTable table;
    for (const auto c : feature_cols) {
        table.feature_names.push_back(header.empty() ? "x" + std::to_string(c) : trim(header[c]));
    }
    table.data.values = Matrix(rows.size(), feature_cols.size());
    if (label_col) table.data.labels.emplace(rows.size());
    if (anomaly_col) table.data.anomaly.emplace(rows.size());
    auto bad = [&](std::size_t r, std::size_t c, const std::string& kind) {
        return IoError("'" + path.string() + "': line " + std::to_string(line_numbers[r]) + ", column " +
                       std::to_string(c) + ": " + kind + " '" + rows[r][c] + "'");
    };
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t f = 0; f < feature_cols.size(); ++f) {
            double v = 0.0;
            if (!parse_double(rows[r][feature_cols[f]], v)) throw bad(r, feature_cols[f], "non-numeric value");
            table.data.values(r, f) = v;
        }
        if (label_col) {
            double v = 0.0;
            if (!parse_double(rows[r][*label_col], v) || v != std::round(v)) throw bad(r, *label_col, "non-integer label");
            (*table.data.labels)[r] = static_cast<int>(v);
        }
        if (anomaly_col) {
            const std::string cell = trim(rows[r][*anomaly_col]);
            double v = 0.0;
            if (cell == "true" || cell == "True") {
                (*table.data.anomaly)[r] = true;
            } else if (cell == "false" || cell == "False") {
                (*table.data.anomaly)[r] = false;
            } else if (parse_double(cell, v) && (v == 0.0 || v == 1.0)) {
                (*table.data.anomaly)[r] = v == 1.0;
            } else {
                throw bad(r, *anomaly_col, "anomaly flag must be 0/1/true/false, got");
            }
        }
    }
    return table;
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out << contents;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

void save_csv(const DataMatrix& data, const fs::path& path, const std::vector<std::string>& feature_names) {
    std::ostringstream os;
    for (std::size_t c = 0; c < data.dim(); ++c) {
        if (c) os << ',';
        os << (c < feature_names.size() ? feature_names[c] : "x" + std::to_string(c));
    }
    if (data.labels) os << ",label";
    if (data.anomaly) os << ",anomaly";
    os << '\n';
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t c = 0; c < data.dim(); ++c) {
            if (c) os << ',';
            os << format_double(data.values(i, c));
        }
        if (data.labels) os << ',' << (*data.labels)[i];
        if (data.anomaly) os << ',' << ((*data.anomaly)[i] ? 1 : 0);
        os << '\n';
    }
    write_file_atomic(path, os.str());
}

// ---------------------------------------------------------------------------
// Embedding persistence

fs::path provenance_path(const fs::path& csv) {
    fs::path p = csv;
    p.replace_extension(".provenance.json");
    return p;
}

fs::path loss_trace_path(const fs::path& csv) {
    fs::path p = csv;
    p.replace_extension(".loss.csv");
    return p;
}

nlohmann::json config_to_json(const OptimizerConfig& c) {
    return {
        {"lambda", c.lambda},
        {"k_kl", c.k_kl},
        {"k_density", c.k_density},
        {"perplexity", c.perplexity},
        {"iterations", c.iterations},
        {"warmup_iters", c.warmup_iters},
        {"exaggeration_factor", c.exaggeration_factor},
        {"learning_rate", c.learning_rate},
        {"adam_beta1", c.adam_beta1},
        {"adam_beta2", c.adam_beta2},
        {"adam_eps", c.adam_eps},
        {"clip_norm", c.clip_norm},
        {"init_std", c.init_std},
        {"seed", c.seed},
        {"dim", c.dim},
        {"dense_affinities", c.dense_affinities},
        {"density_recompute_every", c.density_recompute_every},
        {"density_eps", c.density_eps},
    };
}

std::string loss_trace_csv(const std::vector<LossRecord>& trace) {
    std::ostringstream os;
    os << "iteration,kl_loss,dens_loss,total,grad_norm\n";
    for (const auto& r : trace) {
        os << r.iteration << ',' << format_double(r.kl) << ',' << format_double(r.density) << ','
           << format_double(r.total) << ',' << format_double(r.grad_norm) << '\n';
    }
    return os.str();
}

void save_embedding(const Embedding& embedding, const fs::path& path, const nlohmann::json& extra) {
    std::ostringstream os;
    for (std::size_t c = 0; c < embedding.z.cols(); ++c) os << (c ? "," : "") << "dim" << c;
    os << '\n';
    for (std::size_t i = 0; i < embedding.z.rows(); ++i) {
        for (std::size_t c = 0; c < embedding.z.cols(); ++c) {
            os << (c ? "," : "") << format_double(embedding.z(i, c));
        }
        os << '\n';
    }

    nlohmann::ordered_json prov;
    prov["seed"] = embedding.config.seed;
    prov["rng"] = kRngName;
    prov["config"] = config_to_json(embedding.config);
    prov["n"] = embedding.z.rows();
    prov["iterations_run"] = embedding.iterations_run;
    prov["setup_seconds"] = embedding.setup_seconds;
    prov["optimize_seconds"] = embedding.optimize_seconds;
    prov["capped_calibration_rows"] = embedding.capped_calibration_rows;
    if (!embedding.trace.empty()) {
        const auto& first = embedding.trace.front();
        const auto& last = embedding.trace.back();
        prov["loss"] = {
            {"initial", {{"kl_loss", first.kl}, {"dens_loss", first.density}, {"total", first.total}}},
            {"final", {{"kl_loss", last.kl}, {"dens_loss", last.density}, {"total", last.total}}},
        };
    }
    for (const auto& [key, value] : extra.items()) prov[key] = value;

    // Write sidecars first so the primary CSV only appears once everything else exists.
    write_file_atomic(loss_trace_path(path), loss_trace_csv(embedding.trace));
    write_file_atomic(provenance_path(path), prov.dump(2) + "\n");
    write_file_atomic(path, os.str());
}

}  // namespace drsne
