#include "drsne/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "drsne/anomaly.hpp"
#include "drsne/data.hpp"
#include "drsne/error.hpp"
#include "drsne/rng.hpp"

namespace drsne::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::lambda: return "lambda";
        case SweepAxis::k_density: return "k_density";
        case SweepAxis::pca_dim: return "pca_dim";
        case SweepAxis::perplexity: return "perplexity";
    }
    return "?";
}

SweepAxis parse_axis(std::string_view name) {
    if (name == "lambda") return SweepAxis::lambda;
    if (name == "k_density" || name == "k-density") return SweepAxis::k_density;
    if (name == "pca_dim" || name == "pca-dim") return SweepAxis::pca_dim;
    if (name == "perplexity") return SweepAxis::perplexity;
    throw InvalidArgument("unknown sweep axis '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
    if (values.empty()) throw InvalidArgument("sweep needs at least one value");
    if (repeats < 1) throw InvalidArgument("sweep repeats must be >= 1");
    for (const double v : values) {
        if (!std::isfinite(v)) throw InvalidArgument("sweep values must be finite");
        const bool integral = axis == SweepAxis::k_density || axis == SweepAxis::pca_dim;
        if (integral && (v < 1.0 || v != std::floor(v))) {
            throw InvalidArgument(to_string(axis) + " values must be positive integers, got " + format_double(v));
        }
    }
    if (k_eval < 1) throw InvalidArgument("k_eval must be >= 1");
}

namespace {

DataMatrix embedding_input(const DataMatrix& reference, std::size_t pca_dim) {
    if (pca_dim == 0) return reference;
    if (pca_dim > reference.dim()) {
        throw InvalidArgument("pca dimension " + std::to_string(pca_dim) + " exceeds the " +
                              std::to_string(reference.dim()) + " input columns");
    }
    return pca_transform(pca_fit(reference, pca_dim), reference);
}

Stat stat_of(const std::vector<double>& xs) {
    Stat s;
    if (xs.empty()) return s;
    for (const double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (const double x : xs) var += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(var / static_cast<double>(xs.size()));
    return s;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

}  // namespace

std::vector<SweepRun> run_sweep(const DataMatrix& data, const SweepSpec& spec, const Exec& exec) {
    spec.validate();
    data.validate();
    const DataMatrix reference = spec.standardize ? standardize(data) : data;

    std::vector<SweepRun> runs;
    for (const double value : spec.values) {
        for (std::size_t r = 0; r < spec.repeats; ++r) {
            SweepRun run;
            run.axis_value = value;
            run.seed = spec.fixed.seed + r;
            const auto start = std::chrono::steady_clock::now();
            try {
                OptimizerConfig config = spec.fixed;
                config.seed = run.seed;
                std::size_t pca_dim = spec.pca_dim;
                switch (spec.axis) {
                    case SweepAxis::lambda: config.lambda = value; break;
                    case SweepAxis::k_density: config.k_density = static_cast<std::size_t>(value); break;
                    case SweepAxis::pca_dim: pca_dim = static_cast<std::size_t>(value); break;
                    case SweepAxis::perplexity: config.perplexity = value; break;
                }
                const DataMatrix input = embedding_input(reference, pca_dim);
                const Embedding e = run_drsne(input, config, exec);
                run.metrics = evaluate(reference.values, e.z, reference.labels, spec.k_eval, spec.correlation, exec);
            } catch (const std::exception& ex) {
                run.error = ex.what();
            }
            run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            runs.push_back(std::move(run));
        }
    }
    std::stable_sort(runs.begin(), runs.end(), [](const SweepRun& a, const SweepRun& b) {
        return a.axis_value != b.axis_value ? a.axis_value < b.axis_value : a.seed < b.seed;
    });
    return runs;
}

std::vector<SweepSummary> summarize_sweep(const std::vector<SweepRun>& runs) {
    std::vector<SweepSummary> out;
    std::size_t i = 0;
    while (i < runs.size()) {
        std::size_t j = i;
        std::vector<double> tw, co, dc, st, sil, wall;
        SweepSummary s;
        s.axis_value = runs[i].axis_value;
        for (; j < runs.size() && runs[j].axis_value == s.axis_value; ++j) {
            ++s.runs;
            if (!runs[j].metrics) {
                ++s.failures;
                continue;
            }
            const MetricReport& m = *runs[j].metrics;
            tw.push_back(m.trustworthiness);
            co.push_back(m.continuity);
            dc.push_back(m.density_correlation);
            st.push_back(m.stress);
            if (m.silhouette) sil.push_back(*m.silhouette);
            wall.push_back(runs[j].wall_seconds);
        }
        s.trustworthiness = stat_of(tw);
        s.continuity = stat_of(co);
        s.density_correlation = stat_of(dc);
        s.stress = stat_of(st);
        s.wall_seconds = stat_of(wall);
        if (!sil.empty()) s.silhouette = stat_of(sil);
        out.push_back(s);
        i = j;
    }
    return out;
}

std::string sweep_detail_csv(const std::vector<SweepRun>& runs) {
    std::ostringstream os;
    os << "axis_value,seed,tw,continuity,dc,silhouette,stress,wall_seconds,status,error\n";
    for (const auto& r : runs) {
        os << format_double(r.axis_value) << ',' << r.seed << ',';
        if (r.metrics) {
            const MetricReport& m = *r.metrics;
            os << format_double(m.trustworthiness) << ',' << format_double(m.continuity) << ','
               << format_double(m.density_correlation) << ',' << (m.silhouette ? format_double(*m.silhouette) : "")
               << ',' << format_double(m.stress);
        } else {
            os << ",,,,";
        }
        os << ',' << format_double(r.wall_seconds) << ',' << (r.metrics ? "ok" : "failed") << ','
           << csv_quote(r.error) << '\n';
    }
    return os.str();
}

std::string sweep_summary_csv(const std::vector<SweepSummary>& rows) {
    std::ostringstream os;
    os << "axis_value,runs,failures,tw_mean,tw_std,continuity_mean,continuity_std,dc_mean,dc_std,"
          "silhouette_mean,silhouette_std,stress_mean,stress_std,wall_seconds_mean,wall_seconds_std\n";
    auto put = [&os](const Stat& s) { os << ',' << format_double(s.mean) << ',' << format_double(s.std); };
    for (const auto& r : rows) {
        os << format_double(r.axis_value) << ',' << r.runs << ',' << r.failures;
        if (r.failures == r.runs) {
            os << std::string(12, ',') << '\n';
            continue;
        }
        put(r.trustworthiness);
        put(r.continuity);
        put(r.density_correlation);
        if (r.silhouette) {
            put(*r.silhouette);
        } else {
            os << ",,";
        }
        put(r.stress);
        put(r.wall_seconds);
        os << '\n';
    }
    return os.str();
}

namespace {

struct InputFlags {
    std::string path;
    bool no_header = false;
    std::string label_column;
    std::string anomaly_column;

    CsvOptions options() const {
        CsvOptions o;
        o.has_header = !no_header;
        if (!label_column.empty()) o.label_column = label_column;
        if (!anomaly_column.empty()) o.anomaly_column = anomaly_column;
        return o;
    }
};

void add_input_flags(CLI::App* cmd, InputFlags& in, const std::string& what) {
    cmd->add_option("-i,--input", in.path, what)->required();
    cmd->add_flag("--no-header", in.no_header, "First line is data, not column names");
    cmd->add_option("--label-column", in.label_column, "Column holding integer class labels (name or 0-based index)");
    cmd->add_option("--anomaly-column", in.anomaly_column, "Column holding 0/1 anomaly flags (name or 0-based index)");
}

void add_optimizer_flags(CLI::App* cmd, OptimizerConfig& c) {
    cmd->add_option("--lambda", c.lambda, "Density weight")->capture_default_str();
    cmd->add_option("--k-kl", c.k_kl, "Neighbors for the KL term (0: round(3 * perplexity))")->capture_default_str();
    cmd->add_option("--k-density", c.k_density, "Neighbors for the density term")->capture_default_str();
    cmd->add_option("--perplexity", c.perplexity)->capture_default_str();
    cmd->add_option("--iterations", c.iterations)->capture_default_str();
    cmd->add_option("--warmup", c.warmup_iters, "Iterations with exaggerated affinities")->capture_default_str();
    cmd->add_option("--exaggeration", c.exaggeration_factor)->capture_default_str();
    cmd->add_option("--learning-rate", c.learning_rate)->capture_default_str();
    cmd->add_option("--adam-beta1", c.adam_beta1)->capture_default_str();
    cmd->add_option("--adam-beta2", c.adam_beta2)->capture_default_str();
    cmd->add_option("--adam-eps", c.adam_eps)->capture_default_str();
    cmd->add_option("--clip-norm", c.clip_norm)->capture_default_str();
    cmd->add_option("--init-std", c.init_std)->capture_default_str();
    cmd->add_option("--seed", c.seed)->capture_default_str();
    cmd->add_option("--dim", c.dim, "Embedding dimension")->capture_default_str();
    cmd->add_flag("--dense-affinities", c.dense_affinities, "Calibrate over all n - 1 points");
    cmd->add_option("--density-recompute-every", c.density_recompute_every,
                    "Rebuild density neighbor sets in the embedding every T iterations (0: never)")
        ->capture_default_str();
    cmd->add_option("--density-eps", c.density_eps)->capture_default_str();
    cmd->add_flag("--allow-k-cap", c.allow_k_cap, "Clamp k-density to n - 1 instead of failing");
}

CorrelationKind parse_correlation(const std::string& s) {
    if (s == "pearson") return CorrelationKind::pearson;
    if (s == "spearman") return CorrelationKind::spearman;
    throw InvalidArgument("correlation must be pearson or spearman");
}

std::string sibling(const fs::path& path, const std::string& suffix) {
    fs::path p = path;
    p.replace_extension(suffix);
    return p.string();
}

// --- generate -------------------------------------------------------------

struct GenerateArgs {
    std::string kind;
    SpiralConfig spiral;
    bool raw_projection = false;
    std::string output;
};

void cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
    SpiralConfig c = a.spiral;
    c.orthonormal_projection = !a.raw_projection;
    c.validate();
    const bool plain = a.kind == "spiral";
    const SpiralSample s = plain ? gen_spiral_plain(c.n, c.t_min, c.t_max, c.density_period, c.density_amplitude,
                                                    c.noise_std, c.seed)
                                 : gen_density_spiral(c);
    if (s.warnings > 0) {
        err << "warning: amplitude " << c.density_amplitude << " drives w(t) below 0.05; clipped to 0.05\n";
    }
    std::vector<std::string> names;
    if (plain) {
        names = {"x", "y"};
    } else {
        for (std::size_t j = 0; j < s.data.dim(); ++j) names.push_back("f" + std::to_string(j));
    }

    json prov;
    prov["generator"] = plain ? "spiral" : "density-spiral";
    prov["seed"] = c.seed;
    prov["rng"] = kRngName;
    prov["config"] = {{"n", c.n},
                      {"t_min", c.t_min},
                      {"t_max", c.t_max},
                      {"density_period", c.density_period},
                      {"density_amplitude", c.density_amplitude},
                      {"noise_std", c.noise_std}};
    if (!plain) {
        prov["config"]["ambient_dim"] = c.ambient_dim;
        prov["config"]["anomaly_percentile"] = c.anomaly_percentile;
        prov["config"]["orthonormal_projection"] = c.orthonormal_projection;
        prov["anomalies"] = std::count(s.data.anomaly->begin(), s.data.anomaly->end(), true);
    }
    prov["weight_clipped"] = s.warnings > 0;

    write_file_atomic(sibling(a.output, ".provenance.json"), prov.dump(2) + "\n");
    save_csv(s.data, a.output, names);
    out << "wrote " << s.data.n() << " rows to " << a.output << "\n";
}

// --- embed ----------------------------------------------------------------

struct EmbedArgs {
    InputFlags input;
    std::string output;
    bool no_standardize = false;
    std::size_t pca_dim = 0;
    std::size_t eval_k = 0;
    OptimizerConfig config;
};

void cmd_embed(const EmbedArgs& a, std::ostream& out, const Exec& exec) {
    const CsvTable table = load_csv(a.input.path, a.input.options());
    table.data.validate();
    const DataMatrix reference = a.no_standardize ? table.data : standardize(table.data);
    const DataMatrix input = embedding_input(reference, a.pca_dim);
    const Embedding e = run_drsne(input, a.config, exec);

    nlohmann::json extra;
    extra["input"] = a.input.path;
    extra["preprocessing"] = {{"standardize", !a.no_standardize}, {"pca_dim", a.pca_dim}};
    extra["threads"] = exec.threads;
    if (a.eval_k > 0) {
        const MetricReport m = evaluate(reference.values, e.z, reference.labels, a.eval_k, CorrelationKind::pearson, exec);
        extra["metrics"] = nlohmann::json::parse(m.to_json());
    }
    save_embedding(e, a.output, extra);
    std::ostringstream secs;
    secs.precision(3);
    secs << e.optimize_seconds;
    out << "wrote " << e.z.rows() << " x " << e.z.cols() << " embedding to " << a.output << " (" << e.iterations_run
        << " iterations, " << secs.str() << " s)\n";
}

// --- evaluate -------------------------------------------------------------

struct EvaluateArgs {
    InputFlags original;
    std::string embedding;
    std::size_t k_eval = 30;
    bool standardize = false;
    std::string correlation = "pearson";
    std::string output;
};

void cmd_evaluate(const EvaluateArgs& a, std::ostream& out, const Exec& exec) {
    const CsvTable orig = load_csv(a.original.path, a.original.options());
    const CsvTable emb = load_csv(a.embedding);
    if (orig.data.n() != emb.data.n()) {
        throw InvalidArgument("row count mismatch: '" + a.original.path + "' has " + std::to_string(orig.data.n()) +
                              " rows, '" + a.embedding + "' has " + std::to_string(emb.data.n()));
    }
    const DataMatrix high = a.standardize ? standardize(orig.data) : orig.data;
    const MetricReport m = evaluate(high.values, emb.data.values, high.labels, a.k_eval, parse_correlation(a.correlation), exec);
    const std::string report = m.to_json() + "\n";
    if (!a.output.empty()) write_file_atomic(a.output, report);
    out << report;
}

// --- sweep ----------------------------------------------------------------

struct SweepArgs {
    InputFlags input;
    std::string axis = "lambda";
    std::vector<double> values;
    std::size_t repeats = 1;
    bool no_standardize = false;
    std::size_t pca_dim = 0;
    std::size_t k_eval = 30;
    std::string correlation = "pearson";
    std::string output;
    std::string summary;
    OptimizerConfig config;
};

void cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err, const Exec& exec) {
    SweepSpec spec;
    spec.axis = parse_axis(a.axis);
    spec.values = a.values;
    spec.repeats = a.repeats;
    spec.fixed = a.config;
    spec.standardize = !a.no_standardize;
    spec.pca_dim = a.pca_dim;
    spec.k_eval = a.k_eval;
    spec.correlation = parse_correlation(a.correlation);
    spec.validate();

    const CsvTable table = load_csv(a.input.path, a.input.options());
    const auto runs = run_sweep(table.data, spec, exec);
    const auto summary = summarize_sweep(runs);
    const std::string summary_path = a.summary.empty() ? sibling(a.output, ".summary.csv") : a.summary;
    write_file_atomic(summary_path, sweep_summary_csv(summary));
    write_file_atomic(a.output, sweep_detail_csv(runs));

    std::size_t failed = 0;
    for (const auto& r : runs) {
        if (!r.metrics) {
            ++failed;
            err << "run " << to_string(spec.axis) << "=" << format_double(r.axis_value) << " seed=" << r.seed
                << " failed: " << r.error << "\n";
        }
    }
    out << "wrote " << runs.size() << " runs (" << failed << " failed) to " << a.output << " and " << summary_path
        << "\n";
}

// --- anomaly --------------------------------------------------------------

struct AnomalyArgs {
    std::string embedding;
    std::string data;
    std::string anomaly_column = "anomaly";
    std::vector<std::string> detectors{"knn", "lof", "iforest", "centroid"};
    std::size_t k = 20;
    std::size_t lof_k = 0;
    IForestParams forest;
    std::string output;
    std::string report;
};

void cmd_anomaly(const AnomalyArgs& a, std::ostream& out, const Exec& exec) {
    CsvOptions with_flags;
    with_flags.anomaly_column = a.anomaly_column;
    Matrix z;
    std::vector<bool> flags;
    if (a.data.empty()) {
        DataMatrix d = load_csv(a.embedding, with_flags).data;
        z = std::move(d.values);
        flags = std::move(*d.anomaly);
    } else {
        z = load_csv(a.embedding).data.values;
        flags = std::move(*load_csv(a.data, with_flags).data.anomaly);
    }
    if (flags.size() != z.rows()) {
        throw InvalidArgument("row count mismatch: embedding has " + std::to_string(z.rows()) + " rows, flags have " +
                              std::to_string(flags.size()));
    }

    std::vector<AnomalyScores> results;
    for (const auto& name : a.detectors) {
        switch (parse_detector(name)) {
            case Detector::knn_dist: results.push_back(knn_score(z, a.k, exec)); break;
            case Detector::lof: results.push_back(lof_score(z, a.lof_k == 0 ? a.k : a.lof_k, exec)); break;
            case Detector::iforest: results.push_back(iforest_score(z, a.forest, exec)); break;
            case Detector::centroid: results.push_back(centroid_score(z)); break;
        }
    }

    const auto positives = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
    json report;
    report["n"] = z.rows();
    report["anomalies"] = positives;
    report["anomaly_rate"] = static_cast<double>(positives) / static_cast<double>(z.rows());
    json per = json::object();
    for (const auto& r : results) {
        per[std::string(to_string(r.detector))] = {{"auprc", auprc(r.scores, flags)}, {"params", r.params}};
    }
    report["auprc"] = per;
    report["auprc_method"] = "average precision, step-wise, tied scores ranked as one block";

    std::ostringstream csv;
    csv << "index";
    for (const auto& r : results) csv << ',' << to_string(r.detector);
    csv << ",is_anomaly\n";
    for (std::size_t i = 0; i < z.rows(); ++i) {
        csv << i;
        for (const auto& r : results) csv << ',' << format_double(r.scores[i]);
        csv << ',' << (flags[i] ? 1 : 0) << '\n';
    }
    const std::string text = report.dump(2) + "\n";
    if (!a.report.empty()) write_file_atomic(a.report, text);
    write_file_atomic(a.output, csv.str());
    out << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Density-regularized SNE: embedding, evaluation and anomaly scoring"};
    app.name("drsne");
    app.require_subcommand(1);
    app.set_version_flag("--version", "drsne 0.1.0");

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write a synthetic spiral data set");
    g->add_option("kind", gen.kind, "spiral | density-spiral")->required()->check(CLI::IsMember({"spiral", "density-spiral"}));
    g->add_option("--n", gen.spiral.n)->capture_default_str();
    g->add_option("--t-min", gen.spiral.t_min)->capture_default_str();
    g->add_option("--t-max", gen.spiral.t_max)->capture_default_str();
    g->add_option("--period", gen.spiral.density_period, "Period of the density modulation in t")->capture_default_str();
    g->add_option("--amplitude", gen.spiral.density_amplitude, "Amplitude of the density modulation")->capture_default_str();
    g->add_option("--noise", gen.spiral.noise_std)->capture_default_str();
    g->add_option("--ambient-dim", gen.spiral.ambient_dim)->capture_default_str();
    g->add_option("--anomaly-percentile", gen.spiral.anomaly_percentile)->capture_default_str();
    g->add_flag("--raw-projection", gen.raw_projection, "Use the Gaussian projection without orthonormalizing");
    g->add_option("--seed", gen.spiral.seed)->capture_default_str();
    g->add_option("-o,--output", gen.output)->required();

    EmbedArgs emb;
    auto* e = app.add_subcommand("embed", "Embed a CSV data set");
    add_input_flags(e, emb.input, "Feature CSV");
    e->add_option("-o,--output", emb.output, "Embedding CSV; sidecars are written next to it")->required();
    e->add_flag("--no-standardize", emb.no_standardize, "Skip column standardization");
    e->add_option("--pca-dim", emb.pca_dim, "Project onto this many principal components (0: off)")->capture_default_str();
    e->add_option("--eval-k", emb.eval_k, "Attach metrics at this k to the provenance (0: off)")->capture_default_str();
    add_optimizer_flags(e, emb.config);

    EvaluateArgs ev;
    auto* v = app.add_subcommand("evaluate", "Score an embedding against its source data");
    add_input_flags(v, ev.original, "Original feature CSV");
    v->add_option("-e,--embedding", ev.embedding, "Embedding CSV")->required();
    v->add_option("--k-eval", ev.k_eval)->capture_default_str();
    v->add_flag("--standardize", ev.standardize, "Standardize the original columns first");
    v->add_option("--correlation", ev.correlation, "pearson | spearman")->capture_default_str();
    v->add_option("-o,--output", ev.output, "Also write the JSON report here");

    SweepArgs sw;
    auto* s = app.add_subcommand("sweep", "Embed and evaluate over a grid of one parameter");
    add_input_flags(s, sw.input, "Feature CSV");
    s->add_option("--axis", sw.axis, "lambda | k_density | pca_dim | perplexity")->capture_default_str();
    s->add_option("--values", sw.values, "Comma-separated axis values")->required()->delimiter(',');
    s->add_option("--repeats", sw.repeats, "Seeds per value")->capture_default_str();
    s->add_flag("--no-standardize", sw.no_standardize);
    s->add_option("--pca-dim", sw.pca_dim)->capture_default_str();
    s->add_option("--k-eval", sw.k_eval)->capture_default_str();
    s->add_option("--correlation", sw.correlation)->capture_default_str();
    s->add_option("-o,--output", sw.output, "Per-run CSV")->required();
    s->add_option("--summary", sw.summary, "Per-value summary CSV (default: <output>.summary.csv)");
    add_optimizer_flags(s, sw.config);

    AnomalyArgs an;
    auto* a = app.add_subcommand("anomaly", "Score points of an embedding and report AUPRC");
    a->add_option("-e,--embedding", an.embedding, "Embedding CSV")->required();
    a->add_option("--data", an.data, "CSV holding the anomaly column (default: the embedding file)");
    a->add_option("--anomaly-column", an.anomaly_column)->capture_default_str();
    a->add_option("--detectors", an.detectors, "knn, lof, iforest, centroid")->delimiter(',')->capture_default_str();
    a->add_option("--k", an.k, "Neighbors for knn and lof")->capture_default_str();
    a->add_option("--lof-k", an.lof_k, "Neighbors for lof (0: same as --k)");
    a->add_option("--trees", an.forest.trees)->capture_default_str();
    a->add_option("--subsample", an.forest.subsample)->capture_default_str();
    a->add_option("--seed", an.forest.seed)->capture_default_str();
    a->add_option("-o,--output", an.output, "Per-point score CSV")->required();
    a->add_option("--report", an.report, "Also write the JSON report here");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const Exec exec = Exec::from_env();
    try {
        if (g->parsed()) cmd_generate(gen, out, err);
        if (e->parsed()) cmd_embed(emb, out, exec);
        if (v->parsed()) cmd_evaluate(ev, out, exec);
        if (s->parsed()) cmd_sweep(sw, out, err, exec);
        if (a->parsed()) cmd_anomaly(an, out, exec);
    } catch (const InvalidArgument& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const NumericalError& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace drsne::cli
