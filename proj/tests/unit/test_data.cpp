#include <algorithm>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "drsne/data.hpp"
#include "drsne/density.hpp"
#include "drsne/error.hpp"
#include "test_support.hpp"

using namespace drsne;
using testing::TempDir;

namespace {

SpiralConfig small_spiral(std::uint64_t seed) {
    SpiralConfig c;
    c.n = 400;
    c.seed = seed;
    return c;
}

std::string message_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("spiral weight is clipped below at 0.05") {
    CHECK(spiral_weight(0.0, 0.5, 1.0) == doctest::Approx(1.0));
    CHECK(spiral_weight(0.25, 0.5, 1.0) == doctest::Approx(1.5));
    CHECK(spiral_weight(0.75, 2.0, 1.0) == 0.05);
}

TEST_CASE("density spiral is a pure function of its config") {
    const SpiralSample a = gen_density_spiral(small_spiral(7));
    const SpiralSample b = gen_density_spiral(small_spiral(7));
    CHECK(a.data.values == b.data.values);
    CHECK(a.data.anomaly == b.data.anomaly);
    CHECK(a.t == b.t);
    const SpiralSample c = gen_density_spiral(small_spiral(8));
    CHECK_FALSE(a.data.values == c.data.values);
    CHECK(a.data.n() == 400);
    CHECK(a.data.dim() == 10);
}

TEST_CASE("density spiral anomaly counts follow the percentile") {
    for (const double pct : {0.0, 1.0, 5.0, 12.5, 33.3}) {
        SpiralConfig c = small_spiral(3);
        c.anomaly_percentile = pct;
        const SpiralSample s = gen_density_spiral(c);
        const auto count = static_cast<double>(std::count(s.data.anomaly->begin(), s.data.anomaly->end(), true));
        CHECK(std::abs(count - std::ceil(400.0 * pct / 100.0)) <= 1.0);
        // Flagged points carry the lowest weights.
        double max_flagged = -1.0, min_clean = 1e9;
        for (std::size_t i = 0; i < 400; ++i) {
            if ((*s.data.anomaly)[i]) max_flagged = std::max(max_flagged, s.weight[i]);
            else min_clean = std::min(min_clean, s.weight[i]);
        }
        if (count > 0) CHECK(max_flagged <= min_clean);
    }
}

TEST_CASE("flat density flags exactly the requested count") {
    SpiralConfig c = small_spiral(4);
    c.density_amplitude = 0.0;
    c.anomaly_percentile = 5.0;
    const SpiralSample s = gen_density_spiral(c);
    CHECK(std::count(s.data.anomaly->begin(), s.data.anomaly->end(), true) == 20);
    for (const double w : s.weight) CHECK(w == 1.0);
    c.anomaly_percentile = 0.0;
    const SpiralSample none = gen_density_spiral(c);
    CHECK(std::count(none.data.anomaly->begin(), none.data.anomaly->end(), true) == 0);
}

TEST_CASE("noise-free spiral points lie at radius t") {
    SpiralConfig c = small_spiral(5);
    c.noise_std = 0.0;
    c.ambient_dim = 2;
    const SpiralSample s = gen_density_spiral(c);
    for (std::size_t i = 0; i < c.n; ++i) {
        const double r2 = s.plane(i, 0) * s.plane(i, 0) + s.plane(i, 1) * s.plane(i, 1);
        CHECK(std::abs(r2 - s.t[i] * s.t[i]) <= 1e-9);
    }
}

TEST_CASE("orthonormal projection is an isometry") {
    SpiralConfig c = small_spiral(6);
    c.ambient_dim = 7;
    const SpiralSample s = gen_density_spiral(c);
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
            double dot = 0.0;
            for (std::size_t r = 0; r < 7; ++r) dot += s.projection(r, a) * s.projection(r, b);
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-10);
        }
    }
    Matrix projected(c.n, 7);
    for (std::size_t i = 0; i < c.n; ++i) {
        for (std::size_t r = 0; r < 7; ++r) projected(i, r) = s.projection(r, 0) * s.plane(i, 0) + s.projection(r, 1) * s.plane(i, 1);
    }
    for (std::size_t i = 0; i < 50; ++i) {
        for (std::size_t j = i + 1; j < 50; ++j) {
            CHECK(std::abs(testing::dist(projected, i, j) - testing::dist(s.plane, i, j)) <= 1e-9);
        }
    }
    // Output columns are standardized.
    for (std::size_t r = 0; r < 7; ++r) {
        double mean = 0.0;
        for (std::size_t i = 0; i < c.n; ++i) mean += s.data.values(i, r);
        CHECK(std::abs(mean / static_cast<double>(c.n)) <= 1e-12);
    }
}

TEST_CASE("raw projection keeps the Gaussian matrix") {
    SpiralConfig c = small_spiral(6);
    c.orthonormal_projection = false;
    const SpiralSample s = gen_density_spiral(c);
    double norm = 0.0;
    for (std::size_t r = 0; r < c.ambient_dim; ++r) norm += s.projection(r, 0) * s.projection(r, 0);
    CHECK(std::abs(norm - 1.0) > 1e-6);
}

TEST_CASE("plain spiral shape, determinism and density tracking") {
    const SpiralSample a = gen_spiral_plain(1000, 1.5 * M_PI, 4.5 * M_PI, M_PI, 0.8, 0.05, 11);
    CHECK(a.data.n() == 1000);
    CHECK(a.data.dim() == 2);
    CHECK_FALSE(a.data.anomaly.has_value());
    CHECK_FALSE(a.data.labels.has_value());
    const SpiralSample b = gen_spiral_plain(1000, 1.5 * M_PI, 4.5 * M_PI, M_PI, 0.8, 0.05, 11);
    CHECK(a.data.values == b.data.values);

    // Points per unit arc length scale with w(t) / t, so compare against that.
    const DensityEstimate d = knn_density(knn(a.data.values, 10));
    std::vector<double> expected(1000);
    for (std::size_t i = 0; i < 1000; ++i) expected[i] = a.weight[i] / a.t[i];
    CHECK(testing::pearson_oracle(d.rho, expected) >= 0.7);
}

TEST_CASE("generator config validation and clipping warning") {
    SpiralConfig c = small_spiral(1);
    c.n = 5;
    CHECK_THROWS_AS(gen_density_spiral(c), InvalidArgument);
    c = small_spiral(1);
    c.anomaly_percentile = 100.0;
    CHECK_THROWS_AS(gen_density_spiral(c), InvalidArgument);
    c = small_spiral(1);
    c.t_max = c.t_min;
    CHECK_THROWS_AS(gen_density_spiral(c), InvalidArgument);
    c = small_spiral(1);
    c.density_amplitude = 1.5;
    const SpiralSample s = gen_density_spiral(c);
    CHECK(s.warnings == 1);
    CHECK(s.data.n() == c.n);
    CHECK(gen_density_spiral(small_spiral(1)).warnings == 0);
}

TEST_CASE("csv loading") {
    TempDir dir("csv");
    SUBCASE("headerless numeric file") {
        testing::write_text(dir.file("a.csv"), "1,2\n3,4\n5,6\n");
        CsvOptions o;
        o.has_header = false;
        const CsvTable t = load_csv(dir.file("a.csv"), o);
        CHECK(t.data.n() == 3);
        CHECK(t.data.dim() == 2);
        CHECK(t.data.values(2, 1) == 6.0);
    }
    SUBCASE("label column by index") {
        testing::write_text(dir.file("b.csv"), "a,b,c\n1,2,0\n3,4,1\n5,6,1\n");
        CsvOptions o;
        o.label_column = "2";
        const CsvTable t = load_csv(dir.file("b.csv"), o);
        CHECK(t.data.dim() == 2);
        CHECK(*t.data.labels == std::vector<int>{0, 1, 1});
        CHECK(t.feature_names == std::vector<std::string>{"a", "b"});
    }
    SUBCASE("label and anomaly columns by name") {
        testing::write_text(dir.file("c.csv"), "x,cls,flag,y\n1,7,true,2\n3,8,0,4\n");
        CsvOptions o;
        o.label_column = "cls";
        o.anomaly_column = "flag";
        const CsvTable t = load_csv(dir.file("c.csv"), o);
        CHECK(t.data.dim() == 2);
        CHECK(t.data.values(1, 1) == 4.0);
        CHECK(*t.data.anomaly == std::vector<bool>{true, false});
    }
    SUBCASE("errors name the line") {
        testing::write_text(dir.file("ragged.csv"), "a,b\n1,2\n3\n");
        CHECK(message_of([&] { load_csv(dir.file("ragged.csv")); }).find("line 3") != std::string::npos);
        testing::write_text(dir.file("text.csv"), "a,b\n1,2\n3,4\n5,x\n");
        const std::string m = message_of([&] { load_csv(dir.file("text.csv")); });
        CHECK(m.find("line 4") != std::string::npos);
        CHECK(m.find("non-numeric") != std::string::npos);
        testing::write_text(dir.file("empty.csv"), "");
        CHECK_THROWS_AS(load_csv(dir.file("empty.csv")), IoError);
        CHECK_THROWS_AS(load_csv(dir.file("missing.csv")), IoError);
        CsvOptions o;
        o.label_column = "nope";
        testing::write_text(dir.file("d.csv"), "a,b\n1,2\n");
        CHECK_THROWS_AS(load_csv(dir.file("d.csv"), o), InvalidArgument);
    }
}

TEST_CASE("csv round trip keeps every bit") {
    TempDir dir("roundtrip");
    DataMatrix d;
    d.values = testing::random_matrix(25, 3, 9, 1e3);
    d.values(0, 0) = 1e-300;
    d.values(1, 1) = -0.1;
    d.labels = std::vector<int>(25, 4);
    d.anomaly = std::vector<bool>(25, false);
    (*d.anomaly)[3] = true;
    save_csv(d, dir.file("r.csv"), {"a", "b", "c"});
    CsvOptions o;
    o.label_column = "label";
    o.anomaly_column = "anomaly";
    const CsvTable t = load_csv(dir.file("r.csv"), o);
    CHECK(testing::max_abs_diff(t.data.values, d.values) <= 1e-12);
    CHECK(t.data.values == d.values);
    CHECK(t.data.labels == d.labels);
    CHECK(t.data.anomaly == d.anomaly);
}

TEST_CASE("save_embedding writes the csv and both sidecars") {
    TempDir dir("embedding");
    Embedding e;
    e.z = testing::random_matrix(12, 2, 3);
    e.config.seed = 4242;
    e.iterations_run = 5;
    for (std::size_t t = 0; t < 5; ++t) e.trace.push_back({t, 1.0 / (1.0 + t), 0.1, 2.0, 0.5});
    const std::string path = dir.file("emb.csv");
    save_embedding(e, path, {{"metrics", {{"trustworthiness", 0.9}}}});

    const std::string csv = testing::read_file(path);
    CHECK(csv.rfind("dim0,dim1\n", 0) == 0);
    const CsvTable back = load_csv(path);
    CHECK(testing::max_abs_diff(back.data.values, e.z) <= 1e-12);

    CHECK(provenance_path(path) == dir.path() / "emb.provenance.json");
    const auto prov = nlohmann::json::parse(testing::read_file(provenance_path(path).string()));
    CHECK(prov["seed"] == 4242);
    CHECK(prov["rng"] == "mt19937_64");
    CHECK(prov["metrics"]["trustworthiness"] == 0.9);

    const std::string loss = testing::read_file(loss_trace_path(path).string());
    CHECK(std::count(loss.begin(), loss.end(), '\n') == 6);
    CHECK(loss.rfind("iteration,kl_loss,dens_loss,total,grad_norm\n", 0) == 0);
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
}

TEST_CASE("atomic writes leave no partial file behind on failure") {
    TempDir dir("atomic");
    CHECK_THROWS_AS(write_file_atomic(dir.path() / "no_such_dir" / "x.csv", "data"), IoError);
    write_file_atomic(dir.path() / "x.csv", "one");
    write_file_atomic(dir.path() / "x.csv", "two");
    CHECK(testing::read_file(dir.file("x.csv")) == "two");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dir.path())) ++files;
    CHECK(files == 1);
}

TEST_CASE("format_double round trips through 17 significant digits") {
    for (const double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.123456789, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}
