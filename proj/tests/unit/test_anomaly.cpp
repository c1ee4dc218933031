#include <cmath>

#include "doctest.h"
#include "drsne/anomaly.hpp"
#include "drsne/density.hpp"
#include "drsne/error.hpp"
#include "test_support.hpp"

using namespace drsne;
using testing::random_matrix;

namespace {

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// 10 x 10 unit grid plus one far point at index 100.
Matrix grid_with_outlier(double far) {
    Matrix z(101, 2);
    for (std::size_t i = 0; i < 100; ++i) {
        z(i, 0) = static_cast<double>(i % 10);
        z(i, 1) = static_cast<double>(i / 10);
    }
    z(100, 0) = far;
    z(100, 1) = far;
    return z;
}

}  // namespace

TEST_CASE("detector names") {
    CHECK(parse_detector("knn") == Detector::knn_dist);
    CHECK(parse_detector("knn_dist") == Detector::knn_dist);
    CHECK(parse_detector("if") == Detector::iforest);
    CHECK(parse_detector("cent") == Detector::centroid);
    CHECK(to_string(Detector::lof) == "lof");
    CHECK_THROWS_AS(parse_detector("svm"), InvalidArgument);
}

TEST_CASE("knn score") {
    SUBCASE("far outlier has the maximum score") {
        CHECK(argmax(knn_score(grid_with_outlier(30.0), 5).scores) == 100);
    }
    SUBCASE("coincident points score zero") {
        for (const double s : knn_score(Matrix(8, 2, 3.0), 3).scores) CHECK(s == 0.0);
    }
    SUBCASE("matches the sort oracle") {
        const Matrix z = random_matrix(30, 2, 1);
        const auto got = knn_score(z, 4).scores;
        const auto want = testing::knn_score_oracle(z, 4);
        for (std::size_t i = 0; i < 30; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-12);
    }
    SUBCASE("k >= n is rejected") {
        CHECK_THROWS_AS(knn_score(random_matrix(5, 2, 1), 5), InvalidArgument);
    }
}

TEST_CASE("lof") {
    SUBCASE("grid interior is close to 1") {
        const Matrix z = grid_with_outlier(1000.0);
        const auto s = lof_score(z, 8).scores;
        for (std::size_t i = 0; i < 100; ++i) {
            const std::size_t r = i / 10, c = i % 10;
            if (r >= 2 && r <= 7 && c >= 2 && c <= 7) CHECK(std::abs(s[i] - 1.0) <= 0.15);
        }
    }
    SUBCASE("distant outlier is the maximum and above 1.5") {
        Matrix z = random_matrix(40, 2, 5, 0.1);
        z(39, 0) = 5.0;
        const auto s = lof_score(z, 5).scores;
        CHECK(argmax(s) == 39);
        CHECK(s[39] > 1.5);
    }
    SUBCASE("matches the definitional oracle") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const Matrix z = random_matrix(12, 2, 10 + seed);
            const auto got = lof_score(z, 3).scores;
            const auto want = testing::lof_oracle(z, 3);
            for (std::size_t i = 0; i < 12; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-9);
        }
    }
    SUBCASE("duplicates stay finite") {
        const Matrix z(6, 1, std::vector<double>{0, 0, 0, 0, 1, 5});
        for (const double s : lof_score(z, 2).scores) CHECK(std::isfinite(s));
    }
}

TEST_CASE("isolation forest") {
    SUBCASE("normalizer closed form against harmonic numbers") {
        CHECK(average_path_length(0) == 0.0);
        CHECK(average_path_length(1) == 0.0);
        CHECK(average_path_length(2) == 1.0);
        // c(m) = 2 H(m - 1) - 2 (m - 1) / m with H(i) the i-th harmonic number; the
        // closed form replaces H(i) by ln(i) + gamma.
        double h = 0.0;
        for (int i = 1; i <= 255; ++i) h += 1.0 / i;
        const double exact = 2.0 * h - 2.0 * 255.0 / 256.0;
        CHECK(average_path_length(256) == doctest::Approx(10.244).epsilon(1e-4));
        CHECK(std::abs(average_path_length(256) - exact) <= 5e-3);
        CHECK(std::abs(average_path_length(256) - 10.244770920116851) <= 1e-6);
    }
    SUBCASE("extreme outlier wins the majority of seeds") {
        Matrix z = random_matrix(200, 1, 3);
        z(7, 0) = 25.0;
        int wins = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            if (argmax(iforest_score(z, {100, 256, seed}).scores) == 7) ++wins;
        }
        CHECK(wins > 5);
    }
    SUBCASE("identical points score equally") {
        const auto s = iforest_score(Matrix(20, 2, 1.5), {50, 16, 1}).scores;
        for (const double v : s) CHECK(std::abs(v - s[0]) <= 1e-9);
    }
    SUBCASE("seeded and thread independent") {
        const Matrix z = random_matrix(300, 2, 4);
        const auto a = iforest_score(z, {60, 128, 9}).scores;
        CHECK(a == iforest_score(z, {60, 128, 9}).scores);
        CHECK(a == iforest_score(z, {60, 128, 9}, Exec{4}).scores);
        CHECK(a != iforest_score(z, {60, 128, 10}).scores);
    }
    SUBCASE("scores lie in (0, 1]") {
        for (const double v : iforest_score(random_matrix(100, 3, 2)).scores) {
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("centroid score") {
    SUBCASE("symmetric configuration gives the radii") {
        const Matrix z(4, 2, std::vector<double>{1, 0, -1, 0, 0, 3, 0, -3});
        CHECK(centroid_score(z).scores == std::vector<double>{1, 1, 3, 3});
    }
    SUBCASE("the mean point scores zero") {
        const Matrix z(3, 2, std::vector<double>{-2, 1, 0, 0, 2, -1});
        CHECK(centroid_score(z).scores[1] == 0.0);
    }
    SUBCASE("matches the direct computation") {
        const Matrix z = random_matrix(35, 3, 6);
        const auto got = centroid_score(z).scores;
        const auto want = testing::centroid_oracle(z);
        for (std::size_t i = 0; i < 35; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-12);
    }
}

TEST_CASE("detectors under translation and scaling") {
    const Matrix z = random_matrix(40, 2, 8);
    const Matrix shifted = testing::affine(z, 1.0, {100.0, -7.0});
    const Matrix scaled = testing::affine(z, 3.0, {0.0, 0.0});
    const auto k0 = knn_score(z, 5).scores;
    const auto l0 = lof_score(z, 5).scores;
    const auto c0 = centroid_score(z).scores;
    const auto k1 = knn_score(shifted, 5).scores;
    const auto k2 = knn_score(scaled, 5).scores;
    const auto l1 = lof_score(shifted, 5).scores;
    const auto l2 = lof_score(scaled, 5).scores;
    const auto c1 = centroid_score(shifted).scores;
    const auto c2 = centroid_score(scaled).scores;
    for (std::size_t i = 0; i < 40; ++i) {
        CHECK(k1[i] == doctest::Approx(k0[i]).epsilon(1e-10));
        CHECK(k2[i] == doctest::Approx(3.0 * k0[i]).epsilon(1e-12));
        CHECK(l1[i] == doctest::Approx(l0[i]).epsilon(1e-9));
        CHECK(c1[i] == doctest::Approx(c0[i]).epsilon(1e-10));
        CHECK(c2[i] == doctest::Approx(3.0 * c0[i]).epsilon(1e-12));
    }
    CHECK(spearman_correlation(l0, l2) == doctest::Approx(1.0).epsilon(1e-12));

    // A power-of-two scale is exact in floating point, so every split scales with the
    // data and the forest isolates points identically.
    const Matrix doubled = testing::affine(z, 2.0, {0.0, 0.0});
    CHECK(iforest_score(doubled, {50, 32, 3}).scores == iforest_score(z, {50, 32, 3}).scores);
    const auto f0 = iforest_score(z, {50, 32, 3}).scores;
    const auto f1 = iforest_score(shifted, {50, 32, 3}).scores;
    CHECK(spearman_correlation(f0, f1) > 0.99);
}

TEST_CASE("auprc") {
    SUBCASE("perfect ranking") {
        CHECK(auprc(std::vector<double>{0.9, 0.8, 0.1, 0.2}, {true, true, false, false}) == 1.0);
    }
    SUBCASE("constant scores give the positive rate") {
        CHECK(auprc(std::vector<double>(10, 1.0), {true, false, false, true, false, false, false, false, false, false}) ==
              doctest::Approx(0.2).epsilon(1e-15));
    }
    SUBCASE("matches an exhaustive threshold sweep") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> s(10);
            std::vector<bool> f(10);
            for (std::size_t i = 0; i < 10; ++i) {
                s[i] = static_cast<double>(rng() % 6);  // plenty of ties
                f[i] = rng() % 3 == 0;
            }
            f[0] = true;
            f[1] = false;
            CHECK(std::abs(auprc(s, f) - testing::auprc_oracle(s, f)) <= 1e-9);
        }
    }
    SUBCASE("invariant under a strictly increasing transform") {
        const auto s = testing::random_vector(30, 9);
        std::vector<bool> f(30);
        for (std::size_t i = 0; i < 30; ++i) f[i] = s[i] + 0.3 * std::sin(7.0 * static_cast<double>(i)) > 0.2;
        std::vector<double> t(30);
        for (std::size_t i = 0; i < 30; ++i) t[i] = std::exp(5.0 * s[i]) - 3.0;
        CHECK(std::abs(auprc(s, f) - auprc(t, f)) <= 1e-12);
    }
    SUBCASE("needs both classes") {
        CHECK_THROWS_AS(auprc(std::vector<double>{1, 2}, {true, true}), InvalidArgument);
        CHECK_THROWS_AS(auprc(std::vector<double>{1, 2}, {false, false}), InvalidArgument);
    }
}
