#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "wavecoh/dwt.hpp"
#include "wavecoh/errors.hpp"

using namespace wavecoh;

namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.size(), std::vector<double>(b[0].size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
        }
    }
    return c;
}

// One pyramid stage as an explicit (M/2)×M matrix: row t holds the filter
// taps at circular positions (2t+1−l) mod M.
Matrix stage_matrix(const std::vector<double>& taps, std::size_t m) {
    Matrix out(m / 2, std::vector<double>(m, 0.0));
    for (std::size_t t = 0; t < m / 2; ++t) {
        std::size_t u = 2 * t + 1;
        for (double tap : taps) {
            out[t][u] += tap;
            u = (u == 0) ? m - 1 : u - 1;
        }
    }
    return out;
}

// Full N×N analysis matrix, rows grouped level-major then the final
// smooth block: [B1; B2·A1; B3·A2·A1; …; A_J···A_1].
Matrix analysis_matrix(const WaveletFilter& f, std::size_t n, std::size_t levels) {
    Matrix rows;
    Matrix carry;  // product of scaling stages so far
    std::size_t m = n;
    for (std::size_t j = 0; j < levels; ++j) {
        const Matrix b = stage_matrix(f.h, m);
        const Matrix a = stage_matrix(f.g, m);
        const Matrix b_full = carry.empty() ? b : matmul(b, carry);
        carry = carry.empty() ? a : matmul(a, carry);
        for (auto& r : b_full) rows.push_back(r);
        m /= 2;
    }
    for (auto& r : carry) rows.push_back(r);
    return rows;
}

std::vector<double> flatten(const DwtDecomposition& d) {
    std::vector<double> out;
    for (const auto& w : d.levels) out.insert(out.end(), w.begin(), w.end());
    out.insert(out.end(), d.final_v.begin(), d.final_v.end());
    return out;
}

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

}  // namespace

TEST_CASE("haar filter and its QMF mate") {
    const WaveletFilter f = make_filter("haar");
    CHECK(f.h[0] == doctest::Approx(0.7071067811865476).epsilon(1e-15));
    CHECK(f.h[1] == doctest::Approx(-0.7071067811865476).epsilon(1e-15));
    CHECK(f.g[0] == doctest::Approx(0.7071067811865476).epsilon(1e-15));
    CHECK(f.g[1] == doctest::Approx(0.7071067811865476).epsilon(1e-15));
}

TEST_CASE("every filter satisfies the three basic properties") {
    for (const char* name : {"haar", "d4", "la8"}) {
        const WaveletFilter f = make_filter(name);
        const std::size_t L = f.length();
        CHECK(L % 2 == 0);
        double sum = 0.0, sum2 = 0.0;
        for (double h : f.h) {
            sum += h;
            sum2 += h * h;
        }
        CHECK(std::abs(sum) < 1e-12);
        CHECK(std::abs(sum2 - 1.0) < 1e-12);
        for (std::size_t shift = 2; shift < L; shift += 2) {
            double dot = 0.0;
            for (std::size_t l = 0; l + shift < L; ++l) dot += f.h[l] * f.h[l + shift];
            CHECK(std::abs(dot) < 1e-12);
        }
    }
}

TEST_CASE("unknown filter names are rejected") {
    CHECK_THROWS_AS((void)make_filter("db99"), UnknownFilterError);
}

TEST_CASE("QMF relation inverts exactly") {
    for (const char* name : {"haar", "d4", "la8"}) {
        const WaveletFilter f = make_filter(name);
        const std::size_t L = f.length();
        for (std::size_t l = 0; l < L; ++l) {
            const double h = (l % 2 == 0 ? 1.0 : -1.0) * f.g[L - l - 1];
            CHECK(h == f.h[l]);
        }
    }
}

TEST_CASE("max_level closed form") {
    CHECK(max_level(237, 2) == 7);
    CHECK(max_level(237, 8) == 5);
    CHECK(max_level(16, 2) == 4);
    CHECK_THROWS_AS((void)max_level(4, 8), SeriesShorterThanFilterError);
}

TEST_CASE("constant input concentrates in the final smooth") {
    const std::vector<double> x{1, 1, 1, 1};
    const DwtDecomposition d = dwt_forward(x, 2, make_filter("haar"));
    REQUIRE(d.levels.size() == 2);
    REQUIRE(d.levels[0].size() == 2);
    REQUIRE(d.levels[1].size() == 1);
    REQUIRE(d.final_v.size() == 1);
    CHECK(std::abs(d.levels[0][0]) < 1e-15);
    CHECK(std::abs(d.levels[0][1]) < 1e-15);
    CHECK(std::abs(d.levels[1][0]) < 1e-15);
    CHECK(d.final_v[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(d.coefficient_energy() == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("unit impulse preserves energy exactly") {
    std::vector<double> x(8, 0.0);
    x[0] = 1.0;
    const DwtDecomposition d = dwt_forward(x, 3, make_filter("haar"));
    CHECK(d.coefficient_energy() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("pyramid equals the assembled analysis matrix at N=16") {
    const auto x = testutil::random_series(16, 23);
    for (const char* name : {"haar", "d4", "la8"}) {
        const WaveletFilter f = make_filter(name);
        const DwtDecomposition d = dwt_forward(x, 4, f);
        const std::vector<double> from_pyramid = flatten(d);
        const Matrix w = analysis_matrix(f, 16, 4);
        REQUIRE(from_pyramid.size() == 16);
        REQUIRE(w.size() == 16);
        for (std::size_t r = 0; r < 16; ++r) {
            double dot = 0.0;
            for (std::size_t c = 0; c < 16; ++c) dot += w[r][c] * x[c];
            CHECK(std::abs(dot - from_pyramid[r]) < 1e-12);
        }
    }
}

TEST_CASE("assembled analysis matrix is orthonormal at N=16") {
    for (const char* name : {"haar", "d4", "la8"}) {
        const Matrix w = analysis_matrix(make_filter(name), 16, 4);
        for (std::size_t i = 0; i < 16; ++i) {
            for (std::size_t j = 0; j < 16; ++j) {
                double dot = 0.0;
                for (std::size_t c = 0; c < 16; ++c) dot += w[i][c] * w[j][c];
                CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-10);
            }
        }
    }
}

TEST_CASE("pyramid equals the matrix oracle at N=32 as well") {
    const auto x = testutil::random_series(32, 29);
    for (const char* name : {"haar", "d4", "la8"}) {
        const WaveletFilter f = make_filter(name);
        const DwtDecomposition d = dwt_forward(x, 3, f);
        const std::vector<double> from_pyramid = flatten(d);
        const Matrix w = analysis_matrix(f, 32, 3);
        for (std::size_t r = 0; r < 32; ++r) {
            double dot = 0.0;
            for (std::size_t c = 0; c < 32; ++c) dot += w[r][c] * x[c];
            CHECK(std::abs(dot - from_pyramid[r]) < 1e-12);
        }
    }
}

TEST_CASE("round-trip reconstruction across lengths and filters") {
    for (std::size_t n : {std::size_t{16}, std::size_t{64}, std::size_t{237}}) {
        for (const char* name : {"haar", "d4", "la8"}) {
            const WaveletFilter f = make_filter(name);
            const auto x = testutil::random_series(n, 1000 + n);
            const std::size_t levels = std::min<std::size_t>(4, max_level(n, f.length()));
            const DwtDecomposition d = dwt_forward(x, levels, f);
            const std::vector<double> back = dwt_inverse(d);
            REQUIRE(back.size() == n);
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(back[i] - x[i]));
            const double scale = std::sqrt(norm2(x) / static_cast<double>(n));
            CHECK(err / scale < 1e-10);
        }
    }
}

TEST_CASE("energy identity holds on the padded series") {
    for (std::size_t n : {std::size_t{64}, std::size_t{237}}) {
        for (const char* name : {"haar", "d4", "la8"}) {
            const WaveletFilter f = make_filter(name);
            const auto x = testutil::random_series(n, 77 + n);
            const DwtDecomposition d = dwt_forward(x, 3, f);
            // recover the padded input through the inverse to measure its energy
            const std::vector<double> padded = dwt_inverse_padded(d);
            REQUIRE(padded.size() == d.n_padded);
            const double ex = norm2(padded);
            const double ew = d.coefficient_energy();
            CHECK(std::abs(ew - ex) / ex < 1e-9);
        }
    }
}

TEST_CASE("zeroed detail levels leave only the coarse energy") {
    const auto x = testutil::random_series(64, 31);
    DwtDecomposition d = dwt_forward(x, 3, make_filter("d4"));
    const double coarse = norm2(d.final_v);
    for (auto& w : d.levels) std::fill(w.begin(), w.end(), 0.0);
    const std::vector<double> approx = dwt_inverse_padded(d);
    CHECK(norm2(approx) == doctest::Approx(coarse).epsilon(1e-12));
}

TEST_CASE("all-zero decomposition inverts to zero") {
    DwtDecomposition d = dwt_forward(std::vector<double>(16, 0.0), 2, make_filter("la8"));
    const std::vector<double> back = dwt_inverse(d);
    for (double v : back) CHECK(v == 0.0);
}

TEST_CASE("levels beyond the padded maximum are rejected") {
    const auto x = testutil::random_series(16, 3);
    CHECK_THROWS_AS((void)dwt_forward(x, 0, make_filter("haar")), LevelTooDeepError);
    CHECK_THROWS_AS((void)dwt_forward(x, 40, make_filter("haar")), LevelTooDeepError);
    // 2^5 = 32 > 16: deeper than the dyadic capacity of the series
    CHECK_THROWS_AS((void)dwt_forward(x, 5, make_filter("la8")), LevelTooDeepError);
}

TEST_CASE("padding is recorded and stripped") {
    const auto x = testutil::random_series(237, 41);
    const DwtDecomposition d = dwt_forward(x, 3, make_filter("haar"));
    CHECK(d.n_original == 237);
    CHECK(d.n_padded == 240);
    CHECK(d.levels[0].size() == 120);
    CHECK(d.levels[1].size() == 60);
    CHECK(d.levels[2].size() == 30);
    CHECK(d.final_v.size() == 30);
    CHECK(dwt_inverse(d).size() == 237);
}
