#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "wavecoh/cwt.hpp"
#include "wavecoh/errors.hpp"
#include "wavecoh/grid_io.hpp"

using namespace wavecoh;

namespace {

constexpr std::array<std::uint8_t, 3> kBlue{0, 0, 255};
constexpr std::array<std::uint8_t, 3> kYellow{255, 255, 0};
constexpr std::array<std::uint8_t, 3> kRed{255, 0, 0};
constexpr std::array<std::uint8_t, 3> kWhite{255, 255, 255};
constexpr std::array<std::uint8_t, 3> kBlack{0, 0, 0};

ScaleGrid tiny_grid() {
    ScaleGrid g;
    g.s0 = 1.0;
    g.dj = 1.0;
    g.omega0 = 6.0;
    g.scales = {1.0, 2.0};
    return g;
}

}  // namespace

TEST_CASE("grid export writes scale-major long format") {
    const ScaleGrid grid = tiny_grid();
    Field<double> f(2, 2);
    f(0, 0) = 0.5;
    f(0, 1) = -0.25;
    f(1, 0) = 3.0;
    f(1, 1) = 0.125;
    const std::vector<double> coi{0.5, 0.5};

    std::ostringstream out;
    export_grid(out, f, grid, coi);
    CHECK(out.str() ==
          "time_index,scale,value\n"
          "0,1,0.5\n"
          "1,1,-0.25\n"
          "0,2,3\n"
          "1,2,0.125\n");
}

TEST_CASE("grid export appends the mask column when given") {
    const ScaleGrid grid = tiny_grid();
    Field<double> f(2, 2, 1.0);
    Field<std::uint8_t> mask(2, 2, 0);
    mask(0, 0) = 1;
    mask(1, 1) = 7;  // any nonzero prints as 1
    const std::vector<double> coi{0.5, 0.5};

    std::ostringstream out;
    export_grid(out, f, grid, coi, &mask);
    CHECK(out.str() ==
          "time_index,scale,value,significant\n"
          "0,1,1,1\n"
          "1,1,1,0\n"
          "0,2,1,0\n"
          "1,2,1,1\n");
}

TEST_CASE("repeated export is byte-identical") {
    const std::size_t n = 32;
    const auto x = testutil::random_series(n, 77);
    const ScaleGrid grid = build_grid(n, 1.0);
    const CwtField w = cwt(x, 1.0, grid);
    const Field<double> p = power(w);

    std::ostringstream a, b;
    export_grid(a, p, grid, w.coi);
    export_grid(b, p, grid, w.coi);
    CHECK(a.str() == b.str());
    CHECK(a.str().size() > p.size());  // sanity: one line per cell
}

TEST_CASE("export rejects mismatched shapes") {
    const ScaleGrid grid = tiny_grid();
    Field<double> f(2, 2, 0.0);
    std::ostringstream out;
    const std::vector<double> short_coi{0.5};
    CHECK_THROWS_AS((void)export_grid(out, f, grid, short_coi), GridMismatchError);
    Field<double> wrong_rows(3, 2, 0.0);
    const std::vector<double> coi{0.5, 0.5};
    CHECK_THROWS_AS((void)export_grid(out, wrong_rows, grid, coi), GridMismatchError);
}

TEST_CASE("color ramp hits its three stops") {
    CHECK(ramp_color(0.0) == kBlue);
    CHECK(ramp_color(0.5) == kYellow);
    CHECK(ramp_color(1.0) == kRed);
    CHECK(ramp_color(0.25) == std::array<std::uint8_t, 3>{128, 128, 128});
    CHECK(ramp_color(0.75) == std::array<std::uint8_t, 3>{255, 128, 0});
    // out-of-range and NaN clamp to the ends
    CHECK(ramp_color(-3.0) == kBlue);
    CHECK(ramp_color(2.0) == kRed);
    CHECK(ramp_color(std::nan("")) == kBlue);
}

TEST_CASE("heatmap paints one ramp pixel per cell") {
    const ScaleGrid grid = tiny_grid();
    Field<double> f(2, 2);
    f(0, 0) = 0.0;
    f(0, 1) = 0.5;
    f(1, 0) = 1.0;
    f(1, 1) = std::nan("");
    const std::vector<double> coi{0.0, 0.0};  // below every scale: no overlay

    const Image img = render_heatmap(f, grid, coi);
    REQUIRE(img.width == 2);
    REQUIRE(img.height == 2);
    CHECK(img.pixel(0, 0) == kBlue);
    CHECK(img.pixel(1, 0) == kYellow);
    CHECK(img.pixel(0, 1) == kRed);
    CHECK(img.pixel(1, 1) == kBlue);  // NaN renders like 0
}

TEST_CASE("flat fields render flat colors") {
    const ScaleGrid grid = tiny_grid();
    const std::vector<double> coi{0.0, 0.0};
    const Image lo = render_heatmap(Field<double>(2, 2, 0.0), grid, coi);
    const Image hi = render_heatmap(Field<double>(2, 2, 1.0), grid, coi);
    for (std::size_t y = 0; y < 2; ++y) {
        for (std::size_t x = 0; x < 2; ++x) {
            CHECK(lo.pixel(x, y) == kBlue);
            CHECK(hi.pixel(x, y) == kRed);
        }
    }
}

TEST_CASE("cone boundary is overdrawn in white at the expected row") {
    const std::size_t n = 64;
    const ScaleGrid grid = build_grid(n, 1.0);
    const auto coi = coi_boundary(n, 1.0);
    const Image img = render_heatmap(Field<double>(grid.num_scales(), n, 0.0), grid, coi);

    const std::size_t col = 32;
    const auto row = static_cast<std::size_t>(std::floor(std::log2(coi[col] / grid.s0) / grid.dj));
    CHECK(img.pixel(col, row) == kWhite);
    // exactly one white pixel in that column
    std::size_t whites = 0;
    for (std::size_t y = 0; y < img.height; ++y) whites += img.pixel(col, y) == kWhite;
    CHECK(whites == 1);
    // the first column's cone sits below the smallest scale: untouched blue
    for (std::size_t y = 0; y < img.height; ++y) CHECK(img.pixel(0, y) == kBlue);
}

TEST_CASE("mask regions get a black four-neighbour outline") {
    ScaleGrid grid;
    grid.s0 = 1.0;
    grid.dj = 1.0;
    grid.scales = {1, 2, 4, 8, 16};
    Field<double> f(5, 5, 1.0);
    Field<std::uint8_t> mask(5, 5, 0);
    for (std::size_t j = 1; j <= 3; ++j) {
        for (std::size_t i = 1; i <= 3; ++i) mask(j, i) = 1;
    }
    const std::vector<double> coi(5, 0.0);
    const Image img = render_heatmap(f, grid, coi, &mask);

    CHECK(img.pixel(2, 2) == kRed);  // interior of the block keeps its color
    for (std::size_t j = 1; j <= 3; ++j) {
        for (std::size_t i = 1; i <= 3; ++i) {
            if (j == 2 && i == 2) continue;
            CHECK(img.pixel(i, j) == kBlack);
        }
    }
    CHECK(img.pixel(0, 0) == kRed);  // outside the mask: untouched
}

TEST_CASE("png files round-trip losslessly") {
    const ScaleGrid grid = tiny_grid();
    Field<double> f(2, 2);
    f(0, 0) = 0.1;
    f(0, 1) = 0.4;
    f(1, 0) = 0.7;
    f(1, 1) = 0.95;
    const std::vector<double> coi{0.0, 0.0};
    const Image img = render_heatmap(f, grid, coi);

    const auto path = std::filesystem::temp_directory_path() / "wavecoh_roundtrip.png";
    write_png(path, img);
    const Image back = read_png(path);
    CHECK(back.width == img.width);
    CHECK(back.height == img.height);
    CHECK(back.rgb == img.rgb);
    std::filesystem::remove(path);
}

TEST_CASE("png io reports failures as errors") {
    const Image empty;
    std::ostringstream sink;
    CHECK_THROWS_AS((void)write_png(sink, empty), InvalidParameterError);
    Image bad;
    bad.width = 2;
    bad.height = 2;
    bad.rgb.resize(5);  // not 2*2*3
    CHECK_THROWS_AS((void)write_png(sink, bad), InvalidParameterError);
    CHECK_THROWS_AS((void)read_png("/nonexistent/wavecoh.png"), IoError);
}
