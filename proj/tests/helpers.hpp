#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "wavecoh/rng.hpp"

namespace testutil {

inline std::vector<double> random_series(std::size_t n, std::uint64_t seed, double mean = 0.0,
                                         double sd = 1.0) {
    wavecoh::Rng rng(seed);
    std::vector<double> out(n);
    for (double& v : out) v = rng.normal(mean, sd);
    return out;
}

inline std::vector<double> sinusoid(std::size_t n, double period, double phase = 0.0,
                                    double amplitude = 1.0) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = amplitude *
                 std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / period + phase);
    }
    return out;
}

inline std::vector<double> ar1_series(std::size_t n, double phi, std::uint64_t seed,
                                      double sigma = 1.0) {
    wavecoh::Rng rng(seed);
    double u = 0.0;
    for (int i = 0; i < 100; ++i) u = phi * u + sigma * rng.normal();
    std::vector<double> out(n);
    for (double& v : out) {
        u = phi * u + sigma * rng.normal();
        v = u;
    }
    return out;
}

// Monthly CSV starting at the given year/month, one row per value.
inline std::string monthly_csv(int year, int month, std::span<const double> values,
                               const std::string& value_header = "v") {
    std::ostringstream os;
    os << "date," << value_header << "\n";
    for (double v : values) {
        char date[32];
        std::snprintf(date, sizeof date, "%04d-%02d-01", year, month);
        os << date << "," << v << "\n";
        if (++month == 13) {
            month = 1;
            ++year;
        }
    }
    return os.str();
}

}  // namespace testutil
