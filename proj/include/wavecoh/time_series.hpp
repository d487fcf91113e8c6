#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wavecoh {

/// Uniformly sampled series. Timestamps are stored as numbers in the series'
/// native time unit: month index for recognized monthly data (dt = 1 month),
/// day number for other calendar spacings, sample index for synthetic data.
struct TimeSeries {
    std::vector<double> timestamps;
    std::vector<double> values;
    double dt = 1.0;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] std::span<const double> data() const noexcept { return values; }
};

/// Builds a synthetic series sampled at 0, dt, 2·dt, …; validates invariants
/// (finite values, length ≥ 8).
[[nodiscard]] TimeSeries make_series(std::vector<double> values, double dt = 1.0);

/// Validates the TimeSeries invariants: finite values, length ≥ 8, strictly
/// increasing timestamps with uniform spacing within 1e−6 relative.
void validate_series(const TimeSeries& x);

struct CsvOptions {
    std::string date_column = "date";
    std::string value_column;  // empty: first column other than the date column
};

/// Parses a header-first CSV with ISO-8601 dates. Consecutive gaps of 28 to 31
/// days are recognized as a monthly grid and dt becomes 1.0 month; otherwise
/// day gaps must be uniform within 1e−6 relative. Rows are sorted by date
/// first. Empty or malformed cells are an error, never skipped. Error line
/// numbers are 1-based file lines counting the header.
[[nodiscard]] TimeSeries load_csv(std::istream& source, const CsvOptions& options = {});

/// Restricts both series to their common timestamps. The intersection must
/// itself be a valid uniform series of length ≥ 8.
[[nodiscard]] std::pair<TimeSeries, TimeSeries> align(const TimeSeries& a, const TimeSeries& b);

/// Descriptive statistics. Skewness and kurtosis use n-denominator
/// standardized moments; kurtosis is excess (normal = 0); std_dev uses the
/// n−1 sample convention. For a constant series the moment-based fields are
/// NaN and `degenerate` is set instead of dividing by zero.
struct SummaryStats {
    double mean = 0.0;
    double std_dev = 0.0;
    double min = 0.0;
    double max = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double jarque_bera = 0.0;
    double ljung_box = 0.0;
    std::size_t lb_lag = 1;
    std::size_t n = 0;
    bool degenerate = false;
};

[[nodiscard]] SummaryStats describe(std::span<const double> x, std::size_t lb_lag = 1);
[[nodiscard]] SummaryStats describe(const TimeSeries& x, std::size_t lb_lag = 1);

}  // namespace wavecoh
