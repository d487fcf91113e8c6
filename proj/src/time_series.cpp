#include "wavecoh/time_series.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>

#include "wavecoh/errors.hpp"

namespace wavecoh {
namespace {

constexpr std::size_t kMinLength = 8;
constexpr double kSpacingRelTol = 1e-6;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

struct ParsedDate {
    int year;
    unsigned month;
    std::int64_t day_number;  // days since civil epoch

    [[nodiscard]] std::int64_t month_index() const {
        return static_cast<std::int64_t>(year) * 12 + (month - 1);
    }
};

ParsedDate parse_iso_date(const std::string& cell, std::size_t line_no) {
    int y = 0;
    unsigned m = 0, d = 0;
    const char* p = cell.data();
    const char* end = p + cell.size();
    auto r1 = std::from_chars(p, end, y);
    if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != '-')
        throw NonNumericValueError(line_no, cell);
    auto r2 = std::from_chars(r1.ptr + 1, end, m);
    if (r2.ec != std::errc{} || r2.ptr == end || *r2.ptr != '-')
        throw NonNumericValueError(line_no, cell);
    auto r3 = std::from_chars(r2.ptr + 1, end, d);
    if (r3.ec != std::errc{} || r3.ptr != end) throw NonNumericValueError(line_no, cell);

    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) throw NonNumericValueError(line_no, cell);
    const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
    return ParsedDate{y, m, static_cast<std::int64_t>(days)};
}

double parse_value(const std::string& cell, std::size_t line_no) {
    if (cell.empty()) throw NonNumericValueError(line_no, cell);
    double v = 0.0;
    const char* p = cell.data();
    auto r = std::from_chars(p, p + cell.size(), v);
    if (r.ec != std::errc{} || r.ptr != p + cell.size() || !std::isfinite(v))
        throw NonNumericValueError(line_no, cell);
    return v;
}

void check_uniform(const std::vector<double>& stamps) {
    if (stamps.size() < 2) throw SeriesTooShortError("series needs at least 2 samples");
    const double first_gap = stamps[1] - stamps[0];
    if (!(first_gap > 0.0)) {
        throw NonUniformSpacingError("timestamps not strictly increasing");
    }
    for (std::size_t i = 1; i + 1 < stamps.size(); ++i) {
        const double gap = stamps[i + 1] - stamps[i];
        if (!(gap > 0.0)) throw NonUniformSpacingError("timestamps not strictly increasing");
        if (std::abs(gap - first_gap) > kSpacingRelTol * std::abs(first_gap)) {
            throw NonUniformSpacingError("gap " + std::to_string(gap) + " deviates from " +
                                         std::to_string(first_gap) + " at index " +
                                         std::to_string(i + 1));
        }
    }
}

}  // namespace

void validate_series(const TimeSeries& x) {
    if (x.size() < kMinLength) {
        throw SeriesTooShortError("series length " + std::to_string(x.size()) +
                                  " below minimum " + std::to_string(kMinLength));
    }
    if (x.timestamps.size() != x.values.size()) {
        throw LengthMismatchError("timestamp and value counts differ");
    }
    for (double v : x.values) {
        if (!std::isfinite(v)) throw InvalidParameterError("non-finite value in series");
    }
    if (!(x.dt > 0.0)) throw InvalidParameterError("sampling interval must be positive");
    check_uniform(x.timestamps);
}

TimeSeries make_series(std::vector<double> values, double dt) {
    TimeSeries s;
    s.values = std::move(values);
    s.dt = dt;
    s.timestamps.resize(s.values.size());
    for (std::size_t i = 0; i < s.timestamps.size(); ++i)
        s.timestamps[i] = static_cast<double>(i) * dt;
    validate_series(s);
    return s;
}

TimeSeries load_csv(std::istream& source, const CsvOptions& options) {
    std::string line;
    if (!std::getline(source, line)) throw MissingColumnError(options.date_column);
    const auto header = split_csv_line(line);

    std::size_t date_col = header.size();
    std::size_t value_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == options.date_column) date_col = i;
    }
    if (date_col == header.size()) throw MissingColumnError(options.date_column);
    if (options.value_column.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i != date_col) {
                value_col = i;
                break;
            }
        }
        if (value_col == header.size()) throw MissingColumnError("<value>");
    } else {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == options.value_column) value_col = i;
        }
        if (value_col == header.size()) throw MissingColumnError(options.value_column);
    }

    struct Row {
        ParsedDate date;
        double value;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() <= std::max(date_col, value_col)) {
            throw NonNumericValueError(line_no, line);
        }
        rows.push_back(Row{parse_iso_date(cells[date_col], line_no),
                           parse_value(cells[value_col], line_no)});
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.date.day_number < b.date.day_number;
    });

    if (rows.size() < kMinLength) {
        throw SeriesTooShortError("CSV holds " + std::to_string(rows.size()) +
                                  " data rows, need at least " + std::to_string(kMinLength));
    }

    // Monthly grid when every consecutive gap is 28..31 days.
    bool monthly = true;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const auto gap = rows[i + 1].date.day_number - rows[i].date.day_number;
        if (gap < 28 || gap > 31) {
            monthly = false;
            break;
        }
    }

    TimeSeries s;
    s.values.reserve(rows.size());
    s.timestamps.reserve(rows.size());
    for (const auto& r : rows) {
        s.values.push_back(r.value);
        s.timestamps.push_back(static_cast<double>(monthly ? r.date.month_index()
                                                           : r.date.day_number));
    }
    s.dt = monthly ? 1.0 : (s.timestamps[1] - s.timestamps[0]);
    validate_series(s);
    return s;
}

std::pair<TimeSeries, TimeSeries> align(const TimeSeries& a, const TimeSeries& b) {
    TimeSeries oa, ob;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double ta = a.timestamps[i];
        const double tb = b.timestamps[j];
        if (std::abs(ta - tb) <= 1e-6) {
            oa.timestamps.push_back(ta);
            oa.values.push_back(a.values[i]);
            ob.timestamps.push_back(tb);
            ob.values.push_back(b.values[j]);
            ++i;
            ++j;
        } else if (ta < tb) {
            ++i;
        } else {
            ++j;
        }
    }
    if (oa.size() < kMinLength) {
        throw InsufficientOverlapError("series share only " + std::to_string(oa.size()) +
                                       " timestamps, need at least " +
                                       std::to_string(kMinLength));
    }
    oa.dt = oa.timestamps[1] - oa.timestamps[0];
    ob.dt = oa.dt;
    try {
        validate_series(oa);
        validate_series(ob);
    } catch (const NonUniformSpacingError&) {
        throw InsufficientOverlapError("common timestamps do not form a uniform grid");
    }
    return {std::move(oa), std::move(ob)};
}

SummaryStats describe(std::span<const double> x, std::size_t lb_lag) {
    const std::size_t n = x.size();
    if (lb_lag == 0) throw InvalidParameterError("Ljung-Box lag must be positive");
    if (n < lb_lag + 2) {
        throw SeriesTooShortError("need n >= lag + 2, got n = " + std::to_string(n));
    }

    SummaryStats st;
    st.n = n;
    st.lb_lag = lb_lag;
    st.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    st.min = *std::min_element(x.begin(), x.end());
    st.max = *std::max_element(x.begin(), x.end());

    if (st.min == st.max) {
        st.degenerate = true;
        st.std_dev = 0.0;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        st.skewness = st.excess_kurtosis = st.jarque_bera = st.ljung_box = nan;
        return st;
    }

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - st.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const double nd = static_cast<double>(n);
    st.std_dev = std::sqrt(m2 / (nd - 1.0));
    m2 /= nd;
    m3 /= nd;
    m4 /= nd;
    st.skewness = m3 / std::pow(m2, 1.5);
    st.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    st.jarque_bera =
        nd / 6.0 * (st.skewness * st.skewness + st.excess_kurtosis * st.excess_kurtosis / 4.0);

    const double denom = m2 * nd;  // Σ (x_t − mean)²
    double q = 0.0;
    for (std::size_t k = 1; k <= lb_lag; ++k) {
        double acov = 0.0;
        for (std::size_t t = k; t < n; ++t) {
            acov += (x[t] - st.mean) * (x[t - k] - st.mean);
        }
        const double rho = acov / denom;
        q += rho * rho / (nd - static_cast<double>(k));
    }
    st.ljung_box = nd * (nd + 2.0) * q;
    return st;
}

SummaryStats describe(const TimeSeries& x, std::size_t lb_lag) {
    return describe(std::span<const double>(x.values), lb_lag);
}

}  // namespace wavecoh
