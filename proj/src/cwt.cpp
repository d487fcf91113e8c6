#include "wavecoh/cwt.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <tuple>

#include "fft.hpp"
#include "wavecoh/errors.hpp"

namespace wavecoh {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinOmega0 = 5.0;
constexpr std::size_t kMinSeriesLength = 8;

// Fourier-domain daughter values per scale row, indices 1..npad/2. They
// depend only on the grid and padded length, so surrogate sweeps that
// transform thousands of same-shaped series reuse one table. Bounded like
// the FFT plan cache; shared_ptr keeps evicted tables alive for callers.
using DaughterTable = std::vector<std::vector<double>>;
using DaughterKey = std::tuple<std::size_t, double, double, std::vector<double>>;

std::shared_ptr<const DaughterTable> daughter_table(const ScaleGrid& grid, std::size_t npad,
                                                    double dt) {
    static std::mutex mutex;
    static auto* cache = new std::map<DaughterKey, std::shared_ptr<const DaughterTable>>();

    DaughterKey key{npad, dt, grid.omega0, grid.scales};
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache->find(key); it != cache->end()) return it->second;

    const double dw = 2.0 * kPi / (static_cast<double>(npad) * dt);
    const std::size_t half = npad / 2;
    const double quarter_pi = std::pow(kPi, -0.25);
    auto table = std::make_shared<DaughterTable>(grid.num_scales());
    for (std::size_t j = 0; j < grid.num_scales(); ++j) {
        const double s = grid.scales[j];
        const double norm = std::sqrt(2.0 * kPi * s / dt) * quarter_pi;
        auto& row = (*table)[j];
        row.resize(half + 1, 0.0);
        for (std::size_t k = 1; k <= half; ++k) {
            const double arg = s * (static_cast<double>(k) * dw) - grid.omega0;
            row[k] = norm * std::exp(-0.5 * arg * arg);
        }
    }
    if (cache->size() >= 8) cache->clear();
    cache->emplace(std::move(key), table);
    return table;
}

}  // namespace

bool ScaleGrid::same_as(const ScaleGrid& other) const noexcept {
    return s0 == other.s0 && dj == other.dj && omega0 == other.omega0 &&
           scales.size() == other.scales.size();
}

ScaleGrid build_grid(std::size_t n, double dt, double s0, double dj, double omega0) {
    if (n < kMinSeriesLength) {
        throw SeriesTooShortError("grid needs n >= 8, got " + std::to_string(n));
    }
    if (!(dt > 0.0)) throw InvalidGridError("sampling interval must be positive");
    if (s0 <= 0.0 && s0 != -1.0) throw InvalidGridError("smallest scale must be positive");
    if (s0 == -1.0) s0 = 2.0 * dt;
    if (!(dj > 0.0)) throw InvalidGridError("scale resolution dj must be positive");
    if (!(omega0 >= kMinOmega0)) {
        throw InvalidGridError("omega0 must be at least 5 for admissibility");
    }

    const double span = static_cast<double>(n) * dt;
    const double octaves = std::log2(span / s0);
    if (octaves < 0.0) throw InvalidGridError("smallest scale exceeds the series span");
    // Tiny slack so exact-integer ratios are not lost to rounding.
    const auto count = static_cast<std::size_t>(std::floor(octaves / dj + 1e-9)) + 1;

    ScaleGrid grid;
    grid.s0 = s0;
    grid.dj = dj;
    grid.omega0 = omega0;
    grid.scales.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
        grid.scales[j] = s0 * std::exp2(static_cast<double>(j) * dj);
    }
    return grid;
}

std::complex<double> morlet_time(double t, double omega0) {
    const double envelope = std::pow(kPi, -0.25) * std::exp(-0.5 * t * t);
    return {envelope * std::cos(omega0 * t), envelope * std::sin(omega0 * t)};
}

double scale_to_fourier_period(double s, double omega0) {
    return 4.0 * kPi * s / (omega0 + std::sqrt(2.0 + omega0 * omega0));
}

double fourier_period_to_scale(double period, double omega0) {
    return period * (omega0 + std::sqrt(2.0 + omega0 * omega0)) / (4.0 * kPi);
}

std::vector<double> coi_boundary(std::size_t n, double dt) {
    if (n < 2) throw SeriesTooShortError("cone of influence needs n >= 2");
    std::vector<double> c(n);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double edge_dist = static_cast<double>(std::min(i, n - 1 - i));
        c[i] = dt * edge_dist * inv_sqrt2;
    }
    return c;
}

CwtField cwt(std::span<const double> x, double dt, const ScaleGrid& grid) {
    const std::size_t n = x.size();
    if (n < kMinSeriesLength) {
        throw SeriesTooShortError("transform needs n >= 8, got " + std::to_string(n));
    }
    if (grid.scales.empty()) throw InvalidGridError("empty scale grid");
    for (double v : x) {
        if (!std::isfinite(v)) throw InvalidParameterError("non-finite value in series");
    }

    const std::size_t npad = detail::next_pow2(n);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);

    std::vector<std::complex<double>> spectrum(npad, {0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) spectrum[i] = {x[i] - mean, 0.0};
    detail::fft_forward(spectrum);

    // Positive half-spectrum only (Nyquist included): the analytic wavelet.
    const std::size_t half = npad / 2;
    const auto daughters = daughter_table(grid, npad, dt);

    CwtField field;
    field.coefficients = Field<std::complex<double>>(grid.num_scales(), n);
    field.grid = grid;
    field.dt = dt;
    field.coi = coi_boundary(n, dt);

    std::vector<std::complex<double>> row(npad);
    for (std::size_t j = 0; j < grid.num_scales(); ++j) {
        const std::vector<double>& daughter = (*daughters)[j];
        row.assign(npad, {0.0, 0.0});
        for (std::size_t k = 1; k <= half; ++k) row[k] = spectrum[k] * daughter[k];
        detail::fft_inverse(row);
        std::copy(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n),
                  field.coefficients.row(j));
    }
    return field;
}

CwtField cwt(const TimeSeries& x, const ScaleGrid& grid) {
    return cwt(std::span<const double>(x.values), x.dt, grid);
}

Field<double> power(const CwtField& w) {
    Field<double> p(w.coefficients.rows(), w.coefficients.cols());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p.data()[i] = std::norm(w.coefficients.data()[i]);
    }
    return p;
}

}  // namespace wavecoh
