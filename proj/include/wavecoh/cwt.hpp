#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "wavecoh/field.hpp"
#include "wavecoh/time_series.hpp"

namespace wavecoh {

/// Logarithmic scale grid s_j = s0 · 2^(j·dj). omega0 is the Morlet central
/// frequency (dimensionless, ≥ 5 for practical admissibility).
struct ScaleGrid {
    double s0 = 0.0;
    double dj = 0.0;
    double omega0 = 6.0;
    std::vector<double> scales;

    [[nodiscard]] std::size_t num_scales() const noexcept { return scales.size(); }
    [[nodiscard]] bool same_as(const ScaleGrid& other) const noexcept;
};

inline constexpr double kDefaultOmega0 = 6.0;
inline constexpr double kDefaultDj = 1.0 / 12.0;

/// Grid covering scales s0 … n·dt. Defaults: s0 = 2·dt, dj = 1/12.
/// Throws InvalidGridError for non-positive s0/dj, omega0 < 5, or an empty
/// scale range; SeriesTooShortError for n < 8.
[[nodiscard]] ScaleGrid build_grid(std::size_t n, double dt, double s0 = -1.0,
                                   double dj = kDefaultDj, double omega0 = kDefaultOmega0);

/// Mother Morlet wavelet π^(−1/4) · e^(−t²/2) · e^(iω0t) at time t.
[[nodiscard]] std::complex<double> morlet_time(double t, double omega0 = kDefaultOmega0);

/// Equivalent Fourier period λ = 4π·s / (ω0 + sqrt(2 + ω0²)).
[[nodiscard]] double scale_to_fourier_period(double s, double omega0 = kDefaultOmega0);

/// Inverse of scale_to_fourier_period.
[[nodiscard]] double fourier_period_to_scale(double period, double omega0 = kDefaultOmega0);

/// Cone-of-influence boundary scale per time index: dt·min(i, n−1−i)/√2, the
/// scale whose e-folding time √2·s equals the distance to the nearer edge.
[[nodiscard]] std::vector<double> coi_boundary(std::size_t n, double dt);

/// Complex wavelet coefficients on a scale grid, rows indexed by scale.
struct CwtField {
    Field<std::complex<double>> coefficients;
    ScaleGrid grid;
    double dt = 1.0;
    std::vector<double> coi;

    [[nodiscard]] std::size_t n() const noexcept { return coefficients.cols(); }

    /// True where the wavelet support at this scale clears both edges, i.e.
    /// the point is unaffected by boundary truncation.
    [[nodiscard]] bool edge_safe(std::size_t scale_row, std::size_t time_index) const {
        return grid.scales[scale_row] < coi[time_index];
    }
};

/// Morlet transform of the de-meaned, zero-padded series via frequency-domain
/// daughter wavelets scaled by sqrt(2π·s/dt), making white-noise expected
/// power flat across scales.
[[nodiscard]] CwtField cwt(std::span<const double> x, double dt, const ScaleGrid& grid);
[[nodiscard]] CwtField cwt(const TimeSeries& x, const ScaleGrid& grid);

/// Wavelet power |W|², same shape as the coefficient matrix.
[[nodiscard]] Field<double> power(const CwtField& w);

}  // namespace wavecoh
