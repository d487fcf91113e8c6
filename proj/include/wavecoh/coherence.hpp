#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wavecoh/cwt.hpp"
#include "wavecoh/field.hpp"
#include "wavecoh/time_series.hpp"

namespace wavecoh {

/// Cross-wavelet transform W_x · conj(W_y). Modulus is the localized
/// covariance; argument is the raw phase difference.
/// Throws GridMismatchError when the fields disagree in grid, length, or dt.
[[nodiscard]] CwtField xwt(const CwtField& wx, const CwtField& wy);

/// Time-then-scale smoothing operator, precomputed for one (grid, dt, n)
/// combination so repeated applications (coherence denominators, Monte Carlo
/// surrogates) reuse kernels. Per scale row: Gaussian exp(−t²/(2s²))
/// truncated at ±4s, unit sum; per time column: boxcar over
/// 0.6/(dj·ln 2) rows rounded to the nearest odd count ≥ 1, unit sum.
/// Kernels renormalize over the in-range support near edges, so constants
/// are preserved everywhere. Stateless after construction; apply() is safe
/// to call concurrently.
class Smoother {
public:
    Smoother(const ScaleGrid& grid, double dt, std::size_t n);

    [[nodiscard]] Field<std::complex<double>> apply(const Field<std::complex<double>>& f) const;
    [[nodiscard]] Field<double> apply(const Field<double>& f) const;

    /// Materializes only the first out_rows rows of apply(); the rest stay
    /// zero. Computed rows match apply() exactly. Lets Monte Carlo sweeps
    /// skip deep-scale rows whose output is never read.
    [[nodiscard]] Field<std::complex<double>> apply_rows(const Field<std::complex<double>>& f,
                                                         std::size_t out_rows) const;

    [[nodiscard]] std::size_t box_rows() const noexcept { return box_rows_; }

private:
    struct RowPlan {
        std::size_t half = 0;                 // kernel half-width in samples
        std::vector<double> weights;          // 2·half+1 Gaussian taps
        std::vector<double> inv_norm;         // per column, 1/(sum of valid taps)
        bool use_fft = false;
        std::size_t conv_len = 0;             // FFT length for the long-kernel path
        std::vector<std::complex<double>> kernel_spectrum;
    };

    void smooth_row(const RowPlan& plan, const std::complex<double>* in,
                    std::complex<double>* out) const;

    std::vector<RowPlan> rows_;
    std::size_t cols_ = 0;
    std::size_t box_rows_ = 1;
};

/// One-shot smoothing (builds a Smoother internally).
[[nodiscard]] Field<std::complex<double>> smooth(const Field<std::complex<double>>& f,
                                                 const ScaleGrid& grid, double dt);
[[nodiscard]] Field<double> smooth(const Field<double>& f, const ScaleGrid& grid, double dt);

/// Lead/lag classes of the phase difference, with the conventional arrow
/// glyphs: → in phase, no lead; ↗ in phase, x leads; ↖ out of phase, y
/// leads; ↘ in phase, y leads; ↙ out of phase, x leads.
enum class PhaseClass : std::uint8_t {
    InPhaseNoLead,
    InPhaseXLeads,
    OutOfPhaseYLeads,
    InPhaseYLeads,
    OutOfPhaseXLeads,
};

[[nodiscard]] std::string_view phase_class_name(PhaseClass c);
[[nodiscard]] std::string_view phase_arrow(PhaseClass c);

/// Total classification of θ ∈ [−π, π]. Interior intervals follow the
/// five-case convention; boundaries are resolved half-open on the left:
/// 0 → no-lead, (0,π/2) → x leads, [π/2,π] → out-of-phase y leads,
/// [−π/2,0) → y leads, [−π,−π/2) → out-of-phase x leads.
/// Throws InvalidParameterError outside [−π, π].
[[nodiscard]] PhaseClass classify_phase(double theta);

struct CoherenceResult {
    Field<double> magnitude;                  // R in [0,1]
    Field<std::complex<double>> coherency;    // retained for partial coherence
    Field<double> phase;                      // four-quadrant angle in [−π,π]
    ScaleGrid grid;
    std::vector<double> coi;
    double dt = 1.0;
    std::optional<Field<std::uint8_t>> significance_mask;
    std::optional<Field<std::uint8_t>> degenerate_mask;  // partial coherence only

    [[nodiscard]] bool edge_safe(std::size_t scale_row, std::size_t time_index) const {
        return grid.scales[scale_row] < coi[time_index];
    }
};

/// Wavelet coherence R = |S(W_xy)| / (S(|Wx|²)^½ · S(|Wy|²)^½) with the
/// complex coherency and the phase of S(W_xy). Magnitudes exceeding 1 by
/// less than 1e−6 are clamped; larger excursions raise NumericalBlowupError.
/// Points with no smoothed power in either series are reported as zero
/// coherence.
[[nodiscard]] CoherenceResult coherence(std::span<const double> x, std::span<const double> y,
                                        double dt, const ScaleGrid& grid);
[[nodiscard]] CoherenceResult coherence(const TimeSeries& x, const TimeSeries& y,
                                        const ScaleGrid& grid);

/// Variant reusing a caller-owned smoother built for the same (grid, dt, n);
/// Monte Carlo loops call this once per surrogate pair.
[[nodiscard]] CoherenceResult coherence(std::span<const double> x, std::span<const double> y,
                                        double dt, const ScaleGrid& grid, const Smoother& sm);

/// Partial-coherence formula choice. `standard` removes the control series
/// via the multivariate regression form with complex coherencies; `printed`
/// reproduces a magnitude-only textbook variant whose denominator pairs
/// (x,y) with (y,z), kept for comparison studies. Phase always derives from
/// the standard complex numerator.
enum class PartialForm : std::uint8_t { standard, printed };

/// Coherence between x and y after removing the linear influence of z:
/// (C_xy − C_xz·conj(C_yz)) / sqrt((1−|C_xz|²)(1−|C_yz|²)). Points where a
/// control-pair coherence reaches 1 − 1e−9 have a vanishing denominator;
/// they are flagged in degenerate_mask and carry NaN magnitude/phase.
[[nodiscard]] CoherenceResult partial_coherence(std::span<const double> x,
                                                std::span<const double> y,
                                                std::span<const double> z, double dt,
                                                const ScaleGrid& grid,
                                                PartialForm form = PartialForm::standard);
[[nodiscard]] CoherenceResult partial_coherence(const TimeSeries& x, const TimeSeries& y,
                                                const TimeSeries& z, const ScaleGrid& grid,
                                                PartialForm form = PartialForm::standard);

}  // namespace wavecoh
