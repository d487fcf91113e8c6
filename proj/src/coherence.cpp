#include "wavecoh/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "coherence_detail.hpp"
#include "fft.hpp"
#include "wavecoh/errors.hpp"

namespace wavecoh {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;
constexpr double kMagnitudeSlack = 1e-6;   // clamp window above 1 before declaring a bug
constexpr double kDegenerate = 1.0 - 1e-9;  // control coherence treated as total
constexpr std::size_t kDirectKernelLimit = 64;  // taps; longer kernels go through FFT

// Power this far beneath the field's peak is rounding residue (a pure tone
// leaves ~1e-28 of its peak at remote scales), and ratios of residue can
// stray past the blowup slack. Such points report zero coherency, the same
// as exactly vanished power. Genuine spectra sit many orders above this.
constexpr double kRelPowerFloor = 1e-20;

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

void check_same_shape(const CwtField& a, const CwtField& b) {
    if (!a.grid.same_as(b.grid) || a.n() != b.n() || a.dt != b.dt) {
        throw GridMismatchError("wavelet fields differ in grid, length, or sampling interval");
    }
}

}  // namespace

CwtField xwt(const CwtField& wx, const CwtField& wy) {
    check_same_shape(wx, wy);
    CwtField out;
    out.grid = wx.grid;
    out.dt = wx.dt;
    out.coi = wx.coi;
    out.coefficients = Field<std::complex<double>>(wx.coefficients.rows(), wx.coefficients.cols());
    for (std::size_t i = 0; i < out.coefficients.size(); ++i) {
        out.coefficients.data()[i] =
            wx.coefficients.data()[i] * std::conj(wy.coefficients.data()[i]);
    }
    return out;
}

Smoother::Smoother(const ScaleGrid& grid, double dt, std::size_t n) : cols_(n) {
    if (grid.scales.empty()) throw InvalidGridError("empty scale grid");
    if (n == 0) throw InvalidParameterError("empty field");

    // Boxcar span 0.6·s in scale translates to a fixed row count on a
    // log2-uniform grid: 0.6/(dj·ln 2), rounded to the nearest odd integer.
    const double span_rows = 0.6 / (grid.dj * std::numbers::ln2);
    const auto half_box = static_cast<std::size_t>(std::lround(std::max(0.0, (span_rows - 1.0) / 2.0)));
    box_rows_ = 2 * half_box + 1;

    rows_.resize(grid.num_scales());
    for (std::size_t j = 0; j < grid.num_scales(); ++j) {
        RowPlan& plan = rows_[j];
        const double s = grid.scales[j];
        const auto reach = static_cast<std::size_t>(std::floor(4.0 * s / dt + 1e-9));
        plan.half = std::min(reach, n - 1);
        plan.weights.resize(2 * plan.half + 1);
        for (std::size_t k = 0; k <= 2 * plan.half; ++k) {
            const double t = (static_cast<double>(k) - static_cast<double>(plan.half)) * dt;
            plan.weights[k] = std::exp(-t * t / (2.0 * s * s));
        }

        plan.inv_norm.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t lo = plan.half > i ? plan.half - i : 0;
            const std::size_t hi = std::min(2 * plan.half, plan.half + (n - 1 - i));
            double sum = 0.0;
            for (std::size_t k = lo; k <= hi; ++k) sum += plan.weights[k];
            plan.inv_norm[i] = 1.0 / sum;
        }

        plan.use_fft = plan.half > kDirectKernelLimit;
        if (plan.use_fft) {
            plan.conv_len = detail::next_pow2(n + 2 * plan.half);
            std::vector<std::complex<double>> kern(plan.conv_len, {0.0, 0.0});
            for (std::size_t k = 0; k <= 2 * plan.half; ++k) kern[k] = {plan.weights[k], 0.0};
            detail::fft_forward(kern);
            plan.kernel_spectrum = std::move(kern);
        }
    }
}

void Smoother::smooth_row(const RowPlan& plan, const std::complex<double>* in,
                          std::complex<double>* out) const {
    const std::size_t n = cols_;
    if (!plan.use_fft) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t lo = plan.half > i ? plan.half - i : 0;
            const std::size_t hi = std::min(2 * plan.half, plan.half + (n - 1 - i));
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t k = lo; k <= hi; ++k) {
                acc += plan.weights[k] * in[i + k - plan.half];
            }
            out[i] = acc * plan.inv_norm[i];
        }
        return;
    }
    static thread_local std::vector<std::complex<double>> buf;
    buf.assign(plan.conv_len, {0.0, 0.0});
    std::copy(in, in + n, buf.begin());
    detail::fft_forward(buf);
    for (std::size_t k = 0; k < plan.conv_len; ++k) buf[k] *= plan.kernel_spectrum[k];
    detail::fft_inverse(buf);
    for (std::size_t i = 0; i < n; ++i) out[i] = buf[i + plan.half] * plan.inv_norm[i];
}

Field<std::complex<double>> Smoother::apply(const Field<std::complex<double>>& f) const {
    return apply_rows(f, f.rows());
}

Field<std::complex<double>> Smoother::apply_rows(const Field<std::complex<double>>& f,
                                                 std::size_t out_rows) const {
    if (f.rows() != rows_.size() || f.cols() != cols_) {
        throw GridMismatchError("field shape does not match the smoother's grid");
    }
    out_rows = std::min(out_rows, f.rows());
    const auto hb = static_cast<std::ptrdiff_t>(box_rows_ / 2);

    // Time smoothing feeds the boxcar, so one halo of extra rows is needed
    // beyond the requested band.
    const std::size_t need =
        out_rows == 0 ? 0 : std::min(f.rows(), out_rows + static_cast<std::size_t>(hb));
    Field<std::complex<double>> tmp(f.rows(), f.cols());
    for (std::size_t j = 0; j < need; ++j) smooth_row(rows_[j], f.row(j), tmp.row(j));

    // Column-wise boxcar across scales, renormalized over in-range rows.
    // Summed fresh per output row: row magnitudes span many orders across
    // the grid, and a sliding add/subtract window would leave cancellation
    // residue from large rows that swamps the small ones.
    Field<std::complex<double>> out(f.rows(), f.cols());
    const auto rows = static_cast<std::ptrdiff_t>(f.rows());
    const std::size_t cols = f.cols();
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(out_rows); ++j) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, j - hb);
        const std::ptrdiff_t hi = std::min(rows - 1, j + hb);
        const double inv = 1.0 / static_cast<double>(hi - lo + 1);
        std::complex<double>* dst = out.row(static_cast<std::size_t>(j));
        for (std::ptrdiff_t m = lo; m <= hi; ++m) {
            const std::complex<double>* src = tmp.row(static_cast<std::size_t>(m));
            for (std::size_t i = 0; i < cols; ++i) dst[i] += src[i];
        }
        for (std::size_t i = 0; i < cols; ++i) dst[i] *= inv;
    }
    return out;
}

Field<double> Smoother::apply(const Field<double>& f) const {
    // Routed through the complex path so that real fields (power spectra) and
    // complex cross spectra undergo identical arithmetic; self-coherence then
    // cancels to 1 at rounding level.
    Field<std::complex<double>> wrapped(f.rows(), f.cols());
    for (std::size_t i = 0; i < f.size(); ++i) wrapped.data()[i] = {f.data()[i], 0.0};
    const Field<std::complex<double>> smoothed = apply(wrapped);
    Field<double> out(f.rows(), f.cols());
    for (std::size_t i = 0; i < f.size(); ++i) out.data()[i] = smoothed.data()[i].real();
    return out;
}

Field<std::complex<double>> smooth(const Field<std::complex<double>>& f, const ScaleGrid& grid,
                                   double dt) {
    return Smoother(grid, dt, f.cols()).apply(f);
}

Field<double> smooth(const Field<double>& f, const ScaleGrid& grid, double dt) {
    return Smoother(grid, dt, f.cols()).apply(f);
}

std::string_view phase_class_name(PhaseClass c) {
    switch (c) {
        case PhaseClass::InPhaseNoLead: return "InPhaseNoLead";
        case PhaseClass::InPhaseXLeads: return "InPhaseXLeads";
        case PhaseClass::OutOfPhaseYLeads: return "OutOfPhaseYLeads";
        case PhaseClass::InPhaseYLeads: return "InPhaseYLeads";
        case PhaseClass::OutOfPhaseXLeads: return "OutOfPhaseXLeads";
    }
    return "?";
}

std::string_view phase_arrow(PhaseClass c) {
    switch (c) {
        case PhaseClass::InPhaseNoLead: return "→";
        case PhaseClass::InPhaseXLeads: return "↗";
        case PhaseClass::OutOfPhaseYLeads: return "↖";
        case PhaseClass::InPhaseYLeads: return "↘";
        case PhaseClass::OutOfPhaseXLeads: return "↙";
    }
    return "?";
}

PhaseClass classify_phase(double theta) {
    if (!(theta >= -kPi && theta <= kPi)) {
        throw InvalidParameterError("phase out of range [-pi, pi]");
    }
    if (theta == 0.0) return PhaseClass::InPhaseNoLead;
    if (theta > 0.0) {
        return theta < kHalfPi ? PhaseClass::InPhaseXLeads : PhaseClass::OutOfPhaseYLeads;
    }
    return theta >= -kHalfPi ? PhaseClass::InPhaseYLeads : PhaseClass::OutOfPhaseXLeads;
}

namespace {

constexpr std::size_t kAllRows = static_cast<std::size_t>(-1);

Field<std::complex<double>> smoothed_cross(const CwtField& wa, const CwtField& wb,
                                           const Smoother& sm, std::size_t out_rows = kAllRows) {
    Field<std::complex<double>> prod(wa.coefficients.rows(), wa.coefficients.cols());
    for (std::size_t i = 0; i < prod.size(); ++i) {
        prod.data()[i] = wa.coefficients.data()[i] * std::conj(wb.coefficients.data()[i]);
    }
    return sm.apply_rows(prod, out_rows);
}

// Both power spectra ride through one smoothing pass: the kernels are real,
// so the channels only mix at rounding level, far below any tolerance here.
// Real part carries S(|Wa|²), imaginary part S(|Wb|²).
Field<std::complex<double>> smoothed_power_pair(const CwtField& wa, const CwtField& wb,
                                                const Smoother& sm,
                                                std::size_t out_rows = kAllRows) {
    Field<std::complex<double>> p(wa.coefficients.rows(), wa.coefficients.cols());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p.data()[i] = {std::norm(wa.coefficients.data()[i]),
                       std::norm(wb.coefficients.data()[i])};
    }
    return sm.apply_rows(p, out_rows);
}

// Normalized coherency C = S(W_ab) / sqrt(S(|Wa|²)·S(|Wb|²)); zero where
// either smoothed power vanishes or falls below the rounding floor.
Field<std::complex<double>> coherency_of(const Field<std::complex<double>>& cross,
                                         const Field<double>& saa, const Field<double>& sbb) {
    double peak = 0.0;
    for (std::size_t i = 0; i < saa.size(); ++i) {
        peak = std::max({peak, saa.data()[i], sbb.data()[i]});
    }
    const double cutoff = peak * kRelPowerFloor;
    Field<std::complex<double>> c(cross.rows(), cross.cols());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double a = saa.data()[i];
        const double b = sbb.data()[i];
        if (!(a > cutoff) || !(b > cutoff)) {
            c.data()[i] = {0.0, 0.0};
            continue;
        }
        c.data()[i] = cross.data()[i] / (std::sqrt(a) * std::sqrt(b));
    }
    return c;
}

Field<std::complex<double>> coherency_of(const Field<std::complex<double>>& cross,
                                         const Field<std::complex<double>>& packed_power) {
    double peak = 0.0;
    for (std::size_t i = 0; i < packed_power.size(); ++i) {
        peak = std::max({peak, packed_power.data()[i].real(), packed_power.data()[i].imag()});
    }
    const double cutoff = peak * kRelPowerFloor;
    Field<std::complex<double>> c(cross.rows(), cross.cols());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double a = packed_power.data()[i].real();
        const double b = packed_power.data()[i].imag();
        if (!(a > cutoff) || !(b > cutoff)) {
            c.data()[i] = {0.0, 0.0};
            continue;
        }
        c.data()[i] = cross.data()[i] / (std::sqrt(a) * std::sqrt(b));
    }
    return c;
}

void clamp_or_throw(double& magnitude, std::size_t row, std::size_t col) {
    if (magnitude > 1.0 + kMagnitudeSlack) {
        throw NumericalBlowupError("coherence magnitude " + std::to_string(magnitude) +
                                   " at scale row " + std::to_string(row) + ", time " +
                                   std::to_string(col) + " exceeds 1 beyond rounding slack");
    }
    if (magnitude > 1.0) magnitude = 1.0;
}

}  // namespace

CoherenceResult coherence(std::span<const double> x, std::span<const double> y, double dt,
                          const ScaleGrid& grid) {
    return coherence(x, y, dt, grid, Smoother(grid, dt, x.size()));
}

CoherenceResult coherence(std::span<const double> x, std::span<const double> y, double dt,
                          const ScaleGrid& grid, const Smoother& sm) {
    if (x.size() != y.size()) {
        throw LengthMismatchError("series lengths differ: " + std::to_string(x.size()) + " vs " +
                                  std::to_string(y.size()));
    }
    const CwtField wx = cwt(x, dt, grid);
    const CwtField wy = cwt(y, dt, grid);

    const Field<std::complex<double>> cross = smoothed_cross(wx, wy, sm);
    const Field<std::complex<double>> spow = smoothed_power_pair(wx, wy, sm);

    CoherenceResult r;
    r.grid = grid;
    r.coi = wx.coi;
    r.dt = dt;
    r.coherency = coherency_of(cross, spow);
    r.magnitude = Field<double>(cross.rows(), cross.cols());
    r.phase = Field<double>(cross.rows(), cross.cols());
    for (std::size_t j = 0; j < cross.rows(); ++j) {
        for (std::size_t i = 0; i < cross.cols(); ++i) {
            const std::complex<double> num = cross(j, i);
            const double raw = std::abs(r.coherency(j, i));
            double mag = raw;
            clamp_or_throw(mag, j, i);
            if (raw > 1.0) r.coherency(j, i) /= raw;  // keep |coherency| == magnitude
            r.magnitude(j, i) = mag;
            r.phase(j, i) = (num == std::complex<double>{0.0, 0.0})
                                ? 0.0
                                : std::atan2(num.imag(), num.real());
        }
    }
    return r;
}

CoherenceResult coherence(const TimeSeries& x, const TimeSeries& y, const ScaleGrid& grid) {
    if (x.dt != y.dt) throw GridMismatchError("series sampling intervals differ");
    return coherence(std::span<const double>(x.values), std::span<const double>(y.values), x.dt,
                     grid);
}

namespace detail {

Field<double> coherence_magnitude(std::span<const double> x, std::span<const double> y, double dt,
                                  const ScaleGrid& grid, const Smoother& sm) {
    if (x.size() != y.size()) {
        throw LengthMismatchError("series lengths differ: " + std::to_string(x.size()) + " vs " +
                                  std::to_string(y.size()));
    }
    const CwtField wx = cwt(x, dt, grid);
    const CwtField wy = cwt(y, dt, grid);

    // Rows whose scale tops the cone everywhere have no edge-safe points, so
    // their magnitudes are never pooled; skip their smoothing cost and leave
    // them zero.
    double coi_max = 0.0;
    for (double c : wx.coi) coi_max = std::max(coi_max, c);
    std::size_t live = 0;
    for (std::size_t j = 0; j < grid.num_scales(); ++j) {
        if (grid.scales[j] < coi_max) live = j + 1;
    }

    const Field<std::complex<double>> cross = smoothed_cross(wx, wy, sm, live);
    const Field<std::complex<double>> spow = smoothed_power_pair(wx, wy, sm, live);

    double peak = 0.0;
    for (std::size_t i = 0; i < spow.size(); ++i) {
        peak = std::max({peak, spow.data()[i].real(), spow.data()[i].imag()});
    }
    const double cutoff = peak * kRelPowerFloor;

    Field<double> mag(cross.rows(), cross.cols());
    for (std::size_t j = 0; j < live; ++j) {
        for (std::size_t i = 0; i < cross.cols(); ++i) {
            const double a = spow(j, i).real();
            const double b = spow(j, i).imag();
            if (!(a > cutoff) || !(b > cutoff)) {
                mag(j, i) = 0.0;
                continue;
            }
            double m = std::abs(cross(j, i) / (std::sqrt(a) * std::sqrt(b)));
            clamp_or_throw(m, j, i);
            mag(j, i) = m;
        }
    }
    return mag;
}

}  // namespace detail

CoherenceResult partial_coherence(std::span<const double> x, std::span<const double> y,
                                  std::span<const double> z, double dt, const ScaleGrid& grid,
                                  PartialForm form) {
    if (x.size() != y.size() || x.size() != z.size()) {
        throw LengthMismatchError("partial coherence requires three equal-length series");
    }
    const CwtField wx = cwt(x, dt, grid);
    const CwtField wy = cwt(y, dt, grid);
    const CwtField wz = cwt(z, dt, grid);
    const Smoother sm(grid, dt, x.size());

    const Field<std::complex<double>> pxy = smoothed_power_pair(wx, wy, sm);
    const Field<std::complex<double>> pzz = smoothed_power_pair(wz, wz, sm);
    Field<double> sxx(pxy.rows(), pxy.cols()), syy(pxy.rows(), pxy.cols());
    Field<double> szz(pxy.rows(), pxy.cols());
    for (std::size_t i = 0; i < pxy.size(); ++i) {
        sxx.data()[i] = pxy.data()[i].real();
        syy.data()[i] = pxy.data()[i].imag();
        szz.data()[i] = pzz.data()[i].real();
    }
    const Field<std::complex<double>> cxy = coherency_of(smoothed_cross(wx, wy, sm), sxx, syy);
    const Field<std::complex<double>> cxz = coherency_of(smoothed_cross(wx, wz, sm), sxx, szz);
    const Field<std::complex<double>> cyz = coherency_of(smoothed_cross(wy, wz, sm), syy, szz);

    CoherenceResult r;
    r.grid = grid;
    r.coi = wx.coi;
    r.dt = dt;
    r.magnitude = Field<double>(cxy.rows(), cxy.cols());
    r.phase = Field<double>(cxy.rows(), cxy.cols());
    r.coherency = Field<std::complex<double>>(cxy.rows(), cxy.cols());
    r.degenerate_mask = Field<std::uint8_t>(cxy.rows(), cxy.cols(), 0);

    for (std::size_t j = 0; j < cxy.rows(); ++j) {
        for (std::size_t i = 0; i < cxy.cols(); ++i) {
            const std::complex<double> xy = cxy(j, i);
            const std::complex<double> xz = cxz(j, i);
            const std::complex<double> yz = cyz(j, i);
            const double axz = std::abs(xz);
            const double ayz = std::abs(yz);
            const double axy = std::abs(xy);

            const bool degenerate = (form == PartialForm::standard)
                                        ? (axz >= kDegenerate || ayz >= kDegenerate)
                                        : (axy >= kDegenerate || ayz >= kDegenerate);
            if (degenerate) {
                (*r.degenerate_mask)(j, i) = 1;
                r.magnitude(j, i) = nan_value();
                r.phase(j, i) = nan_value();
                r.coherency(j, i) = {nan_value(), nan_value()};
                continue;
            }

            const std::complex<double> numer = xy - xz * std::conj(yz);
            if (form == PartialForm::standard) {
                const double d2 =
                    std::max(0.0, 1.0 - axz * axz) * std::max(0.0, 1.0 - ayz * ayz);
                std::complex<double> pc = numer / std::sqrt(d2);
                const double raw = std::abs(pc);
                double mag = raw;
                clamp_or_throw(mag, j, i);
                if (raw > 1.0) pc /= raw;
                r.magnitude(j, i) = mag;
                r.coherency(j, i) = pc;
                r.phase(j, i) = (numer == std::complex<double>{0.0, 0.0})
                                    ? 0.0
                                    : std::atan2(numer.imag(), numer.real());
            } else {
                // Magnitude-only variant; can exceed 1 by construction, so it
                // is clamped rather than treated as a numerical fault.
                const double d2 =
                    std::max(0.0, 1.0 - axy * axy) * std::max(0.0, 1.0 - ayz * ayz);
                const double mag = std::abs(axy - axz * ayz) / std::sqrt(d2);
                r.magnitude(j, i) = std::min(mag, 1.0);
                r.coherency(j, i) = numer;
                r.phase(j, i) = (numer == std::complex<double>{0.0, 0.0})
                                    ? 0.0
                                    : std::atan2(numer.imag(), numer.real());
            }
        }
    }
    return r;
}

CoherenceResult partial_coherence(const TimeSeries& x, const TimeSeries& y, const TimeSeries& z,
                                  const ScaleGrid& grid, PartialForm form) {
    if (x.dt != y.dt || x.dt != z.dt) throw GridMismatchError("series sampling intervals differ");
    return partial_coherence(std::span<const double>(x.values), std::span<const double>(y.values),
                             std::span<const double>(z.values), x.dt, grid, form);
}

}  // namespace wavecoh
