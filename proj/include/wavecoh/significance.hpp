#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wavecoh/coherence.hpp"
#include "wavecoh/field.hpp"
#include "wavecoh/rng.hpp"

namespace wavecoh {

/// First-order autoregressive null model x_t = mean + u_t,
/// u_t = phi·u_{t−1} + eps_t with eps ~ N(0, sigma²).
struct Ar1Model {
    double phi = 0.0;
    double sigma = 1.0;
    double mean = 0.0;
};

/// Moment fit: phi is the lag-1 sample autocorrelation clamped to [0, 0.999];
/// sigma is chosen so the surrogate's stationary variance matches the sample
/// variance. Throws DegenerateSeriesError for constant input and
/// SeriesTooShortError below the ingest minimum.
[[nodiscard]] Ar1Model fit_ar1(std::span<const double> x);

/// One surrogate draw of length n. The recursion starts from u = 0 and runs a
/// 100-step burn-in before emitting, so the output is effectively stationary.
/// Consumes exactly n + 100 normal deviates from rng.
[[nodiscard]] std::vector<double> ar1_surrogate(const Ar1Model& model, std::size_t n, Rng& rng);

struct SignificanceOptions {
    double alpha = 0.05;      // pointwise test level, must lie in (0,1)
    std::size_t runs = 300;   // surrogate pairs, minimum 100
    std::uint64_t seed = 0;   // substream root; results are seed-deterministic
    unsigned threads = 0;     // worker count, 0 = hardware concurrency
};

/// Per-scale-row null thresholds and the induced pointwise mask.
struct SignificanceField {
    std::vector<double> row_threshold;  // empirical (1−alpha) null quantile per scale row
    Field<std::uint8_t> mask;           // 1 where observed magnitude > row threshold
    double alpha = 0.05;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo significance test for wavelet coherence against independent
/// AR(1) surrogates fitted to x and y. Each run draws one surrogate pair,
/// computes its coherence on the observed grid, and contributes the
/// magnitudes at edge-safe points, pooled per scale row across all runs. The
/// threshold is the empirical (1−alpha) quantile of each row's pool; rows
/// with no edge-safe points get threshold 1 (nothing passes). The mask
/// compares every point of `observed` against its row threshold; callers
/// normally intersect it with edge_safe().
///
/// Runs execute in parallel; run r draws from Rng::substream(seed, r) and
/// pooled values are sorted before the quantile, so the result is identical
/// regardless of thread count or scheduling.
[[nodiscard]] SignificanceField coherence_significance(const CoherenceResult& observed,
                                                       std::span<const double> x,
                                                       std::span<const double> y,
                                                       const SignificanceOptions& opt = {});

/// Same null construction for partial coherence: three independent AR(1)
/// surrogates per run, partial coherence of the triple, row-pooled
/// quantiles. Degenerate surrogate points are skipped when pooling.
[[nodiscard]] SignificanceField partial_coherence_significance(
    const CoherenceResult& observed, std::span<const double> x, std::span<const double> y,
    std::span<const double> z, PartialForm form = PartialForm::standard,
    const SignificanceOptions& opt = {});

}  // namespace wavecoh
