#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wavecoh/dwt.hpp"

namespace wavecoh {

/// Relative energy shares of the wavelet levels W_1..W_J. The final scaling
/// block V_J carries trend/mean energy and is excluded by construction.
struct EnergyDistribution {
    std::vector<double> e;

    [[nodiscard]] std::size_t levels() const noexcept { return e.size(); }
};

/// Exponent base for the predictability measures. Entropies themselves are
/// always in nats.
enum class ExpBase { natural, two };

/// White-noise reference entropy: closed-form ln J, or the maximum entropy
/// over K simulated white-noise series (slower, tracks the actual dyadic
/// energy profile of sampled noise instead of the uniform ideal).
struct WnReference {
    enum class Mode { analytic, montecarlo };

    Mode mode = Mode::analytic;
    std::size_t runs = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] static WnReference analytic() { return {}; }
    [[nodiscard]] static WnReference montecarlo(std::size_t runs, std::uint64_t seed) {
        return {Mode::montecarlo, runs, seed};
    }
};

struct EntropyReport {
    double we = 0.0;       // entropy driving the measure: WE_x, or the KL divergence
    double we_wn = 0.0;    // white-noise reference entropy
    double measure = 0.0;  // 1 − B^(we − we_wn)
    ExpBase base = ExpBase::natural;
    WnReference wn;
    bool smoothed = false;  // KL smoothing was needed (cross measure only)
    bool negative = false;  // measure fell below 0 (less predictable than reference)
};

/// Energy shares per wavelet level. Throws ZeroEnergyError when the wavelet
/// bands carry no energy relative to the whole decomposition (constant or
/// all-zero input).
[[nodiscard]] EnergyDistribution energy_distribution(const DwtDecomposition& d);

/// Shannon entropy −Σ E_j ln E_j in nats; zero shares contribute zero.
/// Result lies in [0, ln J].
[[nodiscard]] double wavelet_entropy(const EnergyDistribution& dist);

/// Kullback-Leibler divergence Σ E_j^y ln(E_j^y / E_j^x) in nats. When ey
/// puts mass where ex has none, both distributions receive additive
/// smoothing eps = 1e−12 and are renormalized; `smoothed` (if given) records
/// that. Throws IncompatibleLevelsError on level-count mismatch.
[[nodiscard]] double kl_entropy(const EnergyDistribution& ey, const EnergyDistribution& ex);
[[nodiscard]] double kl_entropy(const EnergyDistribution& ey, const EnergyDistribution& ex,
                                bool& smoothed);

/// The measure core 1 − B^(we − we_wn) shared by weem and cweem, exposed so
/// externally supplied entropies (e.g. closed-form references) can be mapped
/// without running a decomposition.
[[nodiscard]] double predictability_measure(double we, double we_wn,
                                            ExpBase base = ExpBase::natural);

/// Intrinsic-predictability measure 1 − B^(WE_x − WE_wn) from the level
/// energy distribution of x. In [0,1] under the analytic reference.
[[nodiscard]] EntropyReport weem(std::span<const double> x, std::size_t J,
                                 const WaveletFilter& filter, ExpBase base = ExpBase::natural,
                                 const WnReference& wn = WnReference::analytic());

/// Cross-series predictability 1 − B^(WE_{y|x} − WE_wn), where WE_{y|x} is
/// the KL divergence of y's level energies against x's. Range (−∞, 1];
/// negative values are returned as computed and flagged.
[[nodiscard]] EntropyReport cweem(std::span<const double> x, std::span<const double> y,
                                  std::size_t J, const WaveletFilter& filter,
                                  ExpBase base = ExpBase::two,
                                  const WnReference& wn = WnReference::analytic());

}  // namespace wavecoh
