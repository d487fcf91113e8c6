#include "wavecoh/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wavecoh/errors.hpp"
#include "wavecoh/rng.hpp"

namespace wavecoh {
namespace {

constexpr double kSmoothingEps = 1e-12;

// Wavelet-band energy treated as zero when it is this small relative to the
// full decomposition energy; catches constant series whose W_j are pure
// rounding residue without misclassifying genuinely weak signals.
constexpr double kZeroEnergyRel = 1e-24;

double raise(ExpBase base, double exponent) {
    return base == ExpBase::natural ? std::exp(exponent) : std::exp2(exponent);
}

double wn_reference_entropy(const WnReference& wn, std::span<const double> x, std::size_t J,
                            const WaveletFilter& filter) {
    if (wn.mode == WnReference::Mode::analytic) return std::log(static_cast<double>(J));
    if (wn.runs == 0) throw InvalidParameterError("montecarlo reference needs at least one run");
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double best = 0.0;
    std::vector<double> noise(x.size());
    for (std::size_t k = 0; k < wn.runs; ++k) {
        Rng rng = Rng::substream(wn.seed, k);
        for (double& v : noise) v = rng.normal(mean, 1.0);
        const double we = wavelet_entropy(energy_distribution(dwt_forward(noise, J, filter)));
        best = std::max(best, we);
    }
    return best;
}

EntropyReport finish_report(double we, double we_wn, ExpBase base, const WnReference& wn,
                            bool smoothed) {
    EntropyReport r;
    r.we = we;
    r.we_wn = we_wn;
    r.measure = predictability_measure(we, we_wn, base);
    r.base = base;
    r.wn = wn;
    r.smoothed = smoothed;
    r.negative = r.measure < 0.0;
    return r;
}

}  // namespace

double predictability_measure(double we, double we_wn, ExpBase base) {
    return 1.0 - raise(base, we - we_wn);
}

EnergyDistribution energy_distribution(const DwtDecomposition& d) {
    EnergyDistribution dist;
    dist.e.resize(d.J);
    double total = 0.0;
    for (std::size_t j = 0; j < d.J; ++j) {
        double band = 0.0;
        for (double c : d.levels[j]) band += c * c;
        dist.e[j] = band;
        total += band;
    }
    double grand = total;
    for (double c : d.final_v) grand += c * c;
    if (!(total > grand * kZeroEnergyRel) || total <= 0.0) {
        throw ZeroEnergyError("wavelet levels carry no energy (constant or zero series)");
    }
    for (double& e : dist.e) e /= total;
    return dist;
}

double wavelet_entropy(const EnergyDistribution& dist) {
    if (dist.e.empty()) throw InvalidParameterError("empty energy distribution");
    double sum = 0.0;
    for (double e : dist.e) {
        if (e < -1e-12) throw InvalidParameterError("negative energy share");
        sum += e;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw InvalidParameterError("energy shares must sum to 1");
    double we = 0.0;
    for (double e : dist.e) {
        if (e > 0.0) we -= e * std::log(e);
    }
    return we;
}

double kl_entropy(const EnergyDistribution& ey, const EnergyDistribution& ex) {
    bool smoothed = false;
    return kl_entropy(ey, ex, smoothed);
}

double kl_entropy(const EnergyDistribution& ey, const EnergyDistribution& ex, bool& smoothed) {
    const std::size_t J = ey.levels();
    if (J != ex.levels()) {
        throw IncompatibleLevelsError("level counts differ: " + std::to_string(J) + " vs " +
                                      std::to_string(ex.levels()));
    }
    if (J == 0) throw InvalidParameterError("empty energy distribution");

    smoothed = false;
    for (std::size_t j = 0; j < J; ++j) {
        if (ey.e[j] > 0.0 && ex.e[j] <= 0.0) {
            smoothed = true;
            break;
        }
    }

    std::vector<double> py(ey.e), px(ex.e);
    if (smoothed) {
        const double norm = 1.0 + static_cast<double>(J) * kSmoothingEps;
        for (std::size_t j = 0; j < J; ++j) {
            py[j] = (py[j] + kSmoothingEps) / norm;
            px[j] = (px[j] + kSmoothingEps) / norm;
        }
    }

    double kl = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
        if (py[j] > 0.0) kl += py[j] * std::log(py[j] / px[j]);
    }
    // Nonnegative by Gibbs' inequality; trim rounding residue only.
    return kl < 0.0 && kl > -1e-12 ? 0.0 : kl;
}

EntropyReport weem(std::span<const double> x, std::size_t J, const WaveletFilter& filter,
                   ExpBase base, const WnReference& wn) {
    const double we = wavelet_entropy(energy_distribution(dwt_forward(x, J, filter)));
    const double we_wn = wn_reference_entropy(wn, x, J, filter);
    return finish_report(we, we_wn, base, wn, false);
}

EntropyReport cweem(std::span<const double> x, std::span<const double> y, std::size_t J,
                    const WaveletFilter& filter, ExpBase base, const WnReference& wn) {
    if (x.size() != y.size()) {
        throw LengthMismatchError("series lengths differ: " + std::to_string(x.size()) + " vs " +
                                  std::to_string(y.size()));
    }
    const EnergyDistribution ex = energy_distribution(dwt_forward(x, J, filter));
    const EnergyDistribution ey = energy_distribution(dwt_forward(y, J, filter));
    bool smoothed = false;
    const double kl = kl_entropy(ey, ex, smoothed);
    const double we_wn = wn_reference_entropy(wn, x, J, filter);
    return finish_report(kl, we_wn, base, wn, smoothed);
}

}  // namespace wavecoh
