#include "wavecoh/dwt.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "wavecoh/errors.hpp"

namespace wavecoh {
namespace {

// Wavelet (high-pass) filters at full double precision. D4 from the closed
// form (1±√3)/(4√2); LA-8 from spectral factorization of the 4-vanishing-
// moment product filter, least-asymmetric root selection.
const std::vector<double> kHaarH = {0.7071067811865476, -0.7071067811865476};

const std::vector<double> kD4H = {-0.12940952255126034, -0.2241438680420134,
                                  0.8365163037378077, -0.4829629131445341};

const std::vector<double> kLa8H = {0.032223100604051466, 0.012603967262031304,
                                   -0.09921954357663353, -0.29785779560530606,
                                   0.8037387518051321,   -0.497618667632775,
                                   -0.029635527646002493, 0.07576571478950221};

std::vector<double> qmf_scaling(const std::vector<double>& h) {
    const std::size_t L = h.size();
    std::vector<double> g(L);
    for (std::size_t l = 0; l < L; ++l) {
        const double sign = (l % 2 == 0) ? -1.0 : 1.0;  // (−1)^{l+1}
        g[l] = sign * h[L - l - 1];
    }
    return g;
}

// Tail index folded back into [0, n) by half-sample symmetric reflection:
// x[n], x[n+1], ... maps to x[n−1], x[n−2], ..., bouncing as often as needed.
std::size_t reflect_index(std::size_t i, std::size_t n) {
    const std::size_t period = 2 * n;
    std::size_t j = i % period;
    return j < n ? j : period - 1 - j;
}

// One analysis stage: M even inputs -> M/2 wavelet and M/2 scaling outputs.
void pyramid_stage(const std::vector<double>& v_in, const WaveletFilter& f,
                   std::vector<double>& w_out, std::vector<double>& v_out) {
    const std::size_t m = v_in.size();
    const std::size_t half = m / 2;
    const std::size_t L = f.length();
    w_out.assign(half, 0.0);
    v_out.assign(half, 0.0);
    for (std::size_t t = 0; t < half; ++t) {
        std::size_t u = 2 * t + 1;
        double w = f.h[0] * v_in[u];
        double v = f.g[0] * v_in[u];
        for (std::size_t l = 1; l < L; ++l) {
            u = (u == 0) ? m - 1 : u - 1;
            w += f.h[l] * v_in[u];
            v += f.g[l] * v_in[u];
        }
        w_out[t] = w;
        v_out[t] = v;
    }
}

// One synthesis stage: exact transpose of pyramid_stage.
void pyramid_stage_inverse(const std::vector<double>& w_in, const std::vector<double>& v_in,
                           const WaveletFilter& f, std::vector<double>& v_out) {
    const std::size_t half = w_in.size();
    const std::size_t m = 2 * half;
    const std::size_t L = f.length();
    v_out.assign(m, 0.0);
    for (std::size_t t = 0; t < half; ++t) {
        std::size_t u = 2 * t + 1;
        v_out[u] += f.h[0] * w_in[t] + f.g[0] * v_in[t];
        for (std::size_t l = 1; l < L; ++l) {
            u = (u == 0) ? m - 1 : u - 1;
            v_out[u] += f.h[l] * w_in[t] + f.g[l] * v_in[t];
        }
    }
}

}  // namespace

WaveletFilter make_filter(FilterKind kind) {
    WaveletFilter f;
    switch (kind) {
        case FilterKind::haar:
            f.name = "haar";
            f.h = kHaarH;
            break;
        case FilterKind::d4:
            f.name = "d4";
            f.h = kD4H;
            break;
        case FilterKind::la8:
            f.name = "la8";
            f.h = kLa8H;
            break;
    }
    f.g = qmf_scaling(f.h);
    return f;
}

WaveletFilter make_filter(std::string_view name) {
    if (name == "haar") return make_filter(FilterKind::haar);
    if (name == "d4") return make_filter(FilterKind::d4);
    if (name == "la8") return make_filter(FilterKind::la8);
    throw UnknownFilterError(std::string(name));
}

std::size_t max_level(std::size_t n, std::size_t filter_length) {
    if (filter_length < 2) throw InvalidParameterError("filter length must be at least 2");
    if (n < filter_length) {
        throw SeriesShorterThanFilterError("series length " + std::to_string(n) +
                                           " shorter than filter width " +
                                           std::to_string(filter_length));
    }
    const double ratio = static_cast<double>(n - 1) / static_cast<double>(filter_length - 1) + 1.0;
    return static_cast<std::size_t>(std::floor(std::log2(ratio)));
}

double DwtDecomposition::coefficient_energy() const {
    double total = 0.0;
    for (const auto& w : levels)
        for (double c : w) total += c * c;
    for (double c : final_v) total += c * c;
    return total;
}

DwtDecomposition dwt_forward(std::span<const double> x, std::size_t J,
                             const WaveletFilter& filter) {
    const std::size_t n = x.size();
    const std::size_t L = filter.length();
    if (n < L) {
        throw SeriesShorterThanFilterError("series length " + std::to_string(n) +
                                           " shorter than filter width " + std::to_string(L));
    }
    if (J == 0) throw LevelTooDeepError("decomposition level must be at least 1");
    // 2^J may not exceed n: padding then at most doubles the series, and the
    // deepest stage still receives at least one full dyadic block.
    if (J >= 64 || (std::size_t{1} << J) > n) {
        throw LevelTooDeepError("level " + std::to_string(J) + " too deep for length " +
                                std::to_string(n));
    }

    const std::size_t block = std::size_t{1} << J;
    const std::size_t n_padded = ((n + block - 1) / block) * block;

    std::vector<double> v(n_padded);
    for (std::size_t i = 0; i < n_padded; ++i) v[i] = x[reflect_index(i, n)];

    DwtDecomposition d;
    d.J = J;
    d.filter = filter;
    d.n_original = n;
    d.n_padded = n_padded;
    d.levels.resize(J);

    std::vector<double> v_next;
    for (std::size_t j = 0; j < J; ++j) {
        pyramid_stage(v, filter, d.levels[j], v_next);
        v.swap(v_next);
    }
    d.final_v = std::move(v);
    return d;
}

std::vector<double> dwt_inverse_padded(const DwtDecomposition& d) {
    std::vector<double> v = d.final_v;
    std::vector<double> v_prev;
    for (std::size_t j = d.J; j-- > 0;) {
        pyramid_stage_inverse(d.levels[j], v, d.filter, v_prev);
        v.swap(v_prev);
    }
    return v;
}

std::vector<double> dwt_inverse(const DwtDecomposition& d) {
    std::vector<double> v = dwt_inverse_padded(d);
    v.resize(d.n_original);
    return v;
}

}  // namespace wavecoh
