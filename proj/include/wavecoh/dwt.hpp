#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wavecoh {

enum class FilterKind { haar, d4, la8 };

/// Orthonormal wavelet/scaling filter pair. `h` is the wavelet (high-pass)
/// filter; `g` is derived from it by the quadrature mirror relation
/// g_l = (−1)^{l+1} h_{L−l−1}.
struct WaveletFilter {
    std::string name;
    std::vector<double> h;
    std::vector<double> g;

    [[nodiscard]] std::size_t length() const noexcept { return h.size(); }
};

[[nodiscard]] WaveletFilter make_filter(FilterKind kind);

/// Parses "haar" | "d4" | "la8". Throws UnknownFilterError otherwise.
[[nodiscard]] WaveletFilter make_filter(std::string_view name);

/// Deepest admissible decomposition level for a series of length n and a
/// filter of width L: floor(log2((n−1)/(L−1) + 1)).
/// Throws SeriesShorterThanFilterError when n < L.
[[nodiscard]] std::size_t max_level(std::size_t n, std::size_t filter_length);

/// Full pyramid decomposition. `levels[j-1]` holds the level-j wavelet
/// coefficients (N/2^j of them over the padded length N); `final_v` holds the
/// level-J scaling coefficients. Energy is conserved on the padded domain:
/// Σ_j ‖W_j‖² + ‖V_J‖² = ‖X_padded‖².
struct DwtDecomposition {
    std::vector<std::vector<double>> levels;
    std::vector<double> final_v;
    std::size_t J = 0;
    WaveletFilter filter;
    std::size_t n_original = 0;
    std::size_t n_padded = 0;  // padding method: symmetric reflection at the tail

    [[nodiscard]] double coefficient_energy() const;
};

/// Pyramid analysis after symmetric-reflection padding of x to the next
/// multiple of 2^J. Stage recursion uses circular (mod) indexing.
/// Throws LevelTooDeepError when J is 0 or 2^J exceeds the series length
/// (padding never more than doubles the data); SeriesShorterThanFilterError
/// when x is shorter than the filter.
[[nodiscard]] DwtDecomposition dwt_forward(std::span<const double> x, std::size_t J,
                                           const WaveletFilter& filter);

/// Inverse pyramid; reconstructs the padded series and strips the padding.
[[nodiscard]] std::vector<double> dwt_inverse(const DwtDecomposition& d);

/// Inverse pyramid without stripping the padding (padded-domain round trip).
[[nodiscard]] std::vector<double> dwt_inverse_padded(const DwtDecomposition& d);

}  // namespace wavecoh
