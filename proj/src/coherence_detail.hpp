#pragma once

// Magnitude-only coherence for surrogate sweeps. Identical arithmetic to the
// public path, but skips the phase and coherency fields that significance
// pooling never reads; thousands of runs make that overhead visible.

#include <span>

#include "wavecoh/coherence.hpp"

namespace wavecoh::detail {

[[nodiscard]] Field<double> coherence_magnitude(std::span<const double> x,
                                                std::span<const double> y, double dt,
                                                const ScaleGrid& grid, const Smoother& sm);

}  // namespace wavecoh::detail
