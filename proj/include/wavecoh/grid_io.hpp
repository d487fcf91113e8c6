#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "wavecoh/cwt.hpp"
#include "wavecoh/field.hpp"

namespace wavecoh {

/// Long-format CSV dump of one scale×time grid: header
/// `time_index,scale,value[,significant]`, scale-major row order, scales at
/// 9 significant digits, values at full precision. Byte-identical output for
/// identical inputs. Throws IoError when the sink fails.
void export_grid(std::ostream& sink, const Field<double>& field, const ScaleGrid& grid,
                 std::span<const double> coi, const Field<std::uint8_t>* mask = nullptr);

/// 8-bit RGB raster, row-major, top row first.
struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> rgb;  // 3 bytes per pixel

    [[nodiscard]] std::array<std::uint8_t, 3> pixel(std::size_t x, std::size_t y) const {
        const std::size_t off = (y * width + x) * 3;
        return {rgb[off], rgb[off + 1], rgb[off + 2]};
    }
};

/// One pixel per grid cell, scale axis increasing downward. Values are
/// clamped to [0,1] (NaN renders as 0) and mapped through a fixed 3-stop
/// linear ramp blue→yellow→red. Mask regions are outlined in black; the
/// cone boundary is overdrawn in white.
[[nodiscard]] Image render_heatmap(const Field<double>& field, const ScaleGrid& grid,
                                   std::span<const double> coi,
                                   const Field<std::uint8_t>* mask = nullptr);

/// Color of one clamped value under the heatmap ramp (exposed for tests).
[[nodiscard]] std::array<std::uint8_t, 3> ramp_color(double t);

void write_png(std::ostream& sink, const Image& image);
void write_png(const std::filesystem::path& path, const Image& image);
[[nodiscard]] Image read_png(const std::filesystem::path& path);

}  // namespace wavecoh
