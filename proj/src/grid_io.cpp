#include "wavecoh/grid_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "wavecoh/errors.hpp"

namespace wavecoh {
namespace {

void check_shapes(const Field<double>& field, const ScaleGrid& grid, std::span<const double> coi,
                  const Field<std::uint8_t>* mask) {
    if (field.rows() != grid.num_scales()) {
        throw GridMismatchError("field rows do not match the scale grid");
    }
    if (coi.size() != field.cols()) {
        throw GridMismatchError("cone vector length does not match the field");
    }
    if (mask && (mask->rows() != field.rows() || mask->cols() != field.cols())) {
        throw GridMismatchError("mask shape does not match the field");
    }
}

}  // namespace

void export_grid(std::ostream& sink, const Field<double>& field, const ScaleGrid& grid,
                 std::span<const double> coi, const Field<std::uint8_t>* mask) {
    check_shapes(field, grid, coi, mask);
    sink << (mask ? "time_index,scale,value,significant\n" : "time_index,scale,value\n");
    char line[96];
    for (std::size_t j = 0; j < field.rows(); ++j) {
        for (std::size_t i = 0; i < field.cols(); ++i) {
            int len;
            if (mask) {
                len = std::snprintf(line, sizeof line, "%zu,%.9g,%.17g,%u\n", i, grid.scales[j],
                                    field(j, i), static_cast<unsigned>((*mask)(j, i) ? 1 : 0));
            } else {
                len = std::snprintf(line, sizeof line, "%zu,%.9g,%.17g\n", i, grid.scales[j],
                                    field(j, i));
            }
            sink.write(line, len);
        }
    }
    sink.flush();
    if (!sink) throw IoError("grid export sink failed");
}

std::array<std::uint8_t, 3> ramp_color(double t) {
    if (std::isnan(t) || t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    auto chan = [](double v) {
        return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
    };
    if (t <= 0.5) {
        const double u = 2.0 * t;  // blue → yellow
        return {chan(u), chan(u), chan(1.0 - u)};
    }
    const double u = 2.0 * t - 1.0;  // yellow → red
    return {255, chan(1.0 - u), 0};
}

Image render_heatmap(const Field<double>& field, const ScaleGrid& grid,
                     std::span<const double> coi, const Field<std::uint8_t>* mask) {
    check_shapes(field, grid, coi, mask);
    const std::size_t rows = field.rows();
    const std::size_t cols = field.cols();

    Image img;
    img.width = cols;
    img.height = rows;
    img.rgb.resize(rows * cols * 3);

    auto put = [&](std::size_t x, std::size_t y, std::array<std::uint8_t, 3> c) {
        const std::size_t off = (y * cols + x) * 3;
        img.rgb[off] = c[0];
        img.rgb[off + 1] = c[1];
        img.rgb[off + 2] = c[2];
    };

    for (std::size_t j = 0; j < rows; ++j) {
        for (std::size_t i = 0; i < cols; ++i) put(i, j, ramp_color(field(j, i)));
    }

    if (mask) {
        auto on = [&](std::ptrdiff_t j, std::ptrdiff_t i) {
            if (j < 0 || i < 0 || j >= static_cast<std::ptrdiff_t>(rows) ||
                i >= static_cast<std::ptrdiff_t>(cols)) {
                return false;
            }
            return (*mask)(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) != 0;
        };
        for (std::size_t j = 0; j < rows; ++j) {
            for (std::size_t i = 0; i < cols; ++i) {
                const auto js = static_cast<std::ptrdiff_t>(j);
                const auto is = static_cast<std::ptrdiff_t>(i);
                if (!on(js, is)) continue;
                const bool boundary = !on(js - 1, is) || !on(js + 1, is) || !on(js, is - 1) ||
                                      !on(js, is + 1);
                if (boundary) put(i, j, {0, 0, 0});
            }
        }
    }

    // Cone boundary: deepest row whose scale stays below the cone at that
    // time; columns whose cone lies above the top row are left untouched.
    for (std::size_t i = 0; i < cols; ++i) {
        if (!(coi[i] > 0.0) || coi[i] < grid.scales.front()) continue;
        const double pos = std::log2(coi[i] / grid.s0) / grid.dj;
        const auto row = static_cast<std::ptrdiff_t>(std::floor(pos));
        if (row < 0) continue;
        const std::size_t y = std::min<std::size_t>(static_cast<std::size_t>(row), rows - 1);
        put(i, y, {255, 255, 255});
    }
    return img;
}

namespace {

void png_error_handler(png_structp png, png_const_charp msg) {
    (void)msg;
    std::longjmp(png_jmpbuf(png), 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

void stream_write(png_structp png, png_bytep data, png_size_t length) {
    auto* os = static_cast<std::ostream*>(png_get_io_ptr(png));
    os->write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(length));
    if (!*os) png_error(png, "sink write failed");
}

void stream_flush(png_structp png) {
    auto* os = static_cast<std::ostream*>(png_get_io_ptr(png));
    os->flush();
}

void stream_read(png_structp png, png_bytep data, png_size_t length) {
    auto* is = static_cast<std::istream*>(png_get_io_ptr(png));
    is->read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(length));
    if (is->gcount() != static_cast<std::streamsize>(length)) png_error(png, "short read");
}

}  // namespace

void write_png(std::ostream& sink, const Image& image) {
    if (image.width == 0 || image.height == 0 ||
        image.rgb.size() != image.width * image.height * 3) {
        throw InvalidParameterError("malformed image buffer");
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                              png_warning_handler);
    if (!png) throw IoError("png writer allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png writer allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png encode failed");
    }
    png_set_write_fn(png, &sink, stream_write, stream_flush);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t y = 0; y < image.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(image.rgb.data() + y * image.width * 3));
    }
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
    if (!sink) throw IoError("png sink failed");
}

void write_png(const std::filesystem::path& path, const Image& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_png(out, image);
}

Image read_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                             png_warning_handler);
    if (!png) throw IoError("png reader allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png reader allocation failed");
    }
    std::vector<png_bytep> row_ptrs;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png decode failed: " + path.string());
    }
    png_set_read_fn(png, &in, stream_read);
    png_read_info(png, info);

    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    Image img;
    img.width = png_get_image_width(png, info);
    img.height = png_get_image_height(png, info);
    if (png_get_rowbytes(png, info) != img.width * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("unexpected png layout: " + path.string());
    }
    img.rgb.resize(img.width * img.height * 3);
    row_ptrs.resize(img.height);
    for (std::size_t y = 0; y < img.height; ++y) row_ptrs[y] = img.rgb.data() + y * img.width * 3;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

}  // namespace wavecoh
