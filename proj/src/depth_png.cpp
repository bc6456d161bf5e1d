#include "pretouch/depth_png.hpp"

#include "pretouch/errors.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace pretouch {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

enum class PngStatus { ok, libpng_error, not_png, unsupported };

// libpng reports errors by longjmp, so these two functions keep only trivially
// destructible locals; the buffers they fill are owned by the caller.
PngStatus read_impl(std::FILE* fp, DepthImage* img, std::vector<png_bytep>* rows) {
    png_byte sig[8];
    if (std::fread(sig, 1, 8, fp) != 8 || png_sig_cmp(sig, 0, 8) != 0) return PngStatus::not_png;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) return PngStatus::libpng_error;
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return PngStatus::libpng_error;
    }
    png_init_io(png, fp);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        return PngStatus::unsupported;
    }
    png_set_swap(png);  // samples are big-endian on disk
    png_read_update_info(png, info);
    img->width = static_cast<int>(width);
    img->height = static_cast<int>(height);
    img->mm.assign(static_cast<std::size_t>(width) * height, 0);
    rows->resize(height);
    for (png_uint_32 v = 0; v < height; ++v)
        (*rows)[v] = reinterpret_cast<png_bytep>(img->mm.data() + static_cast<std::size_t>(v) * width);
    png_read_image(png, rows->data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return PngStatus::ok;
}

PngStatus write_impl(std::FILE* fp, const DepthImage* img, std::vector<std::uint16_t>* row) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) return PngStatus::libpng_error;
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return PngStatus::libpng_error;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, img->width, img->height, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_set_swap(png);
    for (int v = 0; v < img->height; ++v) {
        for (int u = 0; u < img->width; ++u) (*row)[u] = img->at(u, v);
        png_write_row(png, reinterpret_cast<png_bytep>(row->data()));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return PngStatus::ok;
}

}  // namespace

DepthImage load_depth_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open PNG file '" + path + "'");
    DepthImage img;
    std::vector<png_bytep> rows;
    switch (read_impl(fp.get(), &img, &rows)) {
        case PngStatus::ok:
            return img;
        case PngStatus::not_png:
            throw FormatError("'" + path + "' is not a PNG file");
        case PngStatus::unsupported:
            throw UnsupportedFormatError("'" + path + "': depth maps must be 16-bit single-channel grayscale");
        case PngStatus::libpng_error:
            break;
    }
    throw FormatError("'" + path + "': corrupt PNG data");
}

void save_depth_png(const DepthImage& img, const std::string& path) {
    if (img.width <= 0 || img.height <= 0 || img.mm.size() != static_cast<std::size_t>(img.width) * img.height)
        throw std::invalid_argument("save_depth_png: inconsistent image buffer");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot write PNG file '" + path + "'");
    std::vector<std::uint16_t> row(img.width);
    if (write_impl(fp.get(), &img, &row) != PngStatus::ok) throw std::runtime_error("libpng failed writing '" + path + "'");
}

}  // namespace pretouch
