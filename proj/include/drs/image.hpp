#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace drs {

// 8-bit interleaved raster, 1 (gray) or 3 (rgb) channels.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 3;
    std::vector<std::uint8_t> pixels; // row-major, width*height*channels bytes

    bool empty() const { return width == 0 || height == 0; }
    std::size_t byte_count() const { return pixels.size(); }

    std::uint8_t at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t& at(int x, int y, int c) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

// Decodes a PNG, PPM (P6) or PGM (P5) file, dispatching on the magic
// bytes rather than the extension.  Throws ValidationError on missing
// or undecodable files.
Image load_image(const std::filesystem::path& path);

// Encoders.  save_* choose the format by function, not extension.
void save_png(const Image& img, const std::filesystem::path& path);
void save_ppm(const Image& img, const std::filesystem::path& path);

// In-memory PNG encoding, used when shipping crops to remote backends.
std::vector<std::uint8_t> encode_png(const Image& img);

// Rectangular crop over [x0, x1) x [y0, y1).  Bounds must lie inside
// the image and describe at least one pixel.
Image crop(const Image& img, int x0, int y0, int x1, int y1);

// One cell of a rows x cols partition of the image.  Cells get
// width/cols (integer division) columns each, with the remainder
// folded into the last column; same for rows.  The image must be at
// least cols pixels wide and rows pixels tall.
Image tile(const Image& img, int row, int col, int rows, int cols);

// Whole file as bytes; ValidationError if unreadable.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

// "image/png" or "image/x-portable-anymap" from the magic bytes.
std::string sniff_image_mime(const std::vector<std::uint8_t>& bytes);

} // namespace drs
