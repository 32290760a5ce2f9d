#include "drs/image.hpp"

#include "drs/errors.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace drs {

namespace {

void check_dims(int width, int height, int channels) {
    if (width <= 0 || height <= 0)
        throw ValidationError("image dimensions must be positive, got " +
                              std::to_string(width) + "x" + std::to_string(height));
    if (channels != 1 && channels != 3)
        throw ValidationError("unsupported channel count " + std::to_string(channels));
}

// --- PNM (P5/P6) ---------------------------------------------------------

// Skips whitespace and '#' comments between header tokens.
int next_pnm_int(std::istream& in, const std::string& path) {
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    if (ch == EOF)
        throw ValidationError("truncated PNM header in " + path);
    int value = 0;
    bool any = false;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        any = true;
        ch = in.get();
    }
    if (!any)
        throw ValidationError("malformed PNM header in " + path);
    return value;
}

Image load_pnm(std::istream& in, const std::string& path) {
    char magic[2];
    in.read(magic, 2);
    const int channels = (magic[1] == '6') ? 3 : 1;
    const int width = next_pnm_int(in, path);
    const int height = next_pnm_int(in, path);
    const int maxval = next_pnm_int(in, path);
    if (maxval != 255)
        throw ValidationError("only 8-bit PNM supported, maxval=" +
                              std::to_string(maxval) + " in " + path);
    check_dims(width, height, channels);

    Image img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.pixels.resize(static_cast<std::size_t>(width) * height * channels);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw ValidationError("truncated PNM pixel data in " + path);
    return img;
}

// --- PNG ------------------------------------------------------------------

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

Image load_png_file(const std::filesystem::path& path) {
    PngReadCloser ctx;
    ctx.fp = std::fopen(path.string().c_str(), "rb");
    if (!ctx.fp)
        throw ValidationError("cannot open image file " + path.string());

    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw Error("png_create_read_struct failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw Error("png_create_info_struct failed");

    if (setjmp(png_jmpbuf(ctx.png)))
        throw ValidationError("undecodable PNG file " + path.string());

    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);

    png_uint_32 width = 0, height = 0;
    int bit_depth = 0, color_type = 0;
    png_get_IHDR(ctx.png, ctx.info, &width, &height, &bit_depth, &color_type,
                 nullptr, nullptr, nullptr);

    // Normalize everything to 8-bit gray or rgb.
    if (bit_depth == 16) png_set_strip_16(ctx.png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(ctx.png);
    if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(ctx.png);
    if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS))
        png_set_strip_alpha(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    const int channels = png_get_channels(ctx.png, ctx.info);
    check_dims(static_cast<int>(width), static_cast<int>(height), channels);

    Image img;
    img.width = static_cast<int>(width);
    img.height = static_cast<int>(height);
    img.channels = channels;
    img.pixels.resize(static_cast<std::size_t>(width) * height * channels);

    std::vector<png_bytep> rows(height);
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    for (png_uint_32 y = 0; y < height; ++y)
        rows[y] = img.pixels.data() + y * stride;
    png_read_image(ctx.png, rows.data());
    return img;
}

struct PngWriteCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngWriteCloser() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

void write_png_rows(png_structp png, png_infop info, const Image& img) {
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(img.pixels.data() + y * stride));
    png_write_end(png, nullptr);
}

void png_vector_write(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

} // namespace

Image load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open image file " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() != 2)
        throw ValidationError("image file too short: " + path.string());
    if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) {
        in.seekg(0);
        return load_pnm(in, path.string());
    }
    if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') {
        in.close();
        return load_png_file(path);
    }
    throw ValidationError("unrecognized image format in " + path.string());
}

void save_png(const Image& img, const std::filesystem::path& path) {
    check_dims(img.width, img.height, img.channels);
    PngWriteCloser ctx;
    ctx.fp = std::fopen(path.string().c_str(), "wb");
    if (!ctx.fp)
        throw ValidationError("cannot write image file " + path.string());
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw Error("png_create_write_struct failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw Error("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(ctx.png)))
        throw Error("PNG encoding failed for " + path.string());
    png_init_io(ctx.png, ctx.fp);
    write_png_rows(ctx.png, ctx.info, img);
}

void save_ppm(const Image& img, const std::filesystem::path& path) {
    check_dims(img.width, img.height, img.channels);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("cannot write image file " + path.string());
    out << (img.channels == 3 ? "P6" : "P5") << "\n"
        << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out)
        throw Error("short write to " + path.string());
}

std::vector<std::uint8_t> encode_png(const Image& img) {
    check_dims(img.width, img.height, img.channels);
    std::vector<std::uint8_t> out;
    PngWriteCloser ctx;
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw Error("png_create_write_struct failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw Error("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(ctx.png)))
        throw Error("in-memory PNG encoding failed");
    png_set_write_fn(ctx.png, &out, png_vector_write, nullptr);
    write_png_rows(ctx.png, ctx.info, img);
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes(
        (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

std::string sniff_image_mime(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() >= 2 && bytes[0] == 0x89 && bytes[1] == 'P')
        return "image/png";
    return "image/x-portable-anymap";
}

Image crop(const Image& img, int x0, int y0, int x1, int y1) {
    if (img.empty())
        throw ValidationError("cannot crop an empty image");
    if (x0 < 0 || y0 < 0 || x1 > img.width || y1 > img.height)
        throw ValidationError("crop window exceeds image bounds");
    if (x0 >= x1 || y0 >= y1)
        throw ValidationError("crop window must contain at least one pixel");

    Image out;
    out.width = x1 - x0;
    out.height = y1 - y0;
    out.channels = img.channels;
    out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * out.channels);
    const std::size_t in_stride = static_cast<std::size_t>(img.width) * img.channels;
    const std::size_t out_stride = static_cast<std::size_t>(out.width) * out.channels;
    for (int y = 0; y < out.height; ++y) {
        const std::uint8_t* src =
            img.pixels.data() + (y0 + y) * in_stride + static_cast<std::size_t>(x0) * img.channels;
        std::memcpy(out.pixels.data() + y * out_stride, src, out_stride);
    }
    return out;
}

Image tile(const Image& img, int row, int col, int rows, int cols) {
    if (rows < 1 || cols < 1)
        throw ValidationError("tile grid must be at least 1x1");
    if (row < 0 || row >= rows || col < 0 || col >= cols)
        throw ValidationError("tile index out of range");
    if (img.width < cols || img.height < rows)
        throw ValidationError("image " + std::to_string(img.width) + "x" +
                              std::to_string(img.height) + " too small for a " +
                              std::to_string(rows) + "x" + std::to_string(cols) + " grid");

    const int base_w = img.width / cols;
    const int base_h = img.height / rows;
    const int x0 = col * base_w;
    const int y0 = row * base_h;
    const int x1 = (col == cols - 1) ? img.width : x0 + base_w;
    const int y1 = (row == rows - 1) ? img.height : y0 + base_h;
    return crop(img, x0, y0, x1, y1);
}

} // namespace drs
