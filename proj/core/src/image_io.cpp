#include "labseg/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <memory>
#include <vector>

namespace labseg {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open " + path);
    return f;
}

RgbImage load_png(std::FILE* fp, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }

    std::vector<png_bytep> rows;
    RgbImage img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode " + path);
    }

    png_init_io(png, fp);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    if (w < 1 || h < 1 || png_get_channels(png, info) != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("unsupported PNG layout in " + path);
    }

    img = RgbImage(int(w), int(h));
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = reinterpret_cast<png_bytep>(img.data.data() + std::size_t(y) * w);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

int ppm_next_value(std::FILE* fp, const std::string& path) {
    // Token parser for the P6 header: whitespace separated integers with
    // '#' comments running to end of line.
    int c;
    while ((c = std::fgetc(fp)) != EOF) {
        if (c == '#') {
            while ((c = std::fgetc(fp)) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c)) throw IoError("malformed PPM header in " + path);
    long v = 0;
    do {
        v = v * 10 + (c - '0');
        if (v > 1 << 30) throw IoError("malformed PPM header in " + path);
        c = std::fgetc(fp);
    } while (c != EOF && std::isdigit(c));
    return int(v);
}

RgbImage load_ppm(std::FILE* fp, const std::string& path) {
    if (std::fgetc(fp) != 'P' || std::fgetc(fp) != '6')
        throw IoError("not a P6 PPM: " + path);
    const int w = ppm_next_value(fp, path);
    const int h = ppm_next_value(fp, path);
    const int maxval = ppm_next_value(fp, path);
    if (w < 1 || h < 1) throw IoError("bad PPM dimensions in " + path);
    if (maxval < 1 || maxval > 255) throw IoError("unsupported PPM maxval in " + path);
    // The header terminator was consumed by the maxval parse loop.
    RgbImage img(w, h);
    const std::size_t want = img.size() * 3;
    if (std::fread(img.data.data(), 1, want, fp) != want)
        throw IoError("truncated PPM data in " + path);
    return img;
}

class PngWriter {
public:
    PngWriter(const std::string& path, int width, int height, int bit_depth, int color_type)
        : file_(open_file(path, "wb")) {
        png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png_) info_ = png_create_info_struct(png_);
        if (!png_ || !info_) {
            destroy();
            throw IoError("libpng init failed");
        }
        if (setjmp(png_jmpbuf(png_))) {
            destroy();
            throw IoError("failed to encode " + path);
        }
        png_init_io(png_, file_.get());
        png_set_IHDR(png_, info_, png_uint_32(width), png_uint_32(height), bit_depth,
                     color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png_, info_);
    }

    ~PngWriter() { destroy(); }
    PngWriter(const PngWriter&) = delete;
    PngWriter& operator=(const PngWriter&) = delete;

    void write(std::vector<png_bytep>& rows, const std::string& path) {
        if (setjmp(png_jmpbuf(png_))) {
            destroy();
            throw IoError("failed to encode " + path);
        }
        png_write_image(png_, rows.data());
        png_write_end(png_, nullptr);
    }

private:
    void destroy() {
        if (png_) png_destroy_write_struct(&png_, info_ ? &info_ : nullptr);
        png_ = nullptr;
        info_ = nullptr;
    }

    FilePtr file_;
    png_structp png_ = nullptr;
    png_infop info_ = nullptr;
};

}  // namespace

RgbImage load_image(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    unsigned char magic[8] = {0};
    const std::size_t got = std::fread(magic, 1, sizeof(magic), f.get());
    std::rewind(f.get());
    if (got >= 8 && png_sig_cmp(magic, 0, 8) == 0) return load_png(f.get(), path);
    if (got >= 2 && magic[0] == 'P' && magic[1] == '6') return load_ppm(f.get(), path);
    throw IoError("unrecognized image format: " + path);
}

void save_png(const std::string& path, const RgbImage& img) {
    PngWriter writer(path, img.width, img.height, 8, PNG_COLOR_TYPE_RGB);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(
            const_cast<Rgb8*>(img.data.data() + std::size_t(y) * img.width));
    writer.write(rows, path);
}

void save_png_gray8(const std::string& path, const BinaryMask& img) {
    PngWriter writer(path, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(img.data.data() + std::size_t(y) * img.width);
    writer.write(rows, path);
}

void save_png_gray16(const std::string& path, const Gray16& img) {
    // PNG 16-bit samples are big-endian; build the byte rows explicitly.
    std::vector<std::uint8_t> bytes(img.size() * 2);
    for (std::size_t i = 0; i < img.size(); ++i) {
        bytes[2 * i] = std::uint8_t(img[i] >> 8);
        bytes[2 * i + 1] = std::uint8_t(img[i] & 0xff);
    }
    PngWriter writer(path, img.width, img.height, 16, PNG_COLOR_TYPE_GRAY);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = bytes.data() + std::size_t(y) * img.width * 2;
    writer.write(rows, path);
}

}  // namespace labseg
