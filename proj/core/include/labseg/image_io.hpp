#pragma once

#include <stdexcept>
#include <string>

#include "labseg/image.hpp"

namespace labseg {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// PNG (8/16-bit, gray/palette/RGB/RGBA; alpha dropped, 16-bit narrowed) or
// binary PPM (P6, maxval <= 255), sniffed by magic bytes.
RgbImage load_image(const std::string& path);

void save_png(const std::string& path, const RgbImage& img);
void save_png_gray8(const std::string& path, const BinaryMask& img);   // raw bytes
void save_png_gray16(const std::string& path, const Gray16& img);

}  // namespace labseg
