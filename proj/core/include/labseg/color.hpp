#pragma once

#include <span>
#include <vector>

#include "labseg/image.hpp"

namespace labseg {

// Feature layout fed to the clustering stage.
//   Ab  : (a*, b*) per pixel, chroma only
//   Lab : (L*, a*, b*) per pixel
enum class FeatureMode { Ab, Lab };

// Dense n x d matrix, one row per pixel in raster order.
struct FeatureMatrix {
    int n = 0;
    int d = 0;
    std::vector<double> values;

    std::span<const double> row(int i) const {
        return {values.data() + std::size_t(i) * d, std::size_t(d)};
    }
    std::span<double> row(int i) {
        return {values.data() + std::size_t(i) * d, std::size_t(d)};
    }
};

// Single-pixel conversions. sRGB decoding follows IEC 61966-2-1; the XYZ
// white point is the row sums of the sRGB->XYZ matrix so neutral inputs map
// to a* = b* = 0 exactly.
Lab srgb_to_lab(Rgb8 p);
// Out-of-gamut Lab values are clamped to [0,255] per channel after encoding.
Rgb8 lab_to_srgb(const Lab& p);

LabImage srgb_to_lab(const RgbImage& img, int threads = 1);
RgbImage lab_to_srgb(const LabImage& img, int threads = 1);

FeatureMatrix extract_features(const LabImage& img, FeatureMode mode);

}  // namespace labseg
