#pragma once

#include <array>

#include "labseg/image.hpp"

namespace labseg {

// Gradient magnitude formula: exact = sqrt(gx^2+gy^2), manhattan = |gx|+|gy|.
enum class Magnitude { Exact, Manhattan };

using Kernel3x3 = std::array<double, 9>;  // row-major

struct SobelResult {
    GrayMap gx, gy, mag;
};

// True convolution (kernel flipped) with replicate border padding.
GrayMap convolve3x3(const GrayMap& img, const Kernel3x3& kernel, int threads = 1);

// Horizontal kernel [-1 0 1; -2 0 2; -1 0 1] applied in correlation
// orientation, vertical kernel its transpose.
SobelResult sobel_gradient(const GrayMap& img, Magnitude magnitude = Magnitude::Exact,
                           int threads = 1);

// L* channel as the grayscale proxy.
GrayMap lightness_of(const LabImage& img);

}  // namespace labseg
