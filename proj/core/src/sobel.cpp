#include "labseg/sobel.hpp"

#include <algorithm>
#include <cmath>

#include "labseg/parallel.hpp"

namespace labseg {
namespace {

Kernel3x3 rotate180(const Kernel3x3& k) {
    Kernel3x3 out;
    for (int i = 0; i < 9; ++i) out[i] = k[8 - i];
    return out;
}

constexpr Kernel3x3 kSobelX = {-1, 0, 1, -2, 0, 2, -1, 0, 1};
constexpr Kernel3x3 kSobelY = {-1, -2, -1, 0, 0, 0, 1, 2, 1};

}  // namespace

GrayMap convolve3x3(const GrayMap& img, const Kernel3x3& kernel, int threads) {
    const int w = img.width, h = img.height;
    GrayMap out(w, h);
    parallel_for(std::size_t(h), threads, [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                double s = 0.0;
                for (int ky = 0; ky < 3; ++ky) {
                    const int sy = std::clamp(int(y) - (ky - 1), 0, h - 1);
                    for (int kx = 0; kx < 3; ++kx) {
                        const int sx = std::clamp(x - (kx - 1), 0, w - 1);
                        s += kernel[ky * 3 + kx] * img.at(sx, sy);
                    }
                }
                out.at(x, int(y)) = s;
            }
        }
    });
    return out;
}

SobelResult sobel_gradient(const GrayMap& img, Magnitude magnitude, int threads) {
    // The kernels are specified in correlation orientation; convolve3x3 flips
    // its kernel, so flip here once to get a correlation overall.
    static const Kernel3x3 kx = rotate180(kSobelX);
    static const Kernel3x3 ky = rotate180(kSobelY);

    SobelResult res;
    res.gx = convolve3x3(img, kx, threads);
    res.gy = convolve3x3(img, ky, threads);
    res.mag = GrayMap(img.width, img.height);
    parallel_for(img.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double gx = res.gx[i], gy = res.gy[i];
            res.mag[i] = magnitude == Magnitude::Exact
                             ? std::sqrt(gx * gx + gy * gy)
                             : std::abs(gx) + std::abs(gy);
        }
    });
    return res;
}

GrayMap lightness_of(const LabImage& img) {
    GrayMap out(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = img[i].L;
    return out;
}

}  // namespace labseg
