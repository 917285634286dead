#include "labseg/color.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "labseg/parallel.hpp"

namespace labseg {
namespace {

// sRGB -> XYZ (D65), derived from the IEC 61966-2-1 chromaticities at full
// double precision. Row sums are used as the white point so that equal RGB
// channels produce X/Xn = Y/Yn = Z/Zn exactly.
constexpr double M[3][3] = {
    {0.41239079926595934, 0.357584339383878, 0.1804807884018343},
    {0.21263900587151027, 0.715168678767756, 0.07219231536073371},
    {0.01933081871559182, 0.11919477979462598, 0.9505321522496607},
};
constexpr double Minv[3][3] = {
    {3.2409699419045226, -1.537383177570094, -0.4986107602930034},
    {-0.9692436362808796, 1.8759675015077202, 0.04155505740717559},
    {0.05563007969699366, -0.20397695888897652, 1.0569715142428786},
};
constexpr double Xn = M[0][0] + M[0][1] + M[0][2];
constexpr double Yn = M[1][0] + M[1][1] + M[1][2];
constexpr double Zn = M[2][0] + M[2][1] + M[2][2];

constexpr double kEps = 216.0 / 24389.0;  // (6/29)^3
constexpr double kKappa = 24389.0 / 27.0;

double srgb_decode(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double srgb_encode(double c) {
    return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

// 8-bit inputs only ever hit 256 linear values; precompute them once.
const std::array<double, 256>& decode_table() {
    static const std::array<double, 256> table = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) t[i] = srgb_decode(i / 255.0);
        return t;
    }();
    return table;
}

double lab_f(double t) {
    return t > kEps ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0;
}

double lab_f_inv(double ft) {
    const double t3 = ft * ft * ft;
    return t3 > kEps ? t3 : (116.0 * ft - 16.0) / kKappa;
}

std::uint8_t quantize(double c) {
    double v = std::round(c * 255.0);
    if (v < 0.0) v = 0.0;
    if (v > 255.0) v = 255.0;
    return std::uint8_t(v);
}

}  // namespace

Lab srgb_to_lab(Rgb8 p) {
    const auto& lut = decode_table();
    const double r = lut[p.r], g = lut[p.g], b = lut[p.b];
    const double x = (M[0][0] * r + M[0][1] * g + M[0][2] * b) / Xn;
    const double y = (M[1][0] * r + M[1][1] * g + M[1][2] * b) / Yn;
    const double z = (M[2][0] * r + M[2][1] * g + M[2][2] * b) / Zn;
    const double fx = lab_f(x), fy = lab_f(y), fz = lab_f(z);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Rgb8 lab_to_srgb(const Lab& p) {
    const double fy = (p.L + 16.0) / 116.0;
    const double fx = fy + p.a / 500.0;
    const double fz = fy - p.b / 200.0;
    const double x = lab_f_inv(fx) * Xn;
    const double y = lab_f_inv(fy) * Yn;
    const double z = lab_f_inv(fz) * Zn;
    const double r = Minv[0][0] * x + Minv[0][1] * y + Minv[0][2] * z;
    const double g = Minv[1][0] * x + Minv[1][1] * y + Minv[1][2] * z;
    const double b = Minv[2][0] * x + Minv[2][1] * y + Minv[2][2] * z;
    return {quantize(srgb_encode(r)), quantize(srgb_encode(g)), quantize(srgb_encode(b))};
}

LabImage srgb_to_lab(const RgbImage& img, int threads) {
    LabImage out(img.width, img.height);
    parallel_for(img.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) out[i] = srgb_to_lab(img[i]);
    });
    return out;
}

RgbImage lab_to_srgb(const LabImage& img, int threads) {
    RgbImage out(img.width, img.height);
    parallel_for(img.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) out[i] = lab_to_srgb(img[i]);
    });
    return out;
}

FeatureMatrix extract_features(const LabImage& img, FeatureMode mode) {
    FeatureMatrix fm;
    fm.n = int(img.size());
    fm.d = mode == FeatureMode::Ab ? 2 : 3;
    fm.values.resize(std::size_t(fm.n) * fm.d);
    for (int i = 0; i < fm.n; ++i) {
        const Lab& p = img[std::size_t(i)];
        double* row = fm.values.data() + std::size_t(i) * fm.d;
        if (mode == FeatureMode::Ab) {
            row[0] = p.a;
            row[1] = p.b;
        } else {
            row[0] = p.L;
            row[1] = p.a;
            row[2] = p.b;
        }
    }
    return fm;
}

}  // namespace labseg
