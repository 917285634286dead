#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace labseg {

// Row-major raster. (0,0) is the top-left pixel, x grows right, y grows down.
template <typename T>
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Raster() = default;
    Raster(int w, int h, T fill = T{})
        : width(w), height(h), data(check_dims(w, h), fill) {}

    std::size_t size() const { return data.size(); }
    std::size_t index(int x, int y) const { return std::size_t(y) * width + x; }

    T& at(int x, int y) { return data[index(x, y)]; }
    const T& at(int x, int y) const { return data[index(x, y)]; }

    T& operator[](std::size_t i) { return data[i]; }
    const T& operator[](std::size_t i) const { return data[i]; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }

    template <typename U>
    bool same_shape(const Raster<U>& other) const {
        return width == other.width && height == other.height;
    }

private:
    static std::size_t check_dims(int w, int h) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("raster dimensions must be positive");
        return std::size_t(w) * std::size_t(h);
    }
};

struct Rgb8 {
    std::uint8_t r = 0, g = 0, b = 0;
};

inline bool operator==(Rgb8 a, Rgb8 b) { return a.r == b.r && a.g == b.g && a.b == b.b; }
inline bool operator!=(Rgb8 a, Rgb8 b) { return !(a == b); }

// CIELAB 1976 under D65. L in [0,100] for in-gamut input; a/b roughly [-128,127].
struct Lab {
    double L = 0, a = 0, b = 0;
};

using RgbImage = Raster<Rgb8>;
using LabImage = Raster<Lab>;
using GrayMap = Raster<double>;
using BinaryMask = Raster<std::uint8_t>;  // 0 or 1
using LabelMap = Raster<std::uint32_t>;   // 0 means unlabeled / watershed ridge
using Gray16 = Raster<std::uint16_t>;

}  // namespace labseg
