#pragma once

#include <array>

#include "labseg/image.hpp"

namespace labseg {

struct MetricsReport {
    std::array<double, 3> mse{};      // channel order R, G, B
    std::array<double, 3> psnr_db{};  // +infinity when the channel MSE is 0
    double max_i = 255.0;
};

std::array<double, 3> mse_per_channel(const RgbImage& a, const RgbImage& b);
std::array<double, 3> psnr_per_channel(const std::array<double, 3>& mse, double max_i);
MetricsReport compute_metrics(const RgbImage& a, const RgbImage& b, double max_i = 255.0);

}  // namespace labseg
