#include "labseg/metrics.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace labseg {

std::array<double, 3> mse_per_channel(const RgbImage& a, const RgbImage& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("image dimensions mismatch");
    // Integer accumulation: exact, so the sum is independent of any ordering.
    std::array<std::uint64_t, 3> acc{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int dr = int(a[i].r) - int(b[i].r);
        const int dg = int(a[i].g) - int(b[i].g);
        const int db = int(a[i].b) - int(b[i].b);
        acc[0] += std::uint64_t(dr * dr);
        acc[1] += std::uint64_t(dg * dg);
        acc[2] += std::uint64_t(db * db);
    }
    const double n = double(a.size());
    return {double(acc[0]) / n, double(acc[1]) / n, double(acc[2]) / n};
}

std::array<double, 3> psnr_per_channel(const std::array<double, 3>& mse, double max_i) {
    if (!(max_i > 0.0)) throw std::invalid_argument("max_i must be positive");
    std::array<double, 3> out{};
    for (int c = 0; c < 3; ++c) {
        if (mse[c] < 0.0) throw std::invalid_argument("negative mse");
        out[c] = mse[c] == 0.0 ? std::numeric_limits<double>::infinity()
                               : 10.0 * std::log10(max_i * max_i / mse[c]);
    }
    return out;
}

MetricsReport compute_metrics(const RgbImage& a, const RgbImage& b, double max_i) {
    MetricsReport r;
    r.mse = mse_per_channel(a, b);
    r.psnr_db = psnr_per_channel(r.mse, max_i);
    r.max_i = max_i;
    return r;
}

}  // namespace labseg
