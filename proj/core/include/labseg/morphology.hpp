#pragma once

#include <utility>
#include <vector>

#include "labseg/image.hpp"

namespace labseg {

enum class Connectivity { Four = 4, Eight = 8 };

// Flat structuring element given as center-relative offsets.
class StructuringElement {
public:
    // Disk of the given radius: offsets with dx^2 + dy^2 <= r^2. radius 0 is
    // the single-pixel SE.
    static StructuringElement disk(int radius);
    // Explicit neighborhood with odd side length; nonzero grid entries are
    // members. Must contain the center.
    StructuringElement(int side, const std::vector<std::uint8_t>& grid);

    const std::vector<std::pair<int, int>>& offsets() const { return offsets_; }

private:
    StructuringElement() = default;
    std::vector<std::pair<int, int>> offsets_;
};

// Min / max over the SE neighborhood with replicate padding.
GrayMap erode(const GrayMap& img, const StructuringElement& se);
GrayMap dilate(const GrayMap& img, const StructuringElement& se);

// Largest image <= mask reachable by geodesic dilation of marker
// (requires marker <= mask pointwise), and the erosive dual
// (requires marker >= mask). Hybrid raster/anti-raster sweeps with a FIFO
// cleanup queue.
GrayMap reconstruct_by_dilation(const GrayMap& marker, const GrayMap& mask, Connectivity conn);
GrayMap reconstruct_by_erosion(const GrayMap& marker, const GrayMap& mask, Connectivity conn);

enum class ExtremaKind { Minima, Maxima };

// Connected plateaus strictly below (minima) / above (maxima) every
// plateau-adjacent pixel.
BinaryMask regional_extrema(const GrayMap& img, ExtremaKind kind, Connectivity conn);

// Rewrites the relief so its regional minima are exactly the connected
// components of markers.
GrayMap impose_minima(const GrayMap& img, const BinaryMask& markers, Connectivity conn);

// Threshold maximizing between-class variance over a 256-bin histogram of the
// min-max-normalized values; ties pick the smallest threshold. Throws
// "degenerate histogram" on constant input.
double otsu_threshold(const GrayMap& img);

// Exact squared Euclidean distance from each true pixel to the nearest false
// pixel (integer values held in doubles), and its element-wise square root.
GrayMap distance_transform_squared(const BinaryMask& mask);
GrayMap distance_transform(const BinaryMask& mask);

struct ComponentLabels {
    LabelMap labels;  // 0 outside the mask, 1..count inside
    int count = 0;
};

// Connected components of the true pixels, labeled in raster discovery order.
ComponentLabels label_components(const BinaryMask& mask, Connectivity conn);

}  // namespace labseg
