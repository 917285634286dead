#pragma once

#include "labseg/morphology.hpp"

namespace labseg {

struct MarkerSet {
    BinaryMask foreground;
    BinaryMask background;
    // Foreground components hold labels 1..nf, background components follow,
    // so touching foreground/background markers keep distinct seeds.
    LabelMap combined;
    int count = 0;
};

// Foreground: regional maxima of the close-by-reconstruction of the
// open-by-reconstruction of the input (disk SE), components under
// min_marker_area dropped. Background: ridge pixels of the watershed over the
// negated distance-to-object map of the Otsu-binarized input, minus any
// overlap with the foreground.
MarkerSet generate_markers(const GrayMap& segmented_gray, Connectivity conn,
                           int fg_se_radius, int min_marker_area);

// Priority flood from the marker pixels. Min-heap ordered by (relief value,
// insertion sequence); a pixel adjacent to two different finalized labels
// when popped becomes ridge 0 and stops propagating.
LabelMap watershed_flood(const GrayMap& relief, const LabelMap& markers, Connectivity conn);

// Markers are derived from marker_source (an intensity image such as the
// segmented lightness map), the relief is flooded after imposing minima at
// the marker pixels. The two images are separate inputs because marker
// generation expects bright blobs, not a gradient map.
LabelMap marker_watershed(const GrayMap& relief, const GrayMap& marker_source,
                          Connectivity conn, int fg_se_radius, int min_marker_area);

}  // namespace labseg
