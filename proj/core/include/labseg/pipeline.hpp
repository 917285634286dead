#pragma once

#include <string>
#include <vector>

#include "labseg/color.hpp"
#include "labseg/kmeans.hpp"
#include "labseg/metrics.hpp"
#include "labseg/sobel.hpp"
#include "labseg/watershed.hpp"

namespace labseg {

// What the metrics stage compares against the original: the region-mean
// rendering, or the original with ridge pixels blacked out.
enum class MetricsTarget { FinalRender, RidgeOverlay };

struct PipelineConfig {
    int k = 3;
    Distance distance = Distance::Cosine;
    FeatureMode features = FeatureMode::Ab;
    std::uint64_t seed = 42;
    int max_iter = 100;
    double tol = 1e-4;
    Connectivity connectivity = Connectivity::Eight;
    Magnitude magnitude = Magnitude::Exact;
    int fg_se_radius = 5;
    int min_marker_area = 20;
    double max_i = 255.0;
    MetricsTarget metrics_target = MetricsTarget::FinalRender;
    int threads = 1;
    std::string out_dir = "labseg_out";  // consumed by the CLI, not run_pipeline
};

struct StageTiming {
    std::string stage;
    double ms = 0.0;
};

struct PipelineResult {
    LabImage lab;
    Assignment assignment;
    Centroids centroids;
    int iterations = 0;
    RgbImage cluster_render;
    GrayMap segmented_gray;  // per-cluster mean lightness
    GrayMap relief;          // gradient magnitude of segmented_gray
    MarkerSet markers;
    LabelMap labels;
    RgbImage final_render;
    MetricsReport metrics;
    std::vector<StageTiming> timings;
};

PipelineResult run_pipeline(const RgbImage& img, const PipelineConfig& cfg);

// Piecewise-constant Lab image: every pixel replaced by its cluster's display
// value (member-mean Lab; empty clusters fall back to the centroid).
LabImage segmented_lab(const LabImage& lab, const Assignment& assignment,
                       const Centroids& centroids, FeatureMode mode);
RgbImage render_assignment(const LabImage& lab, const Assignment& assignment,
                           const Centroids& centroids, FeatureMode mode);

// Region-mean sRGB per positive label; ridge pixels (label 0) are black.
RgbImage render_final(const RgbImage& original, const LabelMap& labels);
// Original image with ridge pixels blacked out.
RgbImage overlay_ridges(const RgbImage& original, const LabelMap& labels);

// Display helpers for the CLI outputs.
RgbImage lab_preview(const LabImage& lab);
BinaryMask gray8_normalized(const GrayMap& img);          // min-max to 0..255
BinaryMask marker_preview(const MarkerSet& markers);      // fg 255, bg 128
Gray16 labels_to_gray16(const LabelMap& labels);          // throws if > 65535 regions

// Flat three-band test image (left/center/right red, green, blue) with
// optional per-channel Gaussian noise; truth holds band ids 1..3.
struct SyntheticImage {
    RgbImage image;
    LabelMap truth;
};
SyntheticImage synthetic_thirds(int width, int height, double noise_sigma,
                                std::uint64_t seed);

std::string metrics_to_json(const MetricsReport& report);
std::string timings_to_json(const std::vector<StageTiming>& timings);

// Writes the six PNGs plus metrics.json and timings.json into out_dir
// (created if missing).
void write_outputs(const PipelineResult& result, const std::string& out_dir);

}  // namespace labseg
