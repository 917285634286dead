#include <cstdio>
#include <exception>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "labseg/image_io.hpp"
#include "labseg/pipeline.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitProcessing = 4;

void add_pipeline_flags(CLI::App& cmd, labseg::PipelineConfig& cfg) {
    cmd.add_option("--k", cfg.k, "Cluster count")->check(CLI::PositiveNumber);
    cmd.add_option("--distance",
                   [&cfg](const std::vector<std::string>& v) {
                       if (v[0] == "cosine") cfg.distance = labseg::Distance::Cosine;
                       else if (v[0] == "sqeuclidean") cfg.distance = labseg::Distance::SqEuclidean;
                       else return false;
                       return true;
                   },
                   "Distance measure: cosine | sqeuclidean")
        ->type_name("TEXT");
    cmd.add_option("--features",
                   [&cfg](const std::vector<std::string>& v) {
                       if (v[0] == "ab") cfg.features = labseg::FeatureMode::Ab;
                       else if (v[0] == "lab") cfg.features = labseg::FeatureMode::Lab;
                       else return false;
                       return true;
                   },
                   "Feature layout: ab | lab")
        ->type_name("TEXT");
    cmd.add_option("--seed", cfg.seed, "PRNG seed");
    cmd.add_option("--max-iter", cfg.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
    cmd.add_option("--tol", cfg.tol, "Convergence threshold")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--connectivity",
                   [&cfg](const std::vector<std::string>& v) {
                       if (v[0] == "4") cfg.connectivity = labseg::Connectivity::Four;
                       else if (v[0] == "8") cfg.connectivity = labseg::Connectivity::Eight;
                       else return false;
                       return true;
                   },
                   "Pixel adjacency: 4 | 8")
        ->type_name("INT");
    cmd.add_option("--magnitude",
                   [&cfg](const std::vector<std::string>& v) {
                       if (v[0] == "exact") cfg.magnitude = labseg::Magnitude::Exact;
                       else if (v[0] == "manhattan") cfg.magnitude = labseg::Magnitude::Manhattan;
                       else return false;
                       return true;
                   },
                   "Gradient magnitude: exact | manhattan")
        ->type_name("TEXT");
    cmd.add_option("--fg-se-radius", cfg.fg_se_radius, "Foreground marker disk radius")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--min-marker-area", cfg.min_marker_area,
                   "Minimum foreground component area")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--max-i", cfg.max_i, "PSNR peak value")->check(CLI::PositiveNumber);
    cmd.add_option("--metrics-target",
                   [&cfg](const std::vector<std::string>& v) {
                       if (v[0] == "final-render")
                           cfg.metrics_target = labseg::MetricsTarget::FinalRender;
                       else if (v[0] == "ridge-overlay")
                           cfg.metrics_target = labseg::MetricsTarget::RidgeOverlay;
                       else return false;
                       return true;
                   },
                   "Metrics comparison image: final-render | ridge-overlay")
        ->type_name("TEXT");
    cmd.add_option("--threads", cfg.threads, "Worker thread count")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--out-dir", cfg.out_dir, "Output directory");
}

int run_command(const std::string& input, const labseg::PipelineConfig& cfg) {
    labseg::RgbImage img;
    try {
        img = labseg::load_image(input);
    } catch (const labseg::IoError& e) {
        std::fprintf(stderr, "labseg: %s\n", e.what());
        return kExitIo;
    }

    labseg::PipelineResult result;
    try {
        result = labseg::run_pipeline(img, cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "labseg: %s\n", e.what());
        return kExitProcessing;
    }

    try {
        labseg::write_outputs(result, cfg.out_dir);
    } catch (const labseg::IoError& e) {
        std::fprintf(stderr, "labseg: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "labseg: %s\n", e.what());
        return kExitProcessing;
    }
    return 0;
}

int metrics_command(const std::string& path_a, const std::string& path_b, double max_i) {
    labseg::RgbImage a, b;
    try {
        a = labseg::load_image(path_a);
        b = labseg::load_image(path_b);
    } catch (const labseg::IoError& e) {
        std::fprintf(stderr, "labseg: %s\n", e.what());
        return kExitIo;
    }
    try {
        const labseg::MetricsReport report = labseg::compute_metrics(a, b, max_i);
        std::fputs(labseg::metrics_to_json(report).c_str(), stdout);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "labseg: %s\n", e.what());
        return kExitProcessing;
    }
    return 0;
}

int gen_synthetic_command(const std::string& output, int width, int height, double sigma,
                          std::uint64_t seed) {
    try {
        const labseg::SyntheticImage s = labseg::synthetic_thirds(width, height, sigma, seed);
        labseg::save_png(output, s.image);
    } catch (const labseg::IoError& e) {
        std::fprintf(stderr, "labseg: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "labseg: %s\n", e.what());
        return kExitProcessing;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Color image segmentation: CIELAB + K-means + watershed"};
    app.require_subcommand(1);

    labseg::PipelineConfig cfg;
    std::string input;
    CLI::App* run = app.add_subcommand("run", "Segment an image and write all artifacts");
    run->add_option("input", input, "Input image (PNG or binary PPM)")->required();
    add_pipeline_flags(*run, cfg);

    std::string metrics_a, metrics_b;
    double metrics_max_i = 255.0;
    CLI::App* metrics = app.add_subcommand("metrics", "Print MSE/PSNR between two images");
    metrics->add_option("a", metrics_a, "First image")->required();
    metrics->add_option("b", metrics_b, "Second image")->required();
    metrics->add_option("--max-i", metrics_max_i, "PSNR peak value")
        ->check(CLI::PositiveNumber);

    std::string syn_out;
    int syn_w = 120, syn_h = 120;
    double syn_sigma = 0.0;
    std::uint64_t syn_seed = 42;
    CLI::App* gen = app.add_subcommand("gen-synthetic", "Write the three-band test image");
    gen->add_option("output", syn_out, "Output PNG path")->required();
    gen->add_option("--width", syn_w, "Width")->check(CLI::PositiveNumber);
    gen->add_option("--height", syn_h, "Height")->check(CLI::PositiveNumber);
    gen->add_option("--noise-sigma", syn_sigma, "Gaussian channel noise sigma")
        ->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", syn_seed, "Noise seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (run->parsed()) return run_command(input, cfg);
    if (metrics->parsed()) return metrics_command(metrics_a, metrics_b, metrics_max_i);
    if (gen->parsed()) return gen_synthetic_command(syn_out, syn_w, syn_h, syn_sigma, syn_seed);
    return kExitUsage;
}
