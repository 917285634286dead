#include "labseg/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "labseg/image_io.hpp"
#include "labseg/parallel.hpp"

namespace labseg {
namespace {

using ordered_json = nlohmann::ordered_json;

struct ClusterStats {
    std::vector<Lab> display;  // per-cluster display Lab
};

ClusterStats cluster_display_values(const LabImage& lab, const Assignment& assignment,
                                    const Centroids& centroids, FeatureMode mode) {
    const int k = centroids.k;
    std::vector<double> sum_l(k, 0.0), sum_a(k, 0.0), sum_b(k, 0.0);
    std::vector<std::int64_t> count(k, 0);
    double total_l = 0.0;
    for (std::size_t i = 0; i < lab.size(); ++i) {
        const std::uint32_t j = assignment.labels[i];
        sum_l[j] += lab[i].L;
        sum_a[j] += lab[i].a;
        sum_b[j] += lab[i].b;
        ++count[j];
        total_l += lab[i].L;
    }
    const double mean_l = total_l / double(lab.size());

    ClusterStats st;
    st.display.resize(k);
    for (int j = 0; j < k; ++j) {
        if (count[j] > 0) {
            const double n = double(count[j]);
            st.display[j] = {sum_l[j] / n, sum_a[j] / n, sum_b[j] / n};
        } else if (mode == FeatureMode::Ab) {
            st.display[j] = {mean_l, centroids.row(j)[0], centroids.row(j)[1]};
        } else {
            st.display[j] = {centroids.row(j)[0], centroids.row(j)[1], centroids.row(j)[2]};
        }
    }
    return st;
}

}  // namespace

LabImage segmented_lab(const LabImage& lab, const Assignment& assignment,
                       const Centroids& centroids, FeatureMode mode) {
    if (assignment.labels.size() != lab.size())
        throw std::invalid_argument("assignment size mismatch");
    const ClusterStats st = cluster_display_values(lab, assignment, centroids, mode);
    LabImage out(lab.width, lab.height);
    for (std::size_t i = 0; i < lab.size(); ++i)
        out[i] = st.display[assignment.labels[i]];
    return out;
}

RgbImage render_assignment(const LabImage& lab, const Assignment& assignment,
                           const Centroids& centroids, FeatureMode mode) {
    return lab_to_srgb(segmented_lab(lab, assignment, centroids, mode));
}

RgbImage render_final(const RgbImage& original, const LabelMap& labels) {
    if (!original.same_shape(labels)) throw std::invalid_argument("image dimensions mismatch");
    std::uint32_t max_label = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) max_label = std::max(max_label, labels[i]);

    std::vector<std::uint64_t> sr(max_label + 1, 0), sg(max_label + 1, 0), sb(max_label + 1, 0);
    std::vector<std::uint64_t> count(max_label + 1, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::uint32_t l = labels[i];
        sr[l] += original[i].r;
        sg[l] += original[i].g;
        sb[l] += original[i].b;
        ++count[l];
    }
    std::vector<Rgb8> mean(max_label + 1, Rgb8{0, 0, 0});
    for (std::uint32_t l = 1; l <= max_label; ++l) {
        if (count[l] == 0) continue;
        auto avg = [&](std::uint64_t s) {
            return std::uint8_t(std::llround(double(s) / double(count[l])));
        };
        mean[l] = {avg(sr[l]), avg(sg[l]), avg(sb[l])};
    }

    RgbImage out(original.width, original.height);
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = mean[labels[i]];
    return out;
}

RgbImage overlay_ridges(const RgbImage& original, const LabelMap& labels) {
    if (!original.same_shape(labels)) throw std::invalid_argument("image dimensions mismatch");
    RgbImage out = original;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == 0) out[i] = {0, 0, 0};
    return out;
}

RgbImage lab_preview(const LabImage& lab) {
    RgbImage out(lab.width, lab.height);
    auto clamp_byte = [](double v) {
        return std::uint8_t(std::clamp(std::round(v), 0.0, 255.0));
    };
    for (std::size_t i = 0; i < lab.size(); ++i) {
        out[i] = {clamp_byte(lab[i].L / 100.0 * 255.0), clamp_byte(lab[i].a + 128.0),
                  clamp_byte(lab[i].b + 128.0)};
    }
    return out;
}

BinaryMask gray8_normalized(const GrayMap& img) {
    double lo = img[0], hi = img[0];
    for (std::size_t i = 0; i < img.size(); ++i) {
        lo = std::min(lo, img[i]);
        hi = std::max(hi, img[i]);
    }
    BinaryMask out(img.width, img.height, 0);
    if (hi > lo) {
        for (std::size_t i = 0; i < img.size(); ++i)
            out[i] = std::uint8_t(std::clamp(std::round((img[i] - lo) / (hi - lo) * 255.0),
                                             0.0, 255.0));
    }
    return out;
}

BinaryMask marker_preview(const MarkerSet& markers) {
    BinaryMask out(markers.foreground.width, markers.foreground.height, 0);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = markers.foreground[i] ? 255 : (markers.background[i] ? 128 : 0);
    return out;
}

Gray16 labels_to_gray16(const LabelMap& labels) {
    Gray16 out(labels.width, labels.height, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] > 65535)
            throw std::runtime_error("too many regions for 16-bit label image");
        out[i] = std::uint16_t(labels[i]);
    }
    return out;
}

SyntheticImage synthetic_thirds(int width, int height, double noise_sigma,
                                std::uint64_t seed) {
    static constexpr Rgb8 kBands[3] = {{200, 40, 40}, {40, 180, 60}, {50, 70, 200}};
    SyntheticImage s{RgbImage(width, height), LabelMap(width, height, 0)};

    std::mt19937_64 gen(seed);
    auto uniform = [&] { return double(gen() >> 11) * 0x1.0p-53; };
    // Box-Muller, hand-rolled: std::normal_distribution is not bit-stable
    // across standard libraries.
    auto gaussian = [&] {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
    };
    auto noisy = [&](std::uint8_t base) {
        const double v = double(base) + noise_sigma * gaussian();
        return std::uint8_t(std::clamp(std::round(v), 0.0, 255.0));
    };

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int band = std::min(2, x * 3 / width);
            const Rgb8 base = kBands[band];
            s.truth.at(x, y) = std::uint32_t(band + 1);
            s.image.at(x, y) = noise_sigma > 0.0
                                   ? Rgb8{noisy(base.r), noisy(base.g), noisy(base.b)}
                                   : base;
        }
    }
    return s;
}

namespace {

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& out) : out_(out) {}

    template <typename Fn>
    auto run(const std::string& name, Fn&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(fn())>) {
                fn();
                record(name, t0);
            } else {
                auto value = fn();
                record(name, t0);
                return value;
            }
        } catch (const std::exception& e) {
            throw std::runtime_error(name + ": " + e.what());
        }
    }

private:
    void record(const std::string& name, std::chrono::steady_clock::time_point t0) {
        const auto t1 = std::chrono::steady_clock::now();
        out_.push_back({name, std::chrono::duration<double, std::milli>(t1 - t0).count()});
    }

    std::vector<StageTiming>& out_;
};

}  // namespace

PipelineResult run_pipeline(const RgbImage& img, const PipelineConfig& cfg) {
    PipelineResult res;
    StageClock clock(res.timings);

    res.lab = clock.run("srgb_to_lab", [&] { return srgb_to_lab(img, cfg.threads); });
    FeatureMatrix features =
        clock.run("extract_features", [&] { return extract_features(res.lab, cfg.features); });

    KMeansConfig kc;
    kc.k = cfg.k;
    kc.distance = cfg.distance;
    kc.max_iter = cfg.max_iter;
    kc.tol = cfg.tol;
    kc.seed = cfg.seed;
    kc.threads = cfg.threads;
    KMeansResult km = clock.run("kmeans", [&] { return kmeans_run(features, kc); });
    res.assignment = std::move(km.assignment);
    res.centroids = std::move(km.centroids);
    res.iterations = km.iterations;

    clock.run("render_clusters", [&] {
        const LabImage seg = segmented_lab(res.lab, res.assignment, res.centroids, cfg.features);
        res.cluster_render = lab_to_srgb(seg, cfg.threads);
        res.segmented_gray = lightness_of(seg);
    });

    res.relief = clock.run("gradient", [&] {
        return sobel_gradient(res.segmented_gray, cfg.magnitude, cfg.threads).mag;
    });

    double gray_lo = res.segmented_gray[0], gray_hi = res.segmented_gray[0];
    for (std::size_t i = 0; i < res.segmented_gray.size(); ++i) {
        gray_lo = std::min(gray_lo, res.segmented_gray[i]);
        gray_hi = std::max(gray_hi, res.segmented_gray[i]);
    }

    if (gray_hi > gray_lo) {
        clock.run("markers", [&] {
            res.markers = generate_markers(res.segmented_gray, cfg.connectivity,
                                           cfg.fg_se_radius, cfg.min_marker_area);
        });
        res.labels = clock.run("watershed", [&] {
            BinaryMask merged(img.width, img.height, 0);
            for (std::size_t i = 0; i < merged.size(); ++i)
                merged[i] = (res.markers.foreground[i] || res.markers.background[i]) ? 1 : 0;
            const GrayMap modified = impose_minima(res.relief, merged, cfg.connectivity);
            return watershed_flood(modified, res.markers.combined, cfg.connectivity);
        });
    } else {
        // Constant segmented grayscale: no marker recipe can apply (Otsu is
        // degenerate); the whole image is one region.
        clock.run("markers", [&] {
            res.markers.foreground = BinaryMask(img.width, img.height, 1);
            res.markers.background = BinaryMask(img.width, img.height, 0);
            res.markers.combined = LabelMap(img.width, img.height, 1);
            res.markers.count = 1;
        });
        clock.run("watershed", [&] { res.labels = LabelMap(img.width, img.height, 1); });
    }

    res.final_render =
        clock.run("render_final", [&] { return render_final(img, res.labels); });

    res.metrics = clock.run("metrics", [&] {
        if (cfg.metrics_target == MetricsTarget::RidgeOverlay)
            return compute_metrics(img, overlay_ridges(img, res.labels), cfg.max_i);
        return compute_metrics(img, res.final_render, cfg.max_i);
    });
    return res;
}

std::string metrics_to_json(const MetricsReport& report) {
    ordered_json j;
    j["mse"] = {report.mse[0], report.mse[1], report.mse[2]};
    ordered_json psnr = ordered_json::array();
    for (int c = 0; c < 3; ++c) {
        if (std::isinf(report.psnr_db[c]))
            psnr.push_back("inf");
        else
            psnr.push_back(report.psnr_db[c]);
    }
    j["psnr_db"] = std::move(psnr);
    j["max_i"] = report.max_i;
    return j.dump(2) + "\n";
}

std::string timings_to_json(const std::vector<StageTiming>& timings) {
    ordered_json stages = ordered_json::array();
    double total = 0.0;
    for (const auto& t : timings) {
        stages.push_back(ordered_json{{"stage", t.stage}, {"ms", t.ms}});
        total += t.ms;
    }
    ordered_json j;
    j["stages"] = std::move(stages);
    j["total_ms"] = total;
    return j.dump(2) + "\n";
}

void write_outputs(const PipelineResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);
    const fs::path dir(out_dir);

    save_png((dir / "lab_preview.png").string(), lab_preview(result.lab));
    save_png((dir / "clusters.png").string(), result.cluster_render);
    save_png_gray8((dir / "gradient.png").string(), gray8_normalized(result.relief));
    save_png_gray8((dir / "markers.png").string(), marker_preview(result.markers));
    save_png_gray16((dir / "labels.png").string(), labels_to_gray16(result.labels));
    save_png((dir / "final.png").string(), result.final_render);

    auto write_text = [&](const fs::path& p, const std::string& text) {
        std::ofstream f(p, std::ios::binary);
        if (!f || !(f << text)) throw IoError("cannot write " + p.string());
    };
    write_text(dir / "metrics.json", metrics_to_json(result.metrics));
    write_text(dir / "timings.json", timings_to_json(result.timings));
}

}  // namespace labseg
