#include <benchmark/benchmark.h>

#include <random>

#include "labseg/kmeans.hpp"
#include "labseg/morphology.hpp"
#include "labseg/pipeline.hpp"
#include "labseg/sobel.hpp"
#include "labseg/watershed.hpp"

using namespace labseg;

namespace {

double uniform(std::mt19937_64& gen) { return double(gen() >> 11) * 0x1.0p-53; }

GrayMap random_gray(int w, int h, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    GrayMap g(w, h);
    for (double& v : g.data) v = uniform(gen) * 255.0;
    return g;
}

}  // namespace

static void BM_SrgbToLab(benchmark::State& state) {
    const SyntheticImage syn = synthetic_thirds(512, 512, 8.0, 1);
    const int threads = int(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(srgb_to_lab(syn.image, threads));
}
BENCHMARK(BM_SrgbToLab)->Arg(1)->Arg(4);

static void BM_KMeansAssign(benchmark::State& state) {
    std::mt19937_64 gen(2);
    FeatureMatrix pts;
    pts.n = 1 << 18;
    pts.d = 2;
    pts.values.resize(std::size_t(pts.n) * pts.d);
    for (double& v : pts.values) v = (uniform(gen) - 0.5) * 200.0;
    Centroids c;
    c.k = 5;
    c.dim = 2;
    c.values.resize(10);
    for (double& v : c.values) v = (uniform(gen) - 0.5) * 200.0;
    const int threads = int(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(assign(pts, c, Distance::Cosine, threads));
}
BENCHMARK(BM_KMeansAssign)->Arg(1)->Arg(4);

static void BM_Sobel(benchmark::State& state) {
    const GrayMap img = random_gray(512, 512, 3);
    const int threads = int(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(sobel_gradient(img, Magnitude::Exact, threads));
}
BENCHMARK(BM_Sobel)->Arg(1)->Arg(4);

static void BM_DistanceTransform(benchmark::State& state) {
    std::mt19937_64 gen(4);
    BinaryMask mask(512, 512);
    for (auto& v : mask.data) v = uniform(gen) < 0.9 ? 1 : 0;
    for (auto _ : state) benchmark::DoNotOptimize(distance_transform_squared(mask));
}
BENCHMARK(BM_DistanceTransform);

static void BM_Reconstruct(benchmark::State& state) {
    const GrayMap mask = random_gray(256, 256, 5);
    GrayMap marker = erode(mask, StructuringElement::disk(4));
    for (auto _ : state)
        benchmark::DoNotOptimize(reconstruct_by_dilation(marker, mask, Connectivity::Eight));
}
BENCHMARK(BM_Reconstruct);

static void BM_WatershedFlood(benchmark::State& state) {
    const GrayMap relief = random_gray(256, 256, 6);
    LabelMap markers(256, 256, 0);
    markers.at(32, 32) = 1;
    markers.at(224, 64) = 2;
    markers.at(128, 200) = 3;
    markers.at(64, 128) = 4;
    for (auto _ : state)
        benchmark::DoNotOptimize(watershed_flood(relief, markers, Connectivity::Eight));
}
BENCHMARK(BM_WatershedFlood);

static void BM_FullPipeline(benchmark::State& state) {
    const SyntheticImage syn = synthetic_thirds(256, 256, 8.0, 7);
    PipelineConfig cfg;
    cfg.threads = int(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(syn.image, cfg));
}
BENCHMARK(BM_FullPipeline)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
