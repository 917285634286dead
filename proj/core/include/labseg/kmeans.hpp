#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "labseg/color.hpp"

namespace labseg {

enum class Distance { Cosine, SqEuclidean };

struct KMeansConfig {
    int k = 3;
    Distance distance = Distance::Cosine;
    int max_iter = 100;
    double tol = 1e-4;  // convergence threshold on max centroid displacement
    std::uint64_t seed = 42;
    int threads = 1;
};

struct Centroids {
    int k = 0;
    int dim = 0;
    std::vector<double> values;  // k rows of dim entries

    std::span<const double> row(int j) const {
        return {values.data() + std::size_t(j) * dim, std::size_t(dim)};
    }
    std::span<double> row(int j) {
        return {values.data() + std::size_t(j) * dim, std::size_t(dim)};
    }
};

struct Assignment {
    std::vector<std::uint32_t> labels;  // one per point, in [0, k)
    double objective = 0.0;             // sum of configured distance to assigned centroid
};

struct KMeansResult {
    Assignment assignment;
    Centroids centroids;
    int iterations = 0;
};

// 1 - (x.y)/(|x||y|), clamped to [0,2]. Either norm below 1e-12 gives exactly
// 1; exactly parallel inputs (equal vectors included) give exactly 0, exactly
// antiparallel ones exactly 2.
double cosine_distance(std::span<const double> x, std::span<const double> y);
double sq_euclidean_distance(std::span<const double> x, std::span<const double> y);
double point_distance(std::span<const double> x, std::span<const double> y, Distance distance);

// k-means++ seeding under the configured distance. Deterministic per seed.
Centroids init_centroids(const FeatureMatrix& features, const KMeansConfig& cfg);
Assignment assign(const FeatureMatrix& features, const Centroids& centroids,
                  Distance distance, int threads = 1);
Centroids update(const FeatureMatrix& features, const Assignment& assignment, int k,
                 Distance distance);
KMeansResult kmeans_run(const FeatureMatrix& features, const KMeansConfig& cfg);

}  // namespace labseg
