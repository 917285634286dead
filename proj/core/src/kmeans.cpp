#include "labseg/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "labseg/parallel.hpp"

namespace labseg {
namespace {

constexpr double kNormFloor = 1e-12;

// Uniform double in [0,1) from the top 53 bits; std distributions are
// implementation-defined, this mapping is bit-stable across platforms.
double next_uniform(std::mt19937_64& gen) {
    return double(gen() >> 11) * 0x1.0p-53;
}

void check_dims(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("vector dimension mismatch");
}

double euclidean(std::span<const double> x, std::span<const double> y) {
    return std::sqrt(sq_euclidean_distance(x, y));
}

}  // namespace

double cosine_distance(std::span<const double> x, std::span<const double> y) {
    check_dims(x.size(), y.size());
    bool equal = true;
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        equal = equal && x[i] == y[i];
        dot += x[i] * y[i];
        nx += x[i] * x[i];
        ny += y[i] * y[i];
    }
    if (equal && nx >= kNormFloor * kNormFloor) return 0.0;
    if (nx < kNormFloor * kNormFloor || ny < kNormFloor * kNormFloor) return 1.0;
    // Cauchy-Schwarz equality: dot^2 == |x|^2 |y|^2 exactly iff the vectors
    // are parallel, so exactly parallel inputs land on exactly 0 or 2.
    const double lhs = dot * dot, rhs = nx * ny;
    if (std::isfinite(lhs) && std::isfinite(rhs) && lhs == rhs)
        return dot > 0.0 ? 0.0 : 2.0;
    double c = dot / (std::sqrt(nx) * std::sqrt(ny));
    c = std::clamp(c, -1.0, 1.0);
    return 1.0 - c;
}

double sq_euclidean_distance(std::span<const double> x, std::span<const double> y) {
    check_dims(x.size(), y.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

double point_distance(std::span<const double> x, std::span<const double> y, Distance distance) {
    return distance == Distance::Cosine ? cosine_distance(x, y)
                                        : sq_euclidean_distance(x, y);
}

Centroids init_centroids(const FeatureMatrix& features, const KMeansConfig& cfg) {
    const int n = features.n, d = features.d, k = cfg.k;
    if (k < 1) throw std::invalid_argument("cluster count must be >= 1");
    if (n < k) throw std::invalid_argument("fewer points than clusters");

    std::mt19937_64 gen(cfg.seed);
    Centroids c;
    c.k = k;
    c.dim = d;
    c.values.resize(std::size_t(k) * d);

    std::vector<char> chosen(n, 0);
    auto take = [&](int j, int idx) {
        chosen[idx] = 1;
        auto src = features.row(idx);
        std::copy(src.begin(), src.end(), c.row(j).begin());
    };
    // Lowest-index point not picked yet; fallback when every candidate weight
    // is zero (all remaining points duplicate a chosen centroid).
    auto first_unchosen = [&] {
        for (int i = 0; i < n; ++i)
            if (!chosen[i]) return i;
        return 0;
    };

    int first = int(next_uniform(gen) * n);
    if (first >= n) first = n - 1;
    take(0, first);

    // k-means++: weight each point by the configured distance to its nearest
    // chosen centroid, then sample the next centroid from those weights.
    std::vector<double> dist(n);
    for (int i = 0; i < n; ++i)
        dist[i] = point_distance(features.row(i), c.row(0), cfg.distance);

    for (int j = 1; j < k; ++j) {
        double total = 0.0;
        for (int i = 0; i < n; ++i)
            if (!chosen[i]) total += dist[i];

        int pick = -1;
        if (total > 0.0) {
            const double r = next_uniform(gen) * total;
            double cum = 0.0;
            int last_positive = -1;
            for (int i = 0; i < n; ++i) {
                if (chosen[i] || dist[i] <= 0.0) continue;
                last_positive = i;
                cum += dist[i];
                if (cum > r) {
                    pick = i;
                    break;
                }
            }
            if (pick < 0) pick = last_positive;  // r hit the total exactly
        }
        if (pick < 0) pick = first_unchosen();
        take(j, pick);

        for (int i = 0; i < n; ++i) {
            if (chosen[i]) continue;
            const double dn = point_distance(features.row(i), c.row(j), cfg.distance);
            if (dn < dist[i]) dist[i] = dn;
        }
    }
    return c;
}

Assignment assign(const FeatureMatrix& features, const Centroids& centroids,
                  Distance distance, int threads) {
    const int n = features.n, k = centroids.k;
    check_dims(std::size_t(features.d), std::size_t(centroids.dim));
    if (k < 1) throw std::invalid_argument("no centroids");

    Assignment a;
    a.labels.resize(n);
    std::vector<double> best(n);
    parallel_for(std::size_t(n), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto x = features.row(int(i));
            std::uint32_t label = 0;
            double bd = point_distance(x, centroids.row(0), distance);
            for (int j = 1; j < k; ++j) {
                const double dj = point_distance(x, centroids.row(j), distance);
                if (dj < bd) {
                    bd = dj;
                    label = std::uint32_t(j);
                }
            }
            a.labels[i] = label;
            best[i] = bd;
        }
    });
    // Sequential fixed-order reduction keeps the objective identical at any
    // thread count.
    double obj = 0.0;
    for (int i = 0; i < n; ++i) obj += best[i];
    a.objective = obj;
    return a;
}

Centroids update(const FeatureMatrix& features, const Assignment& assignment, int k,
                 Distance distance) {
    const int n = features.n, d = features.d;
    if (int(assignment.labels.size()) != n)
        throw std::invalid_argument("assignment size mismatch");

    Centroids c;
    c.k = k;
    c.dim = d;
    c.values.assign(std::size_t(k) * d, 0.0);
    std::vector<std::int64_t> count(k, 0);

    for (int i = 0; i < n; ++i) {
        const std::uint32_t j = assignment.labels[i];
        if (j >= std::uint32_t(k)) throw std::invalid_argument("label out of range");
        auto x = features.row(i);
        auto row = c.row(int(j));
        if (distance == Distance::Cosine) {
            double norm = 0.0;
            for (int t = 0; t < d; ++t) norm += x[t] * x[t];
            norm = std::sqrt(norm);
            if (norm < kNormFloor) continue;  // zero-norm members are skipped
            for (int t = 0; t < d; ++t) row[t] += x[t] / norm;
        } else {
            for (int t = 0; t < d; ++t) row[t] += x[t];
        }
        ++count[j];
    }
    for (int j = 0; j < k; ++j) {
        if (count[j] == 0) continue;
        auto row = c.row(j);
        for (int t = 0; t < d; ++t) row[t] /= double(count[j]);
    }

    // A cluster that lost all members (or whose members were all skipped as
    // zero-norm) is reseeded to the globally worst-fit point under the new
    // centroids; each reseed consumes its point so two empty clusters cannot
    // collide.
    std::vector<char> consumed(n, 0);
    for (int j = 0; j < k; ++j) {
        if (count[j] != 0) continue;
        int worst = -1;
        double worst_d = -1.0;
        for (int i = 0; i < n; ++i) {
            if (consumed[i]) continue;
            const std::uint32_t owner = assignment.labels[i];
            if (count[owner] == 0) continue;
            const double di = point_distance(features.row(i), c.row(int(owner)), distance);
            if (di > worst_d) {
                worst_d = di;
                worst = i;
            }
        }
        if (worst < 0) worst = 0;
        consumed[worst] = 1;
        auto src = features.row(worst);
        std::copy(src.begin(), src.end(), c.row(j).begin());
    }
    return c;
}

KMeansResult kmeans_run(const FeatureMatrix& features, const KMeansConfig& cfg) {
    if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (cfg.tol < 0.0) throw std::invalid_argument("tol must be >= 0");

    KMeansResult res;
    res.centroids = init_centroids(features, cfg);
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        Assignment a = assign(features, res.centroids, cfg.distance, cfg.threads);
        Centroids next = update(features, a, cfg.k, cfg.distance);
        double shift = 0.0;
        for (int j = 0; j < cfg.k; ++j)
            shift = std::max(shift, euclidean(res.centroids.row(j), next.row(j)));
        res.centroids = std::move(next);
        res.iterations = iter;
        if (shift <= cfg.tol) break;
    }
    res.assignment = assign(features, res.centroids, cfg.distance, cfg.threads);
    return res;
}

}  // namespace labseg
