#include "labseg/morphology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>

namespace labseg {
namespace {

// Neighbor offsets; the first 4 entries are the 4-connected ones.
constexpr std::array<std::pair<int, int>, 8> kNeighbors = {{
    {-1, 0}, {1, 0}, {0, -1}, {0, 1}, {-1, -1}, {1, -1}, {-1, 1}, {1, 1},
}};

int neighbor_count(Connectivity conn) { return conn == Connectivity::Four ? 4 : 8; }

template <typename A, typename B>
void check_same_shape(const Raster<A>& a, const Raster<B>& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("image dimensions mismatch");
}

// Raster-order predecessors (already swept) and successors for the hybrid
// reconstruction sweeps.
std::vector<std::pair<int, int>> sweep_neighbors(Connectivity conn, bool forward) {
    std::vector<std::pair<int, int>> out;
    const int n = neighbor_count(conn);
    for (int i = 0; i < n; ++i) {
        auto [dx, dy] = kNeighbors[i];
        const bool before = dy < 0 || (dy == 0 && dx < 0);
        if (before == forward) out.push_back({dx, dy});
    }
    return out;
}

template <bool Dilation>
GrayMap reconstruct_impl(const GrayMap& marker, const GrayMap& mask, Connectivity conn) {
    check_same_shape(marker, mask);
    const int w = marker.width, h = marker.height;
    for (std::size_t i = 0; i < marker.size(); ++i) {
        if (Dilation ? marker[i] > mask[i] : marker[i] < mask[i])
            throw std::invalid_argument(Dilation ? "marker exceeds mask"
                                                 : "marker below mask");
    }

    // Geodesic propagation limited by the mask: dilation spreads maxima and
    // clips from above, erosion spreads minima and clips from below.
    auto extend = [](double a, double b) { return Dilation ? std::max(a, b) : std::min(a, b); };
    auto clip = [](double a, double m) { return Dilation ? std::min(a, m) : std::max(a, m); };
    auto dominates = [](double a, double b) { return Dilation ? a > b : a < b; };

    GrayMap out = marker;
    const auto before = sweep_neighbors(conn, true);
    const auto after = sweep_neighbors(conn, false);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double v = out.at(x, y);
            for (auto [dx, dy] : before) {
                const int nx = x + dx, ny = y + dy;
                if (out.in_bounds(nx, ny)) v = extend(v, out.at(nx, ny));
            }
            out.at(x, y) = clip(v, mask.at(x, y));
        }
    }

    std::queue<std::pair<int, int>> fifo;
    for (int y = h - 1; y >= 0; --y) {
        for (int x = w - 1; x >= 0; --x) {
            double v = out.at(x, y);
            for (auto [dx, dy] : after) {
                const int nx = x + dx, ny = y + dy;
                if (out.in_bounds(nx, ny)) v = extend(v, out.at(nx, ny));
            }
            v = clip(v, mask.at(x, y));
            out.at(x, y) = v;
            for (auto [dx, dy] : after) {
                const int nx = x + dx, ny = y + dy;
                if (!out.in_bounds(nx, ny)) continue;
                const double nv = out.at(nx, ny);
                if (dominates(v, nv) && nv != mask.at(nx, ny)) {
                    fifo.push({x, y});
                    break;
                }
            }
        }
    }

    const int nn = neighbor_count(conn);
    while (!fifo.empty()) {
        auto [x, y] = fifo.front();
        fifo.pop();
        const double v = out.at(x, y);
        for (int i = 0; i < nn; ++i) {
            const int nx = x + kNeighbors[i].first, ny = y + kNeighbors[i].second;
            if (!out.in_bounds(nx, ny)) continue;
            const double nv = out.at(nx, ny);
            const double m = mask.at(nx, ny);
            if (dominates(v, nv) && nv != m) {
                out.at(nx, ny) = clip(v, m);
                fifo.push({nx, ny});
            }
        }
    }
    return out;
}

}  // namespace

StructuringElement StructuringElement::disk(int radius) {
    if (radius < 0) throw std::invalid_argument("negative radius");
    StructuringElement se;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) se.offsets_.push_back({dx, dy});
    return se;
}

StructuringElement::StructuringElement(int side, const std::vector<std::uint8_t>& grid) {
    if (side < 1 || side % 2 == 0) throw std::invalid_argument("side must be odd");
    if (grid.size() != std::size_t(side) * side)
        throw std::invalid_argument("grid size mismatch");
    const int r = side / 2;
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
            if (grid[std::size_t(y) * side + x]) offsets_.push_back({x - r, y - r});
    const bool has_center =
        std::find(offsets_.begin(), offsets_.end(), std::pair<int, int>{0, 0}) != offsets_.end();
    if (!has_center) throw std::invalid_argument("structuring element must contain its center");
}

namespace {

template <bool Erode>
GrayMap se_filter(const GrayMap& img, const StructuringElement& se) {
    const int w = img.width, h = img.height;
    GrayMap out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double v = Erode ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
            for (auto [dx, dy] : se.offsets()) {
                const int sx = std::clamp(x + dx, 0, w - 1);
                const int sy = std::clamp(y + dy, 0, h - 1);
                const double s = img.at(sx, sy);
                v = Erode ? std::min(v, s) : std::max(v, s);
            }
            out.at(x, y) = v;
        }
    }
    return out;
}

}  // namespace

GrayMap erode(const GrayMap& img, const StructuringElement& se) { return se_filter<true>(img, se); }
GrayMap dilate(const GrayMap& img, const StructuringElement& se) { return se_filter<false>(img, se); }

GrayMap reconstruct_by_dilation(const GrayMap& marker, const GrayMap& mask, Connectivity conn) {
    return reconstruct_impl<true>(marker, mask, conn);
}

GrayMap reconstruct_by_erosion(const GrayMap& marker, const GrayMap& mask, Connectivity conn) {
    return reconstruct_impl<false>(marker, mask, conn);
}

BinaryMask regional_extrema(const GrayMap& img, ExtremaKind kind, Connectivity conn) {
    const int w = img.width, h = img.height;
    const int nn = neighbor_count(conn);
    BinaryMask out(w, h, 0);
    std::vector<char> visited(img.size(), 0);
    std::vector<std::size_t> plateau;
    std::queue<std::size_t> bfs;

    for (std::size_t start = 0; start < img.size(); ++start) {
        if (visited[start]) continue;
        const double level = img[start];
        bool is_extremum = true;
        plateau.clear();
        visited[start] = 1;
        bfs.push(start);
        while (!bfs.empty()) {
            const std::size_t p = bfs.front();
            bfs.pop();
            plateau.push_back(p);
            const int x = int(p % w), y = int(p / w);
            for (int i = 0; i < nn; ++i) {
                const int nx = x + kNeighbors[i].first, ny = y + kNeighbors[i].second;
                if (!img.in_bounds(nx, ny)) continue;
                const std::size_t q = img.index(nx, ny);
                const double qv = img[q];
                if (qv == level) {
                    if (!visited[q]) {
                        visited[q] = 1;
                        bfs.push(q);
                    }
                } else if (kind == ExtremaKind::Minima ? qv < level : qv > level) {
                    is_extremum = false;
                }
            }
        }
        if (is_extremum)
            for (std::size_t p : plateau) out[p] = 1;
    }
    return out;
}

GrayMap impose_minima(const GrayMap& img, const BinaryMask& markers, Connectivity conn) {
    check_same_shape(img, markers);
    bool any = false;
    for (std::size_t i = 0; i < markers.size(); ++i) any = any || markers[i] != 0;
    if (!any) throw std::invalid_argument("empty marker set");

    double lo = img[0], hi = img[0];
    for (std::size_t i = 0; i < img.size(); ++i) {
        lo = std::min(lo, img[i]);
        hi = std::max(hi, img[i]);
    }
    const double range = hi - lo;
    const double delta = range > 0.0 ? range * 1e-6 : 1.0;
    const double floor_v = lo - 1.0;
    const double ceil_v = hi + delta + 1.0;

    GrayMap fm(img.width, img.height);
    GrayMap clipped(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) {
        fm[i] = markers[i] ? floor_v : ceil_v;
        clipped[i] = std::min(img[i] + delta, fm[i]);
    }
    return reconstruct_by_erosion(fm, clipped, conn);
}

double otsu_threshold(const GrayMap& img) {
    double lo = img[0], hi = img[0];
    for (std::size_t i = 0; i < img.size(); ++i) {
        lo = std::min(lo, img[i]);
        hi = std::max(hi, img[i]);
    }
    if (!(hi > lo)) throw std::invalid_argument("degenerate histogram");
    const double range = hi - lo;

    std::array<std::int64_t, 256> hist{};
    for (std::size_t i = 0; i < img.size(); ++i) {
        int bin = int((img[i] - lo) / range * 256.0);
        bin = std::clamp(bin, 0, 255);
        ++hist[bin];
    }

    // Between-class variance maximization; weights and means tracked as exact
    // integer sums over bin indices so tie comparisons are stable.
    const double total = double(img.size());
    std::int64_t sum_all = 0;
    for (int b = 0; b < 256; ++b) sum_all += std::int64_t(b) * hist[b];

    int best_t = -1;
    double best_var = -1.0;
    std::int64_t w0 = 0, sum0 = 0;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[t];
        sum0 += std::int64_t(t) * hist[t];
        const std::int64_t w1 = std::int64_t(img.size()) - w0;
        if (w0 == 0 || w1 == 0) continue;
        const double mu0 = double(sum0) / double(w0);
        const double mu1 = double(sum_all - sum0) / double(w1);
        const double diff = mu0 - mu1;
        const double var = (double(w0) / total) * (double(w1) / total) * diff * diff;
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    if (best_t < 0) throw std::invalid_argument("degenerate histogram");
    return lo + (best_t + 1) / 256.0 * range;
}

GrayMap distance_transform_squared(const BinaryMask& mask) {
    const int w = mask.width, h = mask.height;
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

    bool any_false = false;
    for (std::size_t i = 0; i < mask.size(); ++i) any_false = any_false || mask[i] == 0;
    if (!any_false) throw std::invalid_argument("mask has no feature pixels");

    // Column pass: squared vertical distance to the nearest false pixel in
    // the same column (kInf when the column has none).
    std::vector<std::int64_t> g(mask.size(), kInf);
    for (int x = 0; x < w; ++x) {
        std::int64_t run = kInf;
        for (int y = 0; y < h; ++y) {
            run = mask.at(x, y) == 0 ? 0 : (run >= kInf ? kInf : run + 1);
            g[mask.index(x, y)] = run >= kInf ? kInf : run * run;
        }
        run = kInf;
        for (int y = h - 1; y >= 0; --y) {
            run = mask.at(x, y) == 0 ? 0 : (run >= kInf ? kInf : run + 1);
            if (run < kInf)
                g[mask.index(x, y)] = std::min(g[mask.index(x, y)], run * run);
        }
    }

    // Row pass: lower envelope of the parabolas (x - x')^2 + g(x'), skipping
    // infinite columns.
    GrayMap out(w, h);
    std::vector<int> v(w);
    std::vector<double> z(w + 1);
    for (int y = 0; y < h; ++y) {
        const std::int64_t* row = g.data() + std::size_t(y) * w;
        int k = 0;
        v[0] = -1;
        for (int q = 0; q < w; ++q) {
            if (row[q] >= kInf) continue;
            if (v[0] < 0) {
                v[0] = q;
                z[0] = -std::numeric_limits<double>::infinity();
                z[1] = std::numeric_limits<double>::infinity();
                continue;
            }
            double s;
            while (true) {
                const int p = v[k];
                s = (double(row[q] - row[p]) + double(q) * q - double(p) * p) /
                    (2.0 * (q - p));
                if (s <= z[k] && k > 0) {
                    --k;
                } else {
                    break;
                }
            }
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = std::numeric_limits<double>::infinity();
        }
        int j = 0;
        for (int q = 0; q < w; ++q) {
            while (z[j + 1] < q) ++j;
            const int p = v[j];
            const std::int64_t dx = q - p;
            out.at(q, y) = double(dx * dx + row[p]);
        }
        // v[0] < 0 cannot happen: at least one column holds a false pixel, so
        // every row sees at least one finite parabola.
    }
    return out;
}

GrayMap distance_transform(const BinaryMask& mask) {
    GrayMap out = distance_transform_squared(mask);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(out[i]);
    return out;
}

ComponentLabels label_components(const BinaryMask& mask, Connectivity conn) {
    const int w = mask.width, h = mask.height;
    const int nn = neighbor_count(conn);
    ComponentLabels res;
    res.labels = LabelMap(w, h, 0);
    std::queue<std::size_t> bfs;
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || res.labels[start] != 0) continue;
        const std::uint32_t id = std::uint32_t(++res.count);
        res.labels[start] = id;
        bfs.push(start);
        while (!bfs.empty()) {
            const std::size_t p = bfs.front();
            bfs.pop();
            const int x = int(p % w), y = int(p / w);
            for (int i = 0; i < nn; ++i) {
                const int nx = x + kNeighbors[i].first, ny = y + kNeighbors[i].second;
                if (!mask.in_bounds(nx, ny)) continue;
                const std::size_t q = mask.index(nx, ny);
                if (mask[q] && res.labels[q] == 0) {
                    res.labels[q] = id;
                    bfs.push(q);
                }
            }
        }
    }
    return res;
}

}  // namespace labseg
