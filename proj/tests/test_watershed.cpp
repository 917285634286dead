#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "labseg/sobel.hpp"
#include "labseg/watershed.hpp"
#include "oracles.hpp"

using namespace labseg;

namespace {

GrayMap disk_image(int w, int h, const std::vector<std::pair<int, int>>& centers, int radius,
                   double ground = 20.0, double object = 220.0) {
    GrayMap g(w, h, ground);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (auto [cx, cy] : centers) {
                const int dx = x - cx, dy = y - cy;
                if (dx * dx + dy * dy <= radius * radius) g.at(x, y) = object;
            }
    return g;
}

bool inside_any_disk(int x, int y, const std::vector<std::pair<int, int>>& centers, int radius) {
    for (auto [cx, cy] : centers) {
        const int dx = x - cx, dy = y - cy;
        if (dx * dx + dy * dy <= radius * radius) return true;
    }
    return false;
}

// Pixels reachable from `start` through same-label neighbors.
std::size_t region_reach(const LabelMap& labels, std::size_t start, Connectivity conn) {
    const int nn = oracle::neighbor_count(conn);
    std::vector<char> seen(labels.size(), 0);
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
        const std::size_t p = stack.back();
        stack.pop_back();
        ++reached;
        const int x = int(p % labels.width), y = int(p / labels.width);
        for (int i = 0; i < nn; ++i) {
            const int ux = x + oracle::kNeighbors[i].first;
            const int uy = y + oracle::kNeighbors[i].second;
            if (!labels.in_bounds(ux, uy)) continue;
            const std::size_t q = labels.index(ux, uy);
            if (!seen[q] && labels[q] == labels[p]) {
                seen[q] = 1;
                stack.push_back(q);
            }
        }
    }
    return reached;
}

}  // namespace

TEST_CASE("watershed_flood basics") {
    SUBCASE("single marker floods everything with no ridge") {
        const GrayMap relief(6, 5, 1.0);
        LabelMap markers(6, 5, 0);
        markers.at(3, 2) = 1;
        const LabelMap out = watershed_flood(relief, markers, Connectivity::Eight);
        for (auto v : out.data) CHECK(v == 1);
    }

    SUBCASE("two basins meet at the crest") {
        GrayMap relief(5, 1);
        relief.data = {0, 1, 2, 1, 0};
        LabelMap markers(5, 1, 0);
        markers[0] = 1;
        markers[4] = 2;
        const LabelMap out = watershed_flood(relief, markers, Connectivity::Four);
        CHECK(out.data == std::vector<std::uint32_t>{1, 1, 0, 2, 2});
    }

    SUBCASE("marker pixels keep their labels") {
        std::mt19937_64 gen(97);
        GrayMap relief(9, 7);
        for (double& v : relief.data) v = oracle::uniform(gen);
        LabelMap markers(9, 7, 0);
        markers.at(1, 1) = 3;
        markers.at(7, 5) = 1;
        markers.at(4, 3) = 2;
        const LabelMap out = watershed_flood(relief, markers, Connectivity::Eight);
        CHECK(out.at(1, 1) == 3);
        CHECK(out.at(7, 5) == 1);
        CHECK(out.at(4, 3) == 2);
        for (auto v : out.data) CHECK(v <= 3);
    }

    SUBCASE("repeat runs are identical") {
        std::mt19937_64 gen(101);
        GrayMap relief(12, 10);
        for (double& v : relief.data) v = oracle::uniform(gen);
        LabelMap markers(12, 10, 0);
        markers.at(2, 2) = 1;
        markers.at(9, 8) = 2;
        markers.at(2, 8) = 3;
        const LabelMap a = watershed_flood(relief, markers, Connectivity::Eight);
        const LabelMap b = watershed_flood(relief, markers, Connectivity::Eight);
        CHECK(a.data == b.data);
    }

    SUBCASE("empty marker map throws") {
        const GrayMap relief(3, 3, 0.0);
        const LabelMap markers(3, 3, 0);
        CHECK_THROWS_WITH_AS(watershed_flood(relief, markers, Connectivity::Four),
                             "empty marker set", std::invalid_argument);
    }

    SUBCASE("shape mismatch throws") {
        const GrayMap relief(3, 3, 0.0);
        LabelMap markers(3, 2, 0);
        markers[0] = 1;
        CHECK_THROWS_WITH_AS(watershed_flood(relief, markers, Connectivity::Four),
                             "image dimensions mismatch", std::invalid_argument);
    }
}

TEST_CASE("watershed_flood matches level immersion on distinct-valued reliefs") {
    std::mt19937_64 gen(103);
    for (int trial = 0; trial < 40; ++trial) {
        const Connectivity conn = trial % 2 ? Connectivity::Four : Connectivity::Eight;
        const int w = 8, h = 8;
        std::vector<double> values(std::size_t(w) * h);
        std::iota(values.begin(), values.end(), 0.0);
        std::shuffle(values.begin(), values.end(), gen);
        GrayMap relief(w, h);
        relief.data = values;

        LabelMap markers(w, h, 0);
        const int want = 2 + int(oracle::uniform(gen) * 2);
        std::vector<std::pair<int, int>> placed;
        std::uint32_t next = 1;
        while (int(placed.size()) < want) {
            const int x = int(oracle::uniform(gen) * w), y = int(oracle::uniform(gen) * h);
            bool clash = false;
            for (auto [px, py] : placed)
                clash = clash || (std::abs(px - x) <= 1 && std::abs(py - y) <= 1);
            if (clash) continue;
            placed.emplace_back(x, y);
            markers.at(x, y) = next++;
        }

        const LabelMap fast = watershed_flood(relief, markers, conn);
        const LabelMap ref = oracle::immersion_ref(relief, markers, conn);
        CHECK(fast.data == ref.data);
    }
}

TEST_CASE("watershed_flood partitions into connected regions") {
    std::mt19937_64 gen(107);
    GrayMap relief(14, 11);
    for (double& v : relief.data) v = oracle::uniform(gen) * 50.0;
    LabelMap markers(14, 11, 0);
    markers.at(2, 2) = 1;
    markers.at(11, 3) = 2;
    markers.at(6, 9) = 3;
    const LabelMap out = watershed_flood(relief, markers, Connectivity::Eight);

    std::vector<std::size_t> counts(4, 0);
    for (auto v : out.data) {
        REQUIRE(v <= 3);
        ++counts[v];
    }
    for (int label = 1; label <= 3; ++label) CHECK(counts[label] > 0);

    for (std::size_t i = 0; i < markers.size(); ++i) {
        if (markers[i] == 0) continue;
        CHECK(region_reach(out, i, Connectivity::Eight) == counts[out[i]]);
    }
}

TEST_CASE("generate_markers on synthetic disks") {
    SUBCASE("one bright disk: one foreground blob, background ridge outside") {
        const std::vector<std::pair<int, int>> centers{{20, 16}};
        const GrayMap gray = disk_image(40, 32, centers, 8);
        const MarkerSet ms = generate_markers(gray, Connectivity::Eight, 3, 20);

        CHECK(label_components(ms.foreground, Connectivity::Eight).count == 1);
        bool any_bg = false;
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 40; ++x) {
                if (ms.foreground.at(x, y))
                    CHECK(inside_any_disk(x, y, centers, 8));
                if (ms.background.at(x, y)) {
                    any_bg = true;
                    CHECK(!inside_any_disk(x, y, centers, 8));
                    CHECK(ms.foreground.at(x, y) == 0);
                }
            }
        CHECK(any_bg);
    }

    SUBCASE("two separated disks: two foreground blobs, ridge in the gap") {
        const std::vector<std::pair<int, int>> centers{{12, 16}, {36, 16}};
        const GrayMap gray = disk_image(48, 32, centers, 7);
        const MarkerSet ms = generate_markers(gray, Connectivity::Eight, 3, 20);

        CHECK(label_components(ms.foreground, Connectivity::Eight).count == 2);
        bool gap_ridge = false;
        for (int y = 0; y < 32; ++y)
            for (int x = 20; x <= 28; ++x) gap_ridge = gap_ridge || ms.background.at(x, y) != 0;
        CHECK(gap_ridge);
        for (std::size_t i = 0; i < gray.size(); ++i)
            CHECK((ms.foreground[i] & ms.background[i]) == 0);
    }

    SUBCASE("combined labels keep foreground and background seeds distinct") {
        const GrayMap gray = disk_image(40, 32, {{20, 16}}, 8);
        const MarkerSet ms = generate_markers(gray, Connectivity::Eight, 3, 20);
        const int nf = label_components(ms.foreground, Connectivity::Eight).count;
        const int nb = label_components(ms.background, Connectivity::Eight).count;
        CHECK(ms.count == nf + nb);
        std::set<std::uint32_t> seen;
        for (std::size_t i = 0; i < ms.combined.size(); ++i) {
            const bool marked = (ms.foreground[i] | ms.background[i]) != 0;
            CHECK((ms.combined[i] != 0) == marked);
            if (ms.foreground[i]) CHECK(ms.combined[i] <= std::uint32_t(nf));
            if (ms.background[i]) CHECK(ms.combined[i] > std::uint32_t(nf));
            if (ms.combined[i]) seen.insert(ms.combined[i]);
        }
        CHECK(int(seen.size()) == ms.count);
    }

    SUBCASE("area filter removing every component is an error") {
        const GrayMap gray = disk_image(40, 32, {{20, 16}}, 8);
        CHECK_THROWS_WITH_AS(generate_markers(gray, Connectivity::Eight, 3, 100000),
                             "no foreground markers", std::runtime_error);
    }

    SUBCASE("constant input propagates the histogram error") {
        const GrayMap gray(16, 16, 55.0);
        CHECK_THROWS_WITH_AS(generate_markers(gray, Connectivity::Eight, 3, 20),
                             "degenerate histogram", std::invalid_argument);
    }
}

TEST_CASE("marker_watershed on synthetic disks") {
    SUBCASE("two disks produce at least three regions with distinct labels") {
        const std::vector<std::pair<int, int>> centers{{12, 16}, {36, 16}};
        const GrayMap gray = disk_image(48, 32, centers, 7);
        const GrayMap relief = sobel_gradient(gray).mag;
        const LabelMap labels = marker_watershed(relief, gray, Connectivity::Eight, 3, 20);

        std::set<std::uint32_t> distinct;
        for (auto v : labels.data)
            if (v != 0) distinct.insert(v);
        CHECK(distinct.size() >= 3);

        const std::uint32_t a = labels.at(12, 16);
        const std::uint32_t b = labels.at(36, 16);
        const std::uint32_t bg = labels.at(1, 1);
        CHECK(a != 0);
        CHECK(b != 0);
        CHECK(bg != 0);
        CHECK(a != b);
        CHECK(a != bg);
        CHECK(b != bg);
    }

    SUBCASE("single disk separates object from ground") {
        const GrayMap gray = disk_image(40, 32, {{20, 16}}, 8);
        const GrayMap relief = sobel_gradient(gray).mag;
        const LabelMap labels = marker_watershed(relief, gray, Connectivity::Eight, 3, 20);

        std::set<std::uint32_t> distinct;
        for (auto v : labels.data)
            if (v != 0) distinct.insert(v);
        CHECK(distinct.size() >= 2);
        CHECK(labels.at(20, 16) != 0);
        CHECK(labels.at(1, 1) != 0);
        CHECK(labels.at(20, 16) != labels.at(1, 1));
    }

    SUBCASE("repeat runs are identical") {
        const GrayMap gray = disk_image(40, 32, {{20, 16}}, 8);
        const GrayMap relief = sobel_gradient(gray).mag;
        const LabelMap a = marker_watershed(relief, gray, Connectivity::Eight, 3, 20);
        const LabelMap b = marker_watershed(relief, gray, Connectivity::Eight, 3, 20);
        CHECK(a.data == b.data);
    }
}
