#include "labseg/watershed.hpp"

#include <array>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

namespace labseg {
namespace {

constexpr std::array<std::pair<int, int>, 8> kNeighbors = {{
    {-1, 0}, {1, 0}, {0, -1}, {0, 1}, {-1, -1}, {1, -1}, {-1, 1}, {1, 1},
}};

struct QueueEntry {
    double value;
    std::uint64_t seq;
    std::uint32_t index;
    std::uint32_t label;
};

struct EntryGreater {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        if (a.value != b.value) return a.value > b.value;
        return a.seq > b.seq;
    }
};

enum PixelState : std::uint8_t { Unseen = 0, Queued = 1, Done = 2 };

}  // namespace

LabelMap watershed_flood(const GrayMap& relief, const LabelMap& markers, Connectivity conn) {
    if (!relief.same_shape(markers))
        throw std::invalid_argument("image dimensions mismatch");
    const int w = relief.width, h = relief.height;
    const int nn = conn == Connectivity::Four ? 4 : 8;

    LabelMap out(w, h, 0);
    std::vector<std::uint8_t> state(relief.size(), Unseen);
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, EntryGreater> heap;
    std::uint64_t seq = 0;

    bool any_marker = false;
    for (std::size_t i = 0; i < markers.size(); ++i) {
        if (markers[i] == 0) continue;
        any_marker = true;
        out[i] = markers[i];
        state[i] = Done;
    }
    if (!any_marker) throw std::invalid_argument("empty marker set");

    // Seed the queue with the unlabeled neighbors of every marker pixel, in
    // raster order so the tie sequence is reproducible.
    for (std::size_t i = 0; i < markers.size(); ++i) {
        if (markers[i] == 0) continue;
        const int x = int(i % w), y = int(i / w);
        for (int d = 0; d < nn; ++d) {
            const int nx = x + kNeighbors[d].first, ny = y + kNeighbors[d].second;
            if (!relief.in_bounds(nx, ny)) continue;
            const std::size_t q = relief.index(nx, ny);
            if (state[q] != Unseen) continue;
            state[q] = Queued;
            heap.push({relief[q], seq++, std::uint32_t(q), markers[i]});
        }
    }

    while (!heap.empty()) {
        const QueueEntry e = heap.top();
        heap.pop();
        const std::size_t p = e.index;
        const int x = int(p % w), y = int(p / w);

        // Ridge test against finalized neighbors only: pixels still in the
        // queue carry tentative labels that may yet lose a tie.
        std::uint32_t first_label = 0;
        bool ridge = false;
        for (int d = 0; d < nn; ++d) {
            const int nx = x + kNeighbors[d].first, ny = y + kNeighbors[d].second;
            if (!relief.in_bounds(nx, ny)) continue;
            const std::size_t q = relief.index(nx, ny);
            if (state[q] != Done || out[q] == 0) continue;
            if (first_label == 0) {
                first_label = out[q];
            } else if (out[q] != first_label) {
                ridge = true;
                break;
            }
        }

        state[p] = Done;
        if (ridge) {
            out[p] = 0;
            continue;
        }
        out[p] = e.label;
        for (int d = 0; d < nn; ++d) {
            const int nx = x + kNeighbors[d].first, ny = y + kNeighbors[d].second;
            if (!relief.in_bounds(nx, ny)) continue;
            const std::size_t q = relief.index(nx, ny);
            if (state[q] != Unseen) continue;
            state[q] = Queued;
            heap.push({relief[q], seq++, std::uint32_t(q), e.label});
        }
    }
    return out;
}

MarkerSet generate_markers(const GrayMap& segmented_gray, Connectivity conn,
                           int fg_se_radius, int min_marker_area) {
    const StructuringElement se = StructuringElement::disk(fg_se_radius);

    // Opening then closing by reconstruction flattens texture while keeping
    // blob boundaries where they are.
    const GrayMap obr = reconstruct_by_dilation(erode(segmented_gray, se), segmented_gray, conn);
    const GrayMap cbr = reconstruct_by_erosion(dilate(obr, se), obr, conn);

    MarkerSet ms;
    ms.foreground = regional_extrema(cbr, ExtremaKind::Maxima, conn);

    ComponentLabels fg_cc = label_components(ms.foreground, conn);
    std::vector<std::int64_t> area(std::size_t(fg_cc.count) + 1, 0);
    for (std::size_t i = 0; i < fg_cc.labels.size(); ++i) ++area[fg_cc.labels[i]];
    bool any_fg = false;
    for (std::size_t i = 0; i < ms.foreground.size(); ++i) {
        if (ms.foreground[i] && area[fg_cc.labels[i]] < min_marker_area)
            ms.foreground[i] = 0;
        any_fg = any_fg || ms.foreground[i] != 0;
    }
    if (!any_fg) throw std::runtime_error("no foreground markers");

    // Background seeds: ridge lines of the watershed over the negated
    // distance-to-object map. Flooding starts at the points farthest from
    // every thresholded object, so the floods collide along lines that hug
    // the objects; whatever falls outside the foreground masks becomes a
    // reliable background seed.
    const double thr = otsu_threshold(segmented_gray);
    BinaryMask inv(segmented_gray.width, segmented_gray.height, 0);
    for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = segmented_gray[i] > thr ? 0 : 1;

    GrayMap dist = distance_transform(inv);
    for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = -dist[i];
    const BinaryMask far_field = regional_extrema(dist, ExtremaKind::Minima, conn);
    const ComponentLabels far_cc = label_components(far_field, conn);
    const LabelMap ridge_src = watershed_flood(dist, far_cc.labels, conn);

    ms.background = BinaryMask(segmented_gray.width, segmented_gray.height, 0);
    for (std::size_t i = 0; i < ms.background.size(); ++i)
        ms.background[i] = (ridge_src[i] == 0 && !ms.foreground[i]) ? 1 : 0;

    // Label the two marker sets independently: a background ridge running
    // along a foreground blob must stay a separate seed, so the union mask
    // cannot be labeled as one image.
    const ComponentLabels fg_final = label_components(ms.foreground, conn);
    const ComponentLabels bg_cc = label_components(ms.background, conn);
    ms.combined = LabelMap(segmented_gray.width, segmented_gray.height, 0);
    for (std::size_t i = 0; i < ms.combined.size(); ++i) {
        if (fg_final.labels[i])
            ms.combined[i] = fg_final.labels[i];
        else if (bg_cc.labels[i])
            ms.combined[i] = std::uint32_t(fg_final.count) + bg_cc.labels[i];
    }
    ms.count = fg_final.count + bg_cc.count;
    return ms;
}

LabelMap marker_watershed(const GrayMap& relief, const GrayMap& marker_source,
                          Connectivity conn, int fg_se_radius, int min_marker_area) {
    if (!relief.same_shape(marker_source))
        throw std::invalid_argument("image dimensions mismatch");
    MarkerSet ms = generate_markers(marker_source, conn, fg_se_radius, min_marker_area);
    BinaryMask merged(relief.width, relief.height, 0);
    for (std::size_t i = 0; i < merged.size(); ++i)
        merged[i] = (ms.foreground[i] || ms.background[i]) ? 1 : 0;
    const GrayMap modified = impose_minima(relief, merged, conn);
    return watershed_flood(modified, ms.combined, conn);
}

}  // namespace labseg
