#include "fireseg/granulation.hpp"

#include "fireseg/colorspace.hpp"

#include <algorithm>
#include <cstdlib>

namespace fireseg {

namespace {

int max_channel_diff(Rgb a, Rgb b) {
    const int dr = std::abs(int(a.r) - int(b.r));
    const int dg = std::abs(int(a.g) - int(b.g));
    const int db = std::abs(int(a.b) - int(b.b));
    return std::max({dr, dg, db});
}

} // namespace

GranulatedFrame granulate(const FrameBuffer& f, int thr) {
    if (thr < 1) throw std::invalid_argument("granulate: thr must be >= 1");

    GranulatedFrame gf;
    gf.width = f.width;
    gf.height = f.height;
    gf.pixel_to_granule.assign(f.pixel_count(), -1);

    std::vector<int> queue; // flood-fill worklist, BFS order
    for (int seed = 0; seed < static_cast<int>(f.pixel_count()); ++seed) {
        if (gf.pixel_to_granule[seed] != -1) continue;

        Granule g;
        g.id = static_cast<int>(gf.granules.size());
        g.seed_index = seed;
        const Rgb seed_color = f.pixels[seed];
        g.min_x = g.max_x = seed % f.width;
        g.min_y = g.max_y = seed / f.width;

        double sums[6] = {};
        queue.clear();
        queue.push_back(seed);
        gf.pixel_to_granule[seed] = g.id;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int p = queue[head];
            const int x = p % f.width;
            const int y = p / f.width;
            g.pixel_indices.push_back(p);
            g.min_x = std::min(g.min_x, x);
            g.max_x = std::max(g.max_x, x);
            g.min_y = std::min(g.min_y, y);
            g.max_y = std::max(g.max_y, y);

            const Rgb c = f.pixels[p];
            const YCrCbPixel yc = rgb_to_ycrcb(c);
            sums[0] += c.r;
            sums[1] += c.g;
            sums[2] += c.b;
            sums[3] += yc.y;
            sums[4] += yc.cr;
            sums[5] += yc.cb;

            const int neighbors[4] = {
                x > 0 ? p - 1 : -1,
                x + 1 < f.width ? p + 1 : -1,
                y > 0 ? p - f.width : -1,
                y + 1 < f.height ? p + f.width : -1,
            };
            for (int q : neighbors) {
                if (q < 0 || gf.pixel_to_granule[q] != -1) continue;
                if (max_channel_diff(f.pixels[q], seed_color) >= thr) continue;
                gf.pixel_to_granule[q] = g.id;
                queue.push_back(q);
            }
        }

        const double n = static_cast<double>(g.pixel_indices.size()) * 255.0;
        for (int k = 0; k < 6; ++k) g.mean_feature[k] = sums[k] / n;
        gf.granules.push_back(std::move(g));
    }

    gf.adjacency = build_adjacency(gf);
    return gf;
}

AdjacencyList build_adjacency(const GranulatedFrame& gf) {
    AdjacencyList adj(gf.granules.size());
    auto link = [&](int a, int b) {
        if (a == b) return;
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    for (int y = 0; y < gf.height; ++y) {
        for (int x = 0; x < gf.width; ++x) {
            const int p = y * gf.width + x;
            const int gp = gf.pixel_to_granule[p];
            if (x + 1 < gf.width) link(gp, gf.pixel_to_granule[p + 1]);
            if (y + 1 < gf.height) link(gp, gf.pixel_to_granule[p + gf.width]);
        }
    }
    for (auto& neighbors : adj) {
        std::sort(neighbors.begin(), neighbors.end());
        neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());
    }
    return adj;
}

PixelMask mask_from_granules(const GranulatedFrame& gf, std::span<const int> granule_ids) {
    PixelMask m(gf.width, gf.height);
    for (int id : granule_ids)
        for (int p : gf.granules[id].pixel_indices) m.set(p, true);
    return m;
}

} // namespace fireseg
