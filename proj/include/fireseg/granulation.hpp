#pragma once

#include "fireseg/image.hpp"

#include <array>
#include <span>
#include <vector>

namespace fireseg {

/// 6-channel color descriptor (R,G,B,Y,Cr,Cb), each component in [0,1].
using Feature = std::array<double, 6>;

/// A spatio-color granule: a 4-connected clump of pixels whose max-channel
/// RGB deviation from the flood-fill seed stays below the granulation
/// threshold.
struct Granule {
    int id = 0;
    std::vector<int> pixel_indices; // row-major indices, flood-fill order
    int seed_index = 0;
    Feature mean_feature{}; // mean (R,G,B,Y,Cr,Cb)/255 over member pixels
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;

    std::size_t size() const { return pixel_indices.size(); }
};

using AdjacencyList = std::vector<std::vector<int>>; // sorted neighbor ids per granule

/// A full partition of one frame into granules plus their adjacency graph.
struct GranulatedFrame {
    int width = 0;
    int height = 0;
    std::vector<Granule> granules;    // indexed by granule id
    std::vector<int> pixel_to_granule; // one entry per pixel
    AdjacencyList adjacency;

    std::size_t granule_count() const { return granules.size(); }
};

/// Partition the frame by raster-order seeded flood fill: the first
/// unassigned pixel in row-major order seeds a fill over 4-connected
/// unassigned pixels whose max-channel |RGB - RGB(seed)| < thr. Granule ids
/// follow creation order, so the result is a pure function of (frame, thr).
GranulatedFrame granulate(const FrameBuffer& f, int thr);

/// Symmetric, irreflexive granule adjacency: (a,b) connected iff some pixel
/// of a is 4-adjacent to some pixel of b. granulate() already fills this in;
/// exposed separately so a partition can be re-analyzed on its own.
AdjacencyList build_adjacency(const GranulatedFrame& gf);

/// Mask with exactly the pixels of the listed granules set.
PixelMask mask_from_granules(const GranulatedFrame& gf, std::span<const int> granule_ids);

} // namespace fireseg
