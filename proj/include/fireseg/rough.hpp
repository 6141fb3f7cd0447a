#pragma once

#include "fireseg/granulation.hpp"

namespace fireseg {

/// Lower/upper granule-id approximations of the fire region and the
/// boundary (upper minus lower) the agent adjudicates. Ids are kept sorted.
struct RoughApproximation {
    std::vector<int> lower;
    std::vector<int> upper;
    std::vector<int> boundary;
};

/// Granule ids whose every member pixel is set in the mask.
std::vector<int> lower_approximation(const GranulatedFrame& gf, const PixelMask& mask);

/// Granule ids with at least one member pixel set in the mask.
std::vector<int> upper_approximation(const GranulatedFrame& gf, const PixelMask& mask);

/// lower from the YCrCb mask, upper from the union of both masks,
/// boundary = upper \ lower. Any lower granule missing from the upper
/// (cannot happen with a union-based upper, kept as a hard guarantee)
/// is added back so lower is always a subset of upper.
RoughApproximation approximate_fire(const GranulatedFrame& gf, const PixelMask& mask_ycrcb,
                                    const PixelMask& mask_rgb);

} // namespace fireseg
