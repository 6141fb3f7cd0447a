#include "fireseg/rough.hpp"

#include <algorithm>

namespace fireseg {

namespace {

void require_match(const GranulatedFrame& gf, const PixelMask& mask, const char* who) {
    if (mask.width != gf.width || mask.height != gf.height)
        throw std::invalid_argument(std::string(who) + ": mask dimensions do not match frame");
}

} // namespace

std::vector<int> lower_approximation(const GranulatedFrame& gf, const PixelMask& mask) {
    require_match(gf, mask, "lower_approximation");
    std::vector<int> ids;
    for (const Granule& g : gf.granules) {
        const bool all_set = std::all_of(g.pixel_indices.begin(), g.pixel_indices.end(),
                                         [&](int p) { return mask.test(p); });
        if (all_set) ids.push_back(g.id);
    }
    return ids;
}

std::vector<int> upper_approximation(const GranulatedFrame& gf, const PixelMask& mask) {
    require_match(gf, mask, "upper_approximation");
    std::vector<int> ids;
    for (const Granule& g : gf.granules) {
        const bool any_set = std::any_of(g.pixel_indices.begin(), g.pixel_indices.end(),
                                         [&](int p) { return mask.test(p); });
        if (any_set) ids.push_back(g.id);
    }
    return ids;
}

RoughApproximation approximate_fire(const GranulatedFrame& gf, const PixelMask& mask_ycrcb,
                                    const PixelMask& mask_rgb) {
    RoughApproximation ra;
    ra.lower = lower_approximation(gf, mask_ycrcb);
    ra.upper = upper_approximation(gf, mask_union(mask_rgb, mask_ycrcb));

    std::vector<int> missing;
    std::set_difference(ra.lower.begin(), ra.lower.end(), ra.upper.begin(), ra.upper.end(),
                        std::back_inserter(missing));
    if (!missing.empty()) {
        std::vector<int> merged;
        std::set_union(ra.upper.begin(), ra.upper.end(), missing.begin(), missing.end(),
                       std::back_inserter(merged));
        ra.upper = std::move(merged);
    }

    std::set_difference(ra.upper.begin(), ra.upper.end(), ra.lower.begin(), ra.lower.end(),
                        std::back_inserter(ra.boundary));
    return ra;
}

} // namespace fireseg
