#include "fireseg/image.hpp"

namespace fireseg {

PixelMask mask_union(const PixelMask& a, const PixelMask& b) {
    if (!a.same_dimensions(b)) throw std::invalid_argument("mask_union: dimension mismatch");
    PixelMask out(a.width, a.height);
    for (std::size_t i = 0; i < out.bits.size(); ++i)
        out.bits[i] = (a.bits[i] | b.bits[i]) ? 1 : 0;
    return out;
}

} // namespace fireseg
