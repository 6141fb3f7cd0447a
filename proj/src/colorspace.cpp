#include "fireseg/colorspace.hpp"

#include <cmath>

namespace fireseg {

namespace {

std::uint8_t round_clamp(double v) {
    long n = std::lround(v);
    if (n < 0) n = 0;
    if (n > 255) n = 255;
    return static_cast<std::uint8_t>(n);
}

} // namespace

YCrCbPixel rgb_to_ycrcb(Rgb p) {
    const double y = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
    const double cr = 0.713 * (p.r - y) + 128.0;
    const double cb = 0.564 * (p.b - y) + 128.0;
    return {round_clamp(y), round_clamp(cr), round_clamp(cb)};
}

FrameStats frame_stats(const FrameBuffer& f) {
    if (f.pixels.empty()) throw std::invalid_argument("frame_stats: empty frame");
    double r_sum = 0.0, y_sum = 0.0, cr_sum = 0.0, cb_sum = 0.0;
    for (const Rgb& p : f.pixels) {
        const YCrCbPixel c = rgb_to_ycrcb(p);
        r_sum += p.r;
        y_sum += c.y;
        cr_sum += c.cr;
        cb_sum += c.cb;
    }
    const double n = static_cast<double>(f.pixels.size());
    return {r_sum / n, y_sum / n, cr_sum / n, cb_sum / n};
}

bool ycrcb_pixel_is_fire(YCrCbPixel p, const FrameStats& s) {
    const bool rule1 = p.y >= p.cb && p.cr >= p.cb;
    const bool rule2 = p.y > s.y_mean && p.cr > s.cr_mean && p.cb > s.cb_mean;
    const bool rule3 = p.cb <= 120 && p.cr > 150;
    return rule1 || rule2 || rule3;
}

bool rgb_pixel_is_fire(Rgb p, const FrameStats& s) {
    const bool rule1 = p.r >= s.r_mean;
    const bool rule2 = p.r > p.g && p.g > p.b;
    return rule1 && rule2;
}

PixelMask ycrcb_fire_mask(const FrameBuffer& f, const FrameStats& s) {
    PixelMask m(f.width, f.height);
    for (std::size_t i = 0; i < f.pixels.size(); ++i)
        m.set(i, ycrcb_pixel_is_fire(rgb_to_ycrcb(f.pixels[i]), s));
    return m;
}

PixelMask rgb_fire_mask(const FrameBuffer& f, const FrameStats& s) {
    PixelMask m(f.width, f.height);
    for (std::size_t i = 0; i < f.pixels.size(); ++i)
        m.set(i, rgb_pixel_is_fire(f.pixels[i], s));
    return m;
}

} // namespace fireseg
