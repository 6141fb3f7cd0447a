#pragma once

#include "fireseg/image.hpp"

namespace fireseg {

struct YCrCbPixel {
    std::uint8_t y = 0;  // luma
    std::uint8_t cr = 0; // red-difference chroma
    std::uint8_t cb = 0; // blue-difference chroma

    friend bool operator==(const YCrCbPixel&, const YCrCbPixel&) = default;
};

/// Full-range BT.601 conversion:
///   y  = 0.299 r + 0.587 g + 0.114 b
///   cr = 0.713 (r - y) + 128
///   cb = 0.564 (b - y) + 128
/// with y kept real-valued inside the chroma terms, each channel rounded to
/// nearest and clamped to [0,255].
YCrCbPixel rgb_to_ycrcb(Rgb p);

/// Per-frame channel means of R and of the converted Y/Cr/Cb values.
struct FrameStats {
    double r_mean = 0.0;
    double y_mean = 0.0;
    double cr_mean = 0.0;
    double cb_mean = 0.0;
};

/// Exact arithmetic means over every pixel of the frame.
FrameStats frame_stats(const FrameBuffer& f);

/// YCrCb rule-base, rules combined by OR:
///   Rule 1: y >= cb and cr >= cb
///   Rule 2: y > y_mean and cr > cr_mean and cb > cb_mean
///   Rule 3: cb <= 120 and cr > 150
bool ycrcb_pixel_is_fire(YCrCbPixel p, const FrameStats& s);

/// RGB rule-base, rules combined by AND:
///   Rule 1: r >= r_mean
///   Rule 2: r > g > b
bool rgb_pixel_is_fire(Rgb p, const FrameStats& s);

/// Candidate fire mask from the YCrCb rules; seeds the lower approximation.
PixelMask ycrcb_fire_mask(const FrameBuffer& f, const FrameStats& s);

/// Candidate fire mask from the RGB rules; feeds the upper approximation.
PixelMask rgb_fire_mask(const FrameBuffer& f, const FrameStats& s);

} // namespace fireseg
