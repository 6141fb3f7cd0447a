#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fireseg {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// One decoded frame: row-major 8-bit RGB grid plus its ordinal in the sequence.
struct FrameBuffer {
    int width = 0;
    int height = 0;
    int index = 0;
    std::vector<Rgb> pixels; // size == width * height

    FrameBuffer() = default;
    FrameBuffer(int w, int h, Rgb fill = {}, int idx = 0)
        : width(w), height(h), index(idx),
          pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("FrameBuffer: dimensions must be positive");
    }

    std::size_t pixel_count() const { return pixels.size(); }

    const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Per-pixel boolean annotation of a frame, row-major.
struct PixelMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits; // 0 or 1 per pixel

    PixelMask() = default;
    PixelMask(int w, int h, bool fill = false)
        : width(w), height(h),
          bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill ? 1 : 0) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("PixelMask: dimensions must be positive");
    }

    bool test(std::size_t i) const { return bits[i] != 0; }
    void set(std::size_t i, bool v) { bits[i] = v ? 1 : 0; }
    bool test(int x, int y) const { return test(static_cast<std::size_t>(y) * width + x); }
    void set(int x, int y, bool v) { set(static_cast<std::size_t>(y) * width + x, v); }

    std::size_t size() const { return bits.size(); }

    /// Number of set pixels (the fire area when this is a fire mask).
    std::uint64_t count() const {
        std::uint64_t n = 0;
        for (auto b : bits) n += b;
        return n;
    }

    bool same_dimensions(const PixelMask& o) const { return width == o.width && height == o.height; }
    bool matches(const FrameBuffer& f) const { return width == f.width && height == f.height; }

    friend bool operator==(const PixelMask&, const PixelMask&) = default;
};

/// Pixelwise OR of two same-size masks.
PixelMask mask_union(const PixelMask& a, const PixelMask& b);

} // namespace fireseg
