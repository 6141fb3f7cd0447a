#pragma once

#include "fireseg/image.hpp"

#include <filesystem>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fireseg {

/// Decode a still image (.ppm/.pgm binary, or .png) to 8-bit RGB.
/// Grayscale sources are expanded to equal channels. Throws with the file
/// name on anything unreadable or undecodable.
FrameBuffer read_image(const std::filesystem::path& path);

/// Encode a frame as binary PPM or as RGB PNG, chosen by extension.
void write_image(const FrameBuffer& f, const std::filesystem::path& path);

/// Binary mask image: fire pixels white (255), everything else black (0).
/// Extension selects PGM or grayscale PNG.
void write_mask(const PixelMask& mask, const std::filesystem::path& path);

/// Inverse of write_mask: any pixel with red channel >= 128 counts as set,
/// so written masks round-trip bit-exactly.
PixelMask read_mask(const std::filesystem::path& path);

/// Regular files in dir whose names match the glob, sorted by filename so
/// that two runs see the same order.
std::vector<std::filesystem::path> list_sequence_files(const std::filesystem::path& dir,
                                                       const std::string& pattern = "*");

/// Ordered frame stream over a directory. Decoding of the following frame
/// overlaps the caller's processing of the current one, but next() always
/// hands frames out in filename order with consecutive indices from 0 and
/// enforces constant dimensions across the stream.
class FrameSequence {
public:
    FrameSequence(const std::filesystem::path& dir, const std::string& pattern = "*");

    std::size_t file_count() const { return files_.size(); }
    const std::vector<std::filesystem::path>& files() const { return files_; }

    /// Next frame, or nullopt at end of stream.
    std::optional<FrameBuffer> next();

private:
    std::vector<std::filesystem::path> files_;
    std::size_t next_index_ = 0;
    int width_ = 0;
    int height_ = 0;
    std::future<FrameBuffer> pending_;
};

/// Per-frame pipeline outputs destined for the JSON-lines report.
struct FrameReport {
    int frame_index = 0;
    std::uint64_t fire_area = 0; // pixels
    double f_mu = 0.0;
    double f_mu_p = 0.0;
    double threat = 0.0;
    bool alarm = false;
};

/// Plain decimal rendering of a double (never exponent notation), up to 9
/// fractional digits with trailing zeros trimmed but one digit kept.
std::string format_decimal(double v);

/// One report as a single JSON object, no trailing newline.
std::string report_line(const FrameReport& r);

/// One JSON object per line, in order. Empty input writes an empty file.
void write_report(const std::filesystem::path& path, std::span<const FrameReport> reports);

} // namespace fireseg
