#include "fireseg/frame_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <fnmatch.h>
#include <png.h>

namespace fs = std::filesystem;

namespace fireseg {

static_assert(sizeof(Rgb) == 3, "Rgb must be tightly packed for row I/O");

namespace {

[[noreturn]] void fail(const fs::path& path, const std::string& what) {
    throw std::runtime_error(what + ": " + path.string());
}

std::string lower_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

// ---- PNM (binary PPM/PGM) ----

// Reads one header token, skipping whitespace and '#' comments.
bool pnm_token(std::istream& in, std::string& token) {
    token.clear();
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!token.empty()) return true;
            continue;
        }
        token.push_back(static_cast<char>(c));
    }
    return !token.empty();
}

FrameBuffer read_pnm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open image");

    std::string magic, w, h, maxval;
    if (!pnm_token(in, magic) || (magic != "P6" && magic != "P5"))
        fail(path, "cannot decode image (expected binary PPM or PGM)");
    if (!pnm_token(in, w) || !pnm_token(in, h) || !pnm_token(in, maxval))
        fail(path, "cannot decode image (truncated header)");

    int width = 0, height = 0, max = 0;
    try {
        width = std::stoi(w);
        height = std::stoi(h);
        max = std::stoi(maxval);
    } catch (const std::exception&) {
        fail(path, "cannot decode image (bad header)");
    }
    if (width <= 0 || height <= 0) fail(path, "cannot decode image (bad dimensions)");
    if (max != 255) fail(path, "cannot decode image (only maxval 255 supported)");

    FrameBuffer f(width, height);
    const std::size_t n = f.pixel_count();
    if (magic == "P6") {
        in.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(n * 3));
        if (static_cast<std::size_t>(in.gcount()) != n * 3) fail(path, "cannot decode image (truncated data)");
    } else {
        std::vector<std::uint8_t> gray(n);
        in.read(reinterpret_cast<char*>(gray.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n) fail(path, "cannot decode image (truncated data)");
        for (std::size_t i = 0; i < n; ++i) f.pixels[i] = {gray[i], gray[i], gray[i]};
    }
    return f;
}

void write_ppm(const FrameBuffer& f, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P6\n" << f.width << ' ' << f.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(f.pixels.data()),
              static_cast<std::streamsize>(f.pixel_count() * 3));
    if (!out) fail(path, "write failed");
}

void write_pgm(std::span<const std::uint8_t> gray, int width, int height, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P5\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(gray.data()),
              static_cast<std::streamsize>(gray.size()));
    if (!out) fail(path, "write failed");
}

// ---- PNG via libpng ----

struct PngCleanup {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    bool writing = false;

    ~PngCleanup() {
        if (png) {
            if (writing)
                png_destroy_write_struct(&png, info ? &info : nullptr);
            else
                png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        }
        if (fp) std::fclose(fp);
    }
};

FrameBuffer read_png(const fs::path& path) {
    PngCleanup ctx;
    ctx.fp = std::fopen(path.c_str(), "rb");
    if (!ctx.fp) fail(path, "cannot open image");

    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (ctx.png) ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.png || !ctx.info) fail(path, "cannot decode image (libpng init failed)");

    FrameBuffer f;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(ctx.png))) fail(path, "cannot decode image");

    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);

    const png_uint_32 width = png_get_image_width(ctx.png, ctx.info);
    const png_uint_32 height = png_get_image_height(ctx.png, ctx.info);
    const png_byte color_type = png_get_color_type(ctx.png, ctx.info);
    const png_byte bit_depth = png_get_bit_depth(ctx.png, ctx.info);
    if (width == 0 || height == 0) fail(path, "cannot decode image (bad dimensions)");

    // Normalize any input to 8-bit RGB.
    if (bit_depth == 16) png_set_strip_16(ctx.png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(ctx.png);
    if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(ctx.png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(ctx.png);
    png_set_strip_alpha(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    if (png_get_rowbytes(ctx.png, ctx.info) != width * 3)
        fail(path, "cannot decode image (unexpected row size)");

    f = FrameBuffer(static_cast<int>(width), static_cast<int>(height));
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(f.pixels.data() + static_cast<std::size_t>(y) * width);
    png_read_image(ctx.png, rows.data());
    png_read_end(ctx.png, nullptr);
    return f;
}

void write_png_bytes(const fs::path& path, const std::uint8_t* data, int width, int height,
                     int channels) {
    PngCleanup ctx;
    ctx.writing = true;
    ctx.fp = std::fopen(path.c_str(), "wb");
    if (!ctx.fp) fail(path, "cannot open for writing");

    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (ctx.png) ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.png || !ctx.info) fail(path, "cannot encode image (libpng init failed)");

    std::vector<png_bytep> rows(height);
    if (setjmp(png_jmpbuf(ctx.png))) fail(path, "write failed");

    png_init_io(ctx.png, ctx.fp);
    png_set_IHDR(ctx.png, ctx.info, static_cast<png_uint_32>(width),
                 static_cast<png_uint_32>(height), 8,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(data + static_cast<std::size_t>(y) * width * channels);
    png_write_image(ctx.png, rows.data());
    png_write_end(ctx.png, nullptr);
}

std::vector<std::uint8_t> mask_to_gray(const PixelMask& mask) {
    std::vector<std::uint8_t> gray(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) gray[i] = mask.test(i) ? 255 : 0;
    return gray;
}

} // namespace

FrameBuffer read_image(const fs::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return read_pnm(path);
    if (ext == ".png") return read_png(path);
    fail(path, "unsupported image format");
}

void write_image(const FrameBuffer& f, const fs::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".ppm" || ext == ".pnm") return write_ppm(f, path);
    if (ext == ".png")
        return write_png_bytes(path, reinterpret_cast<const std::uint8_t*>(f.pixels.data()),
                               f.width, f.height, 3);
    fail(path, "unsupported image format");
}

void write_mask(const PixelMask& mask, const fs::path& path) {
    const std::string ext = lower_extension(path);
    const std::vector<std::uint8_t> gray = mask_to_gray(mask);
    if (ext == ".pgm") return write_pgm(gray, mask.width, mask.height, path);
    if (ext == ".png") return write_png_bytes(path, gray.data(), mask.width, mask.height, 1);
    fail(path, "unsupported mask format");
}

PixelMask read_mask(const fs::path& path) {
    const FrameBuffer f = read_image(path);
    PixelMask m(f.width, f.height);
    for (std::size_t i = 0; i < f.pixel_count(); ++i) m.set(i, f.pixels[i].r >= 128);
    return m;
}

std::vector<fs::path> list_sequence_files(const fs::path& dir, const std::string& pattern) {
    if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (fnmatch(pattern.c_str(), name.c_str(), 0) == 0) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    return files;
}

FrameSequence::FrameSequence(const fs::path& dir, const std::string& pattern)
    : files_(list_sequence_files(dir, pattern)) {
    if (!files_.empty())
        pending_ = std::async(std::launch::async, [p = files_[0]] { return read_image(p); });
}

std::optional<FrameBuffer> FrameSequence::next() {
    if (next_index_ >= files_.size()) return std::nullopt;

    FrameBuffer f = pending_.get();
    const std::size_t i = next_index_++;
    if (i + 1 < files_.size())
        pending_ = std::async(std::launch::async, [p = files_[i + 1]] { return read_image(p); });

    if (i == 0) {
        width_ = f.width;
        height_ = f.height;
    } else if (f.width != width_ || f.height != height_) {
        throw std::runtime_error("frame dimension mismatch between " + files_[0].string() +
                                 " and " + files_[i].string());
    }
    f.index = static_cast<int>(i);
    return f;
}

std::string format_decimal(double v) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    std::string s(buf);
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-')
        s.erase(0, 1); // values that round to zero lose the sign
    const std::size_t dot = s.find('.');
    std::size_t last = s.find_last_not_of('0');
    if (last == dot) ++last; // keep one fractional digit
    s.erase(last + 1);
    return s;
}

std::string report_line(const FrameReport& r) {
    std::string line = "{\"frame_index\":" + std::to_string(r.frame_index);
    line += ",\"fire_area\":" + std::to_string(r.fire_area);
    line += ",\"f_mu\":" + format_decimal(r.f_mu);
    line += ",\"f_mu_p\":" + format_decimal(r.f_mu_p);
    line += ",\"threat\":" + format_decimal(r.threat);
    line += std::string(",\"alarm\":") + (r.alarm ? "true" : "false") + "}";
    return line;
}

void write_report(const fs::path& path, std::span<const FrameReport> reports) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    for (const FrameReport& r : reports) out << report_line(r) << '\n';
    if (!out) fail(path, "write failed");
}

} // namespace fireseg
