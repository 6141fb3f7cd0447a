#include "fireseg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fireseg {

EvalMetrics pixel_metrics(const PixelMask& pred, const PixelMask& gt) {
    if (!pred.same_dimensions(gt)) throw std::invalid_argument("pixel_metrics: dimension mismatch");

    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred.test(i);
        const bool g = gt.test(i);
        tp += p && g;
        fp += p && !g;
        fn += !p && g;
    }

    EvalMetrics m;
    m.n_frames = 1;
    if (tp + fp > 0) {
        m.fp_pct = 100.0 * static_cast<double>(fp) / static_cast<double>(tp + fp);
        m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn > 0) {
        m.fn_pct = 100.0 * static_cast<double>(fn) / static_cast<double>(tp + fn);
        m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    return m;
}

EvalMetrics average_metrics(std::span<const EvalMetrics> per_frame) {
    EvalMetrics avg;
    if (per_frame.empty()) {
        avg.n_frames = 0;
        return avg;
    }
    double fp = 0, fn = 0, prec = 0, rec = 0;
    std::size_t frames = 0;
    for (const EvalMetrics& m : per_frame) {
        fp += m.fp_pct;
        fn += m.fn_pct;
        prec += m.precision;
        rec += m.recall;
        frames += m.n_frames;
    }
    const double n = static_cast<double>(per_frame.size());
    avg.fp_pct = fp / n;
    avg.fn_pct = fn / n;
    avg.precision = prec / n;
    avg.recall = rec / n;
    avg.n_frames = frames;
    return avg;
}

std::optional<Box> bbox_of(const PixelMask& mask) {
    std::optional<Box> box;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.test(x, y)) continue;
            if (!box) {
                box = Box{x, y, x, y};
            } else {
                box->min_x = std::min(box->min_x, x);
                box->min_y = std::min(box->min_y, y);
                box->max_x = std::max(box->max_x, x);
                box->max_y = std::max(box->max_y, y);
            }
        }
    }
    return box;
}

double corner_rmse(const Box& pred, const Box& gt) {
    const double corners[4][4] = {
        {double(pred.min_x), double(pred.min_y), double(gt.min_x), double(gt.min_y)},
        {double(pred.max_x), double(pred.min_y), double(gt.max_x), double(gt.min_y)},
        {double(pred.min_x), double(pred.max_y), double(gt.min_x), double(gt.max_y)},
        {double(pred.max_x), double(pred.max_y), double(gt.max_x), double(gt.max_y)},
    };
    double sq = 0.0;
    for (const auto& c : corners) {
        const double dx = c[0] - c[2];
        const double dy = c[1] - c[3];
        sq += dx * dx + dy * dy;
    }
    return std::sqrt(sq / 4.0);
}

double frame_diagonal(int width, int height) {
    return std::hypot(static_cast<double>(width), static_cast<double>(height));
}

std::int64_t scenario_area(const SynthScenario& s, int t) {
    const double base = static_cast<double>(s.base_area);
    double area = base;
    switch (s.kind) {
    case ScenarioKind::flicker: area = base * (t % 2 == 0 ? 1.1 : 0.9); break;
    case ScenarioKind::grow: area = base * std::pow(s.rate, t); break;
    case ScenarioKind::shrink: area = base * std::pow(s.rate, -t); break;
    case ScenarioKind::flashover: area = t < s.frames / 2 ? base : base * 4.0; break;
    }
    return static_cast<std::int64_t>(std::llround(area));
}

SynthFrame synth_frame(const SynthScenario& s, int t) {
    if (s.width < 4 || s.height < 4) throw std::invalid_argument("synth_frame: frame too small");
    if (t < 0 || t >= s.frames) throw std::invalid_argument("synth_frame: frame index out of range");

    SynthFrame out;
    out.frame = FrameBuffer(s.width, s.height, s.bg_color, t);
    out.gt = PixelMask(s.width, s.height);

    const std::int64_t area = scenario_area(s, t);
    if (area < 1) return out; // fire has vanished entirely

    // Rectangle with the frame's aspect ratio; keep a 1-px background border
    // so the background stays one connected region.
    const double aspect = static_cast<double>(s.width) / static_cast<double>(s.height);
    int w = static_cast<int>(std::lround(std::sqrt(static_cast<double>(area) * aspect)));
    w = std::max(w, 1);
    int h = static_cast<int>(std::lround(static_cast<double>(area) / w));
    h = std::max(h, 1);
    const int max_w = s.width - 2;
    const int max_h = s.height - 2;
    if (w > max_w || h > max_h) {
        out.clamped = true;
        w = std::min(w, max_w);
        h = std::min(h, max_h);
    }

    const int x0 = (s.width - w) / 2;
    const int y0 = (s.height - h) / 2;
    for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) {
            out.frame.at(x, y) = s.fire_color;
            out.gt.set(x, y, true);
        }
    }
    return out;
}

ScenarioKind parse_scenario(const std::string& name) {
    if (name == "flicker") return ScenarioKind::flicker;
    if (name == "grow") return ScenarioKind::grow;
    if (name == "shrink") return ScenarioKind::shrink;
    if (name == "flashover") return ScenarioKind::flashover;
    throw std::invalid_argument("unknown scenario: " + name);
}

std::string to_string(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::flicker: return "flicker";
    case ScenarioKind::grow: return "grow";
    case ScenarioKind::shrink: return "shrink";
    case ScenarioKind::flashover: return "flashover";
    }
    return "?";
}

} // namespace fireseg
