#pragma once

#include "fireseg/image.hpp"

#include <optional>
#include <span>
#include <string>

namespace fireseg {

struct EvalMetrics {
    double fp_pct = 0.0;    // 100 * FP / (TP + FP), 0 when no predictions
    double fn_pct = 0.0;    // 100 * FN / (TP + FN), 0 when no ground truth
    double precision = 1.0; // TP / (TP + FP), 1 when no predictions
    double recall = 1.0;    // TP / (TP + FN), 1 when no ground truth
    std::size_t n_frames = 0;
};

/// Pixelwise TP/FP/FN metrics for one frame. The denominator conventions
/// keep precision == 1 - fp_pct/100 and recall == 1 - fn_pct/100 exactly.
EvalMetrics pixel_metrics(const PixelMask& pred, const PixelMask& gt);

/// Unweighted average of per-frame metric values.
EvalMetrics average_metrics(std::span<const EvalMetrics> per_frame);

struct Box {
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;

    friend bool operator==(const Box&, const Box&) = default;
};

/// Tight axis-aligned box over the set pixels; nullopt for an empty mask.
std::optional<Box> bbox_of(const PixelMask& mask);

/// Root mean square distance between the four corresponding corners of two
/// boxes.
double corner_rmse(const Box& pred, const Box& gt);

/// Worst-case stand-in when a prediction found nothing but ground truth
/// has a region.
double frame_diagonal(int width, int height);

enum class ScenarioKind { flicker, grow, shrink, flashover };

/// Synthetic ground-truthed sequence: a centered rectangle of fire-rule-
/// conforming color on a rule-violating background, with the rectangle area
/// following the scenario trajectory.
struct SynthScenario {
    ScenarioKind kind = ScenarioKind::flicker;
    int frames = 60;
    int width = 320;
    int height = 240;
    std::int64_t base_area = 2000; // pixels
    double rate = 1.05;            // per-frame growth factor for grow/shrink
    Rgb fire_color{255, 80, 0};
    Rgb bg_color{0, 60, 200};
};

/// Target rectangle area at frame t:
///   flicker:   base * 1.1 on even frames, base * 0.9 on odd
///   grow:      base * rate^t
///   shrink:    base * rate^-t
///   flashover: base for the first half, then base * 4
std::int64_t scenario_area(const SynthScenario& s, int t);

struct SynthFrame {
    FrameBuffer frame;
    PixelMask gt;
    bool clamped = false; // rectangle hit the frame bounds
};

/// Frame t of the scenario, fully determined by (scenario, t). The ground
/// truth mask is exactly the drawn rectangle.
SynthFrame synth_frame(const SynthScenario& s, int t);

ScenarioKind parse_scenario(const std::string& name);
std::string to_string(ScenarioKind kind);

} // namespace fireseg
