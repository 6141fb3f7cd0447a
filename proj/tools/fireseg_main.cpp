// fireseg: unsupervised fire-region segmentation and fire-threat scoring
// over directories of numbered frame images.

#include "fireseg/agent.hpp"
#include "fireseg/eval.hpp"
#include "fireseg/frame_io.hpp"
#include "fireseg/threat.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct SegmentOptions {
    std::string input;
    std::string out;
    std::string pattern = "*";
    std::string mask_format = "pgm";
    fireseg::PipelineConfig pipeline;
    std::string load_qtable;
    std::string save_qtable;
};

struct ThreatOptions {
    SegmentOptions seg; // out is optional here
    double fps = 30.0;
    int p = 0; // 0 = derive from fps
    double alarm_tau = 0.2;
    int alarm_k = 0; // 0 = derive from fps
    std::string report;
    std::string plot;
};

void add_pipeline_flags(CLI::App* cmd, SegmentOptions& opt) {
    cmd->add_option("--pattern", opt.pattern, "Filename glob for input frames")
        ->capture_default_str();
    cmd->add_option("--thr", opt.pipeline.thr, "Granulation color threshold (1-255)")
        ->check(CLI::Range(1, 255))
        ->capture_default_str();
    cmd->add_option("--gamma", opt.pipeline.agent.gamma, "Q-agent discount factor [0,1)")
        ->check(CLI::Range(0.0, 0.9999))
        ->capture_default_str();
    cmd->add_option("--quant-levels", opt.pipeline.agent.quant_levels,
                    "Per-channel state quantization levels")
        ->check(CLI::Range(2, 65535))
        ->capture_default_str();
    cmd->add_option("--lookahead", opt.pipeline.agent.lookahead_depth,
                    "Boundary-walk lookahead depth")
        ->check(CLI::Range(1, 8))
        ->capture_default_str();
    cmd->add_option("--mask-format", opt.mask_format, "Mask image format")
        ->check(CLI::IsMember({"pgm", "png"}))
        ->capture_default_str();
    cmd->add_option("--load-qtable", opt.load_qtable, "Warm-start Q-table file");
    cmd->add_option("--save-qtable", opt.save_qtable, "Write the trained Q-table here");
}

fireseg::QTable open_qtable(const SegmentOptions& opt) {
    if (opt.load_qtable.empty()) return {};
    return fireseg::QTable::load(opt.load_qtable, opt.pipeline.agent);
}

fs::path mask_path(const fs::path& out_dir, const fs::path& frame_file,
                   const std::string& format) {
    return out_dir / (frame_file.stem().string() + "." + format);
}

int run_segment(const SegmentOptions& opt) {
    fs::create_directories(opt.out);
    fireseg::QTable qt = open_qtable(opt);
    fireseg::FrameSequence seq(opt.input, opt.pattern);

    std::size_t frames = 0;
    while (auto frame = seq.next()) {
        const auto seg = fireseg::segment_frame(*frame, opt.pipeline, qt);
        fireseg::write_mask(seg.mask, mask_path(opt.out, seq.files()[frame->index], opt.mask_format));
        ++frames;
    }
    if (!opt.save_qtable.empty()) qt.save(opt.save_qtable, opt.pipeline.agent);
    std::cout << "segmented " << frames << " frame(s) into " << opt.out << "\n";
    return 0;
}

int run_threat(const ThreatOptions& opt) {
    const int p = opt.p > 0 ? opt.p : fireseg::choose_p(opt.fps);
    fireseg::AlarmPolicy policy;
    policy.tau = opt.alarm_tau;
    policy.k = opt.alarm_k > 0 ? opt.alarm_k : fireseg::default_alarm_k(opt.fps);

    std::ofstream report(opt.report, std::ios::binary);
    if (!report) throw std::runtime_error("cannot open for writing: " + opt.report);

    std::ofstream plot;
    if (!opt.plot.empty()) {
        plot.open(opt.plot, std::ios::binary);
        if (!plot) throw std::runtime_error("cannot open for writing: " + opt.plot);
        plot << "frame_index,threat\n";
    }

    // Header line with every knob, so a report is self-describing.
    ordered_json header;
    header["type"] = "header";
    header["input"] = opt.seg.input;
    header["fps"] = opt.fps;
    header["p"] = p;
    header["alarm_tau"] = policy.tau;
    header["alarm_k"] = policy.k;
    header["thr"] = opt.seg.pipeline.thr;
    header["gamma"] = opt.seg.pipeline.agent.gamma;
    header["quant_levels"] = opt.seg.pipeline.agent.quant_levels;
    header["lookahead_depth"] = opt.seg.pipeline.agent.lookahead_depth;
    report << header.dump() << '\n';

    if (!opt.seg.out.empty()) fs::create_directories(opt.seg.out);
    fireseg::QTable qt = open_qtable(opt.seg);
    fireseg::FrameSequence seq(opt.seg.input, opt.seg.pattern);
    fireseg::ThreatTracker tracker(p);
    std::vector<double> threats;
    std::size_t frames = 0;
    std::size_t alarms = 0;

    while (auto frame = seq.next()) {
        const auto seg = fireseg::segment_frame(*frame, opt.seg.pipeline, qt);
        if (!opt.seg.out.empty())
            fireseg::write_mask(seg.mask,
                                mask_path(opt.seg.out, seq.files()[frame->index], opt.seg.mask_format));

        const std::uint64_t area = seg.mask.count();
        const auto sample = tracker.update(area);
        threats.push_back(sample.threat);

        fireseg::FrameReport fr;
        fr.frame_index = frame->index;
        fr.fire_area = area;
        fr.f_mu = sample.f_mu;
        fr.f_mu_p = sample.f_mu_p;
        fr.threat = sample.threat;
        fr.alarm = fireseg::alarm(policy, threats);
        report << fireseg::report_line(fr) << '\n';
        if (plot.is_open()) plot << fr.frame_index << ',' << fireseg::format_decimal(fr.threat) << '\n';

        alarms += fr.alarm;
        ++frames;
    }
    if (!report) throw std::runtime_error("write failed: " + opt.report);
    if (!opt.seg.save_qtable.empty()) qt.save(opt.seg.save_qtable, opt.seg.pipeline.agent);
    std::cout << "processed " << frames << " frame(s), " << alarms << " alarm frame(s), report in "
              << opt.report << "\n";
    return 0;
}

int run_eval(const std::string& pred_dir, const std::string& gt_dir, const std::string& report) {
    const auto pred_files = fireseg::list_sequence_files(pred_dir);
    const auto gt_files = fireseg::list_sequence_files(gt_dir);
    if (pred_files.size() != gt_files.size())
        throw std::runtime_error("prediction/ground-truth counts differ: " +
                                 std::to_string(pred_files.size()) + " vs " +
                                 std::to_string(gt_files.size()));

    std::vector<fireseg::EvalMetrics> per_frame;
    double rmse_sum = 0.0;
    std::size_t rmse_frames = 0;
    double rmse_worst_sum = 0.0;
    std::size_t rmse_worst_frames = 0;
    std::size_t undefined_frames = 0;

    for (std::size_t i = 0; i < pred_files.size(); ++i) {
        const fireseg::PixelMask pred = fireseg::read_mask(pred_files[i]);
        const fireseg::PixelMask gt = fireseg::read_mask(gt_files[i]);
        if (!pred.same_dimensions(gt))
            throw std::runtime_error("mask dimension mismatch between " + pred_files[i].string() +
                                     " and " + gt_files[i].string());
        per_frame.push_back(fireseg::pixel_metrics(pred, gt));

        const auto pred_box = fireseg::bbox_of(pred);
        const auto gt_box = fireseg::bbox_of(gt);
        if (pred_box && gt_box) {
            const double rmse = fireseg::corner_rmse(*pred_box, *gt_box);
            rmse_sum += rmse;
            ++rmse_frames;
            rmse_worst_sum += rmse;
            ++rmse_worst_frames;
        } else {
            ++undefined_frames;
            if (gt_box && !pred_box) {
                // Missed region entirely: charge the frame diagonal.
                rmse_worst_sum += fireseg::frame_diagonal(gt.width, gt.height);
                ++rmse_worst_frames;
            }
        }
    }

    const auto avg = fireseg::average_metrics(per_frame);
    ordered_json summary;
    summary["fp_pct"] = avg.fp_pct;
    summary["fn_pct"] = avg.fn_pct;
    summary["precision"] = avg.precision;
    summary["recall"] = avg.recall;
    summary["avg_corner_rmse"] = rmse_frames ? rmse_sum / static_cast<double>(rmse_frames) : 0.0;
    summary["undefined_frames"] = undefined_frames;
    summary["avg_corner_rmse_worst_case"] =
        rmse_worst_frames ? rmse_worst_sum / static_cast<double>(rmse_worst_frames) : 0.0;
    summary["n_frames"] = per_frame.size();

    std::ofstream out(report, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + report);
    out << summary.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + report);
    std::cout << summary.dump() << "\n";
    return 0;
}

int run_synth(const fireseg::SynthScenario& scenario, const std::string& out_dir) {
    const fs::path frames_dir = fs::path(out_dir) / "frames";
    const fs::path masks_dir = fs::path(out_dir) / "masks";
    fs::create_directories(frames_dir);
    fs::create_directories(masks_dir);

    bool warned = false;
    for (int t = 0; t < scenario.frames; ++t) {
        const auto sf = fireseg::synth_frame(scenario, t);
        if (sf.clamped && !warned) {
            std::cerr << "warning: fire rectangle clamped to frame bounds from frame " << t << "\n";
            warned = true;
        }
        char name[32];
        std::snprintf(name, sizeof name, "frame_%06d", t);
        fireseg::write_image(sf.frame, frames_dir / (std::string(name) + ".ppm"));
        fireseg::write_mask(sf.gt, masks_dir / (std::string(name) + ".pgm"));
    }
    std::cout << "wrote " << scenario.frames << " " << to_string(scenario.kind)
              << " frame(s) under " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised fire-region segmentation and threat scoring for frame sequences"};
    app.require_subcommand(1);

    SegmentOptions seg_opt;
    auto* segment = app.add_subcommand("segment", "Write per-frame fire masks");
    segment->add_option("--input", seg_opt.input, "Directory of frame images")
        ->required()
        ->check(CLI::ExistingDirectory);
    segment->add_option("--out", seg_opt.out, "Output directory for masks")->required();
    add_pipeline_flags(segment, seg_opt);

    ThreatOptions threat_opt;
    auto* threat = app.add_subcommand("threat", "Score fire threat and write a JSON-lines report");
    threat->add_option("--input", threat_opt.seg.input, "Directory of frame images")
        ->required()
        ->check(CLI::ExistingDirectory);
    threat->add_option("--fps", threat_opt.fps, "Capture frame rate of the sequence")
        ->required()
        ->check(CLI::PositiveNumber);
    threat->add_option("--p", threat_opt.p, "Recency window in frames (default: round(fps))")
        ->check(CLI::PositiveNumber);
    threat->add_option("--alarm-tau", threat_opt.alarm_tau, "Alarm threat threshold")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    threat->add_option("--alarm-k", threat_opt.alarm_k,
                       "Consecutive frames above tau to alarm (default: round(fps/2))")
        ->check(CLI::PositiveNumber);
    threat->add_option("--report", threat_opt.report, "JSON-lines report file")->required();
    threat->add_option("--plot", threat_opt.plot, "Optional CSV of (frame_index, threat)");
    threat->add_option("--out", threat_opt.seg.out, "Optional output directory for masks");
    add_pipeline_flags(threat, threat_opt.seg);

    std::string pred_dir, gt_dir, eval_report;
    auto* eval = app.add_subcommand("eval", "Compare predicted masks against ground truth");
    eval->add_option("--pred", pred_dir, "Directory of predicted masks")
        ->required()
        ->check(CLI::ExistingDirectory);
    eval->add_option("--gt", gt_dir, "Directory of ground-truth masks")
        ->required()
        ->check(CLI::ExistingDirectory);
    eval->add_option("--report", eval_report, "JSON summary file")->required();

    fireseg::SynthScenario scenario;
    std::string scenario_name;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic ground-truthed sequence");
    synth->add_option("--scenario", scenario_name, "flicker|grow|shrink|flashover")->required();
    synth->add_option("--frames", scenario.frames, "Number of frames")
        ->required()
        ->check(CLI::PositiveNumber);
    synth->add_option("--out", synth_out, "Output directory (frames/ and masks/ inside)")
        ->required();
    synth->add_option("--width", scenario.width, "Frame width")->capture_default_str();
    synth->add_option("--height", scenario.height, "Frame height")->capture_default_str();
    synth->add_option("--base-area", scenario.base_area, "Initial fire area in pixels")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth->add_option("--rate", scenario.rate, "Growth factor per frame for grow/shrink")
        ->check(CLI::Range(1.0001, 10.0))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (segment->parsed()) return run_segment(seg_opt);
        if (threat->parsed()) return run_threat(threat_opt);
        if (eval->parsed()) return run_eval(pred_dir, gt_dir, eval_report);
        if (synth->parsed()) {
            scenario.kind = fireseg::parse_scenario(scenario_name);
            return run_synth(scenario, synth_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
