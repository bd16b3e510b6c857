// Copyright 2026 The cpbsp authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front door: synthesize test sequences, train the background
// model, run detection, build backgrounds, and evaluate them.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpbsp/cpbsp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

std::string frame_name(const char* prefix, int index, const std::string& ext) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%06d.%s", prefix, index, ext.c_str());
    return buf;
}

// Shared parameter flags; config-file values first, flags override.
struct ParamFlags {
    std::string config_path;
    std::optional<int> train_frames;
    std::optional<int> k;
    std::optional<double> eta;
    std::optional<double> lambda;
    std::optional<std::string> blocks;
    std::optional<double> sigma_floor;
    std::optional<int> pool_radius;
    std::optional<int> superpixel_size;
    std::optional<double> compactness;
    std::optional<double> overlap_frac;
    std::optional<std::string> aggregate;

    void attach(CLI::App& cmd) {
        cmd.add_option("--config", config_path, "Config file (key = value lines)");
        cmd.add_option("--train-frames", train_frames, "Training window length T");
        cmd.add_option("--k", k, "Supporting blocks per pixel");
        cmd.add_option("--eta", eta, "Gaussian gate multiplier");
        cmd.add_option("--lambda", lambda, "Background vote threshold in [0,1]");
        cmd.add_option("--blocks", blocks, "Block size as WxH (default 8x8)");
        cmd.add_option("--sigma-floor", sigma_floor, "Minimum gate width in gray levels");
        cmd.add_option("--pool-radius", pool_radius,
                       "Candidate window in blocks (0 = whole frame)");
        cmd.add_option("--superpixel-size", superpixel_size, "Target superpixel side in pixels");
        cmd.add_option("--compactness", compactness, "SLIC spatial weight");
        cmd.add_option("--overlap-frac", overlap_frac,
                       "Foreground fraction that selects a region into the mask");
        cmd.add_option("--aggregate", aggregate, "Final combination: last|mean|median");
    }

    cpbsp::PipelineConfig build() const {
        cpbsp::PipelineConfig cfg;
        if (!config_path.empty()) cpbsp::apply_config(cfg, cpbsp::load_config_file(config_path));
        if (train_frames) cfg.cpb.train_frames = *train_frames;
        if (k) cfg.cpb.support_count = *k;
        if (eta) cfg.cpb.eta = *eta;
        if (lambda) cfg.cpb.lambda = *lambda;
        if (blocks) {
            int w = 0, h = 0;
            if (std::sscanf(blocks->c_str(), "%dx%d", &w, &h) != 2) {
                throw cpbsp::ConfigError("--blocks expects WxH, got '" + *blocks + "'");
            }
            cfg.cpb.block_w = w;
            cfg.cpb.block_h = h;
        }
        if (sigma_floor) cfg.cpb.sigma_floor = *sigma_floor;
        if (pool_radius) cfg.cpb.pool_radius = *pool_radius;
        if (superpixel_size) cfg.slic.region_size = *superpixel_size;
        if (compactness) cfg.slic.compactness = *compactness;
        if (overlap_frac) cfg.overlap_frac = *overlap_frac;
        if (aggregate) cfg.aggregate = cpbsp::aggregate_from_string(*aggregate);
        cfg.validate();
        return cfg;
    }
};

json config_json(const cpbsp::PipelineConfig& cfg) {
    json j = json::object();
    for (const auto& [key, value] : cpbsp::effective_config(cfg)) j[key] = value;
    return j;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void write_manifest(const fs::path& path, json manifest) {
    std::ofstream out(path);
    if (!out) throw cpbsp::WriteError("cannot write manifest " + path.string());
    out << manifest.dump(2) << "\n";
}

json metric_json(const cpbsp::metrics::MetricReport& r) {
    return json{{"age", r.age},           {"peps", r.peps},
                {"pceps", r.pceps},       {"psnr", r.psnr},
                {"ms_ssim", r.ms_ssim},   {"cqm", r.cqm},
                {"cqm_luma_only", r.cqm_luma_only}};
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string out_dir;
    cpbsp::SynthSpec spec;
    std::string background = "gradient";
    std::vector<int> object;         // x,y,w,h
    int object_offset = 120;
    std::vector<double> object_vel;  // vx,vy
    std::vector<int> object_active;  // from,to
    std::string format = "pgm";
};

int run_synth(const SynthArgs& a) {
    Stopwatch timer;
    cpbsp::SynthSpec spec = a.spec;
    spec.background = cpbsp::synth_background_from_string(a.background);
    if (!a.object.empty()) {
        cpbsp::SynthObject obj;
        obj.x = a.object[0];
        obj.y = a.object[1];
        obj.width = a.object[2];
        obj.height = a.object[3];
        obj.intensity_offset = a.object_offset;
        if (!a.object_vel.empty()) {
            obj.vel_x = a.object_vel[0];
            obj.vel_y = a.object_vel[1];
        }
        if (!a.object_active.empty()) {
            obj.active_from = a.object_active[0];
            obj.active_to = a.object_active[1];
        }
        spec.object = obj;
    }
    if (a.format != "pgm" && a.format != "png") {
        throw cpbsp::SpecError("--format must be pgm or png");
    }

    const auto result = cpbsp::synthesize(spec);
    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    std::vector<std::string> outputs;
    for (const auto& frame : result.frames.frames) {
        const auto name = frame_name("in", frame.index, a.format);
        cpbsp::save_image(frame, dir / name, cpbsp::ImageMode::Gray);
        outputs.push_back(name);
    }
    cpbsp::save_image(result.ground_truth, dir / ("gt." + a.format), cpbsp::ImageMode::Gray);
    outputs.push_back("gt." + a.format);

    json manifest{{"command", "synth"},
                  {"spec",
                   {{"width", spec.width},
                    {"height", spec.height},
                    {"frames", spec.frame_count},
                    {"background", cpbsp::to_string(spec.background)},
                    {"gain_slope", spec.gain_slope},
                    {"jitter_amplitude", spec.jitter_amplitude},
                    {"seed", spec.seed},
                    {"has_object", spec.object.has_value()}}},
                  {"outputs", outputs},
                  {"wall_time_s", timer.seconds()}};
    write_manifest(dir / "manifest.json", std::move(manifest));
    std::cout << "wrote " << result.frames.size() << " frames + ground truth to " << a.out_dir
              << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// train / detect / initialize / evaluate
// ---------------------------------------------------------------------------

struct IoArgs {
    std::string input_dir;
    std::string pattern = "in*";
    std::string out;
    std::string model_path;
    std::string gt_path;
    std::string bi_path;
    std::string csv_path;
    std::string sequence_name = "sequence";
    std::string method_name = "cpbsp";
    bool emit_intermediates = false;
};

int run_train(const IoArgs& io, const ParamFlags& flags) {
    Stopwatch timer;
    const auto cfg = flags.build();
    const auto seq = cpbsp::load_sequence(io.input_dir, io.pattern);
    const auto model = cpbsp::train(seq, cfg.cpb);
    cpbsp::save_model(model, io.out);

    json manifest{{"command", "train"},
                  {"inputs", {{"dir", io.input_dir}, {"pattern", io.pattern},
                              {"frames", seq.size()}}},
                  {"params", config_json(cfg)},
                  {"outputs", {io.out}},
                  {"wall_time_s", timer.seconds()}};
    write_manifest(fs::path(io.out).string() + ".manifest.json", std::move(manifest));
    std::cout << "trained on " << model.params.train_frames << " frames, model written to "
              << io.out << "\n";
    return kExitOk;
}

int run_detect(const IoArgs& io, const ParamFlags& flags) {
    Stopwatch timer;
    const auto cfg = flags.build();
    const auto model = cpbsp::load_model(io.model_path);
    const auto seq = cpbsp::load_sequence(io.input_dir, io.pattern);
    fs::create_directories(io.out);
    const fs::path dir(io.out);

    std::vector<std::string> outputs;
    for (const auto& frame : seq.frames) {
        const auto fg = cpbsp::detect_frame(model, frame);
        const auto labeling = cpbsp::segment(frame, cfg.slic);
        const auto mask = cpbsp::build_motion_mask(fg, labeling, cfg.overlap_frac, frame.index);
        const auto fg_name = frame_name("fg", frame.index, "png");
        const auto mask_name = frame_name("mask", frame.index, "png");
        cpbsp::save_image(fg.to_frame(), dir / fg_name, cpbsp::ImageMode::Gray);
        cpbsp::save_image(mask.mask.to_frame(), dir / mask_name, cpbsp::ImageMode::Gray);
        outputs.push_back(fg_name);
        outputs.push_back(mask_name);
        if (io.emit_intermediates) {
            const auto label_name = frame_name("labels", frame.index, "png");
            cpbsp::save_image(cpbsp::label_visualization(labeling), dir / label_name,
                              cpbsp::ImageMode::Color);
            outputs.push_back(label_name);
        }
    }

    json manifest{{"command", "detect"},
                  {"inputs", {{"dir", io.input_dir}, {"pattern", io.pattern},
                              {"model", io.model_path}, {"frames", seq.size()}}},
                  {"params", config_json(cfg)},
                  {"outputs", outputs},
                  {"wall_time_s", timer.seconds()}};
    write_manifest(dir / "manifest.json", std::move(manifest));
    std::cout << "wrote foreground maps and motion masks for " << seq.size() << " frames to "
              << io.out << "\n";
    return kExitOk;
}

int run_initialize(const IoArgs& io, const ParamFlags& flags) {
    Stopwatch timer;
    const auto cfg = flags.build();
    const auto seq = cpbsp::load_sequence(io.input_dir, io.pattern);
    const auto result = cpbsp::run_pipeline(seq, cfg);

    const fs::path out_path(io.out);
    const bool color = result.background.has_color();
    cpbsp::save_image(result.background, out_path,
                      color ? cpbsp::ImageMode::Color : cpbsp::ImageMode::Gray);
    std::vector<std::string> outputs{out_path.string()};

    if (io.emit_intermediates) {
        fs::path inter_dir = out_path;
        inter_dir.replace_extension();
        inter_dir += "_intermediates";
        fs::create_directories(inter_dir);
        for (std::size_t i = 0; i < result.per_frame.size(); ++i) {
            const auto& p = result.per_frame[i];
            const int t = result.detect_indices[i];
            cpbsp::save_image(p.foreground.to_frame(), inter_dir / frame_name("fg", t, "png"),
                              cpbsp::ImageMode::Gray);
            cpbsp::save_image(p.mask.mask.to_frame(), inter_dir / frame_name("mask", t, "png"),
                              cpbsp::ImageMode::Gray);
            cpbsp::save_image(p.background, inter_dir / frame_name("bg", t, "png"),
                              color ? cpbsp::ImageMode::Color : cpbsp::ImageMode::Gray);
        }
        outputs.push_back(inter_dir.string());
    }

    json manifest{{"command", "initialize"},
                  {"inputs", {{"dir", io.input_dir}, {"pattern", io.pattern},
                              {"frames", seq.size()}}},
                  {"params", config_json(cfg)},
                  {"detect_frames", result.detect_indices.size()},
                  {"outputs", outputs},
                  {"wall_time_s", timer.seconds()}};
    write_manifest(out_path.string() + ".manifest.json", std::move(manifest));
    std::cout << "background written to " << io.out << " (" << result.detect_indices.size()
              << " detection frames)\n";
    return kExitOk;
}

int run_evaluate(const IoArgs& io) {
    Stopwatch timer;
    const auto gt = cpbsp::load_image(io.gt_path);
    const auto bi = cpbsp::load_image(io.bi_path);
    const auto report = cpbsp::metrics::evaluate(gt, bi);

    std::printf("AGE      %.6f\n", report.age);
    std::printf("pEPs     %.6f\n", report.peps);
    std::printf("pCEPs    %.6f\n", report.pceps);
    std::printf("PSNR     %.6f\n", report.psnr);
    std::printf("MS-SSIM  %.6f\n", report.ms_ssim);
    std::printf("CQM      %.6f%s\n", report.cqm, report.cqm_luma_only ? " (luma only)" : "");

    if (!io.csv_path.empty()) {
        const bool fresh = !fs::exists(io.csv_path);
        std::ofstream csv(io.csv_path, std::ios::app);
        if (!csv) throw cpbsp::WriteError("cannot write " + io.csv_path);
        if (fresh) csv << cpbsp::metrics::csv_header() << "\n";
        csv << cpbsp::metrics::csv_row(io.sequence_name, io.method_name, report) << "\n";
    }
    if (!io.out.empty()) {
        json doc{{"sequence", io.sequence_name},
                 {"method", io.method_name},
                 {"gt", io.gt_path},
                 {"bi", io.bi_path},
                 {"metrics", metric_json(report)},
                 {"wall_time_s", timer.seconds()}};
        std::ofstream out(io.out);
        if (!out) throw cpbsp::WriteError("cannot write " + io.out);
        out << doc.dump(2) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scene background initialization with co-occurrence pixel-block pairs and superpixels"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    IoArgs io;
    ParamFlags flags;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic sequence with ground truth");
    synth->add_option("--out", synth_args.out_dir, "Output directory")->required();
    synth->add_option("--width", synth_args.spec.width, "Frame width");
    synth->add_option("--height", synth_args.spec.height, "Frame height");
    synth->add_option("--frames", synth_args.spec.frame_count, "Frame count");
    synth->add_option("--background", synth_args.background, "gradient|noise|checker");
    synth->add_option("--seed", synth_args.spec.seed, "RNG seed");
    synth->add_option("--checker-cell", synth_args.spec.checker_cell, "Checker cell size");
    synth->add_option("--noise-base", synth_args.spec.noise_base, "Noise background base level");
    synth->add_option("--noise-amplitude", synth_args.spec.noise_amplitude,
                      "Noise background amplitude");
    synth->add_option("--object", synth_args.object, "Object rect x,y,w,h")
        ->delimiter(',')
        ->expected(4);
    synth->add_option("--object-offset", synth_args.object_offset, "Object intensity offset");
    synth->add_option("--object-vel", synth_args.object_vel, "Object velocity vx,vy (px/frame)")
        ->delimiter(',')
        ->expected(2);
    synth->add_option("--object-active", synth_args.object_active,
                      "Object active frame range from,to (inclusive)")
        ->delimiter(',')
        ->expected(2);
    synth->add_option("--gain-a", synth_args.spec.gain_slope, "Illumination ramp g(t) = 1 + a*t");
    synth->add_option("--jitter", synth_args.spec.jitter_amplitude,
                      "Per-frame translation amplitude in pixels");
    synth->add_option("--format", synth_args.format, "Frame file format: pgm|png");

    auto* train_cmd = app.add_subcommand("train", "Train a CPB model from an image sequence");
    train_cmd->add_option("--input", io.input_dir, "Input frame directory")->required();
    train_cmd->add_option("--pattern", io.pattern, "Filename glob (default in*)");
    train_cmd->add_option("--out", io.out, "Output model file")->required();
    flags.attach(*train_cmd);

    auto* detect_cmd =
        app.add_subcommand("detect", "Write foreground maps and motion masks for every frame");
    detect_cmd->add_option("--model", io.model_path, "Trained model file")->required();
    detect_cmd->add_option("--input", io.input_dir, "Input frame directory")->required();
    detect_cmd->add_option("--pattern", io.pattern, "Filename glob (default in*)");
    detect_cmd->add_option("--out", io.out, "Output directory")->required();
    detect_cmd->add_flag("--emit-intermediates", io.emit_intermediates,
                         "Also write superpixel label maps");
    flags.attach(*detect_cmd);

    auto* init_cmd = app.add_subcommand("initialize", "Run the full background initialization pipeline");
    init_cmd->add_option("--input", io.input_dir, "Input frame directory")->required();
    init_cmd->add_option("--pattern", io.pattern, "Filename glob (default in*)");
    init_cmd->add_option("--out", io.out, "Output background image")->required();
    init_cmd->add_flag("--emit-intermediates", io.emit_intermediates,
                       "Write per-frame products next to the output");
    flags.attach(*init_cmd);

    auto* eval_cmd = app.add_subcommand("evaluate", "Compute the six quality metrics");
    eval_cmd->add_option("--gt", io.gt_path, "Ground-truth image")->required();
    eval_cmd->add_option("--bi", io.bi_path, "Background estimate image")->required();
    eval_cmd->add_option("--out", io.out, "Optional JSON report path");
    eval_cmd->add_option("--csv", io.csv_path, "Optional CSV report path (appends)");
    eval_cmd->add_option("--sequence", io.sequence_name, "Sequence name for reports");
    eval_cmd->add_option("--method", io.method_name, "Method name for reports");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (synth->parsed()) return run_synth(synth_args);
        if (train_cmd->parsed()) return run_train(io, flags);
        if (detect_cmd->parsed()) return run_detect(io, flags);
        if (init_cmd->parsed()) return run_initialize(io, flags);
        if (eval_cmd->parsed()) return run_evaluate(io);
    } catch (const cpbsp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
