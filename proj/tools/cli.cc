// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "evpupil/config.h"
#include "evpupil/dataset.h"
#include "evpupil/detect.h"
#include "evpupil/error.h"
#include "evpupil/event_io.h"
#include "evpupil/framegen.h"
#include "evpupil/metrics.h"
#include "evpupil/parallel.h"
#include "evpupil/png_io.h"
#include "evpupil/synth.h"
#include "evpupil/track.h"

namespace evpupil::cli {

namespace fs = std::filesystem;

namespace {

// A flag bound to a local, applied on top of the config only when given. The
// same flag may be registered on several subcommands.
template <typename T>
struct Override {
  T value{};
  std::vector<CLI::Option*> options;

  bool given() const {
    return std::any_of(options.begin(), options.end(),
                       [](const CLI::Option* o) { return o->count() > 0; });
  }
  template <typename U>
  void ApplyTo(U& target) const {
    if (given()) target = value;
  }
};

template <typename T>
Override<T>* Bind(CLI::App* app, const std::string& name, Override<T>& o,
                  const std::string& help) {
  o.options.push_back(app->add_option(name, o.value, help));
  return &o;
}

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<fs::path> ListFiles(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kNotFound, "not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

struct GlobalFlags {
  std::string config_path;
  Override<std::uint64_t> seed;
  Override<unsigned> threads;
  Override<std::string> geometry;
};

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::string truth;
  std::string format;
  std::string path = "stationary";
  double x0 = 173.0;
  double y0 = 130.0;
  double x1 = 203.0;
  double y1 = 130.0;
  double amplitude = 30.0;
  double period_ms = 250.0;
  double onset_ms = 100.0;
  double step_ms = 40.0;
  DiscSynthConfig disc;
};

void RunSynth(const SynthArgs& args, const PipelineConfig& config,
              std::ostream& out) {
  PathFn path;
  const Point2 a{args.x0, args.y0};
  const Point2 b{args.x1, args.y1};
  if (args.path == "stationary") {
    path = StationaryPath(a);
  } else if (args.path == "linear") {
    path = LinearPath(a, b, args.disc.duration_ms);
  } else if (args.path == "sine") {
    path = SinusoidPath(a, args.amplitude, args.period_ms);
  } else if (args.path == "step") {
    path = StepPath(a, b, args.onset_ms, args.step_ms);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown path '" + args.path + "'");
  }
  DiscSynthConfig disc = args.disc;
  disc.seed = config.seed;
  const SynthResult result = SynthMovingDisc(config.geometry, path, disc);
  const EventFormat format =
      args.format.empty() ? FormatFromPath(args.out) : ParseEventFormat(args.format);
  const fs::path out_path(args.out);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  WriteEventsFile(out_path, format, result.stream);
  if (!args.truth.empty()) {
    std::ostringstream gt;
    WriteGroundTruthCsv(gt, result.truth);
    WriteFile(args.truth, gt.str());
  }
  out << "synth: wrote " << result.stream.size() << " events to " << args.out
      << '\n';
}

// --- convert ---------------------------------------------------------------

struct ConvertArgs {
  std::string events;
  std::string out_dir;
  std::string format;
  bool swap_xy = false;
  bool no_sidecar = false;
};

void RunConvert(const ConvertArgs& args, const PipelineConfig& config,
                std::ostream& out, std::ostream& err) {
  const EventFormat format = args.format.empty() ? FormatFromPath(args.events)
                                                 : ParseEventFormat(args.format);
  const EventStream stream =
      ParseEventsFile(args.events, format, config.geometry, {args.swap_xy});
  const std::vector<Frame> frames =
      GenerateFrames(stream, config.framegen, config.threads);
  fs::create_directories(args.out_dir);
  ParallelFor(frames.size(), config.threads, [&](std::size_t i) {
    WriteFramePng(fs::path(args.out_dir) / FrameFileName(frames[i].window.index),
                  frames[i]);
  });
  if (!args.no_sidecar) {
    std::ostringstream sidecar;
    WriteFrameSidecar(sidecar, frames);
    WriteFile(fs::path(args.out_dir) / "frames.csv", sidecar.str());
  }
  if (frames.empty()) {
    err << "warning: no window exceeded the event threshold of "
        << config.framegen.event_threshold << "; zero frames written\n";
  }
  out << "convert: " << stream.size() << " events -> " << frames.size()
      << " frames in " << args.out_dir << '\n';
}

// --- dataset ---------------------------------------------------------------

struct DatasetArgs {
  std::string recordings;
  std::string out_dir;
  Override<std::size_t> frames_per_eye;
  Override<std::vector<double>> ratios;
};

std::vector<Recording> LoadRecordings(const fs::path& list_path,
                                      const SensorGeometry& geometry) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ReadFile(list_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, list_path.string() + ": " + e.what());
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::kSchema, list_path.string() + ": expected an array");
  }
  const fs::path base = list_path.parent_path();
  std::vector<Recording> recordings;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("subject") || !item.contains("eye") ||
        !item.contains("events")) {
      throw Error(ErrorCode::kSchema,
                  list_path.string() + ": each recording needs subject, eye, events");
    }
    Recording rec;
    rec.subject_id = item["subject"].get<std::string>();
    rec.eye = ParseEye(item["eye"].get<std::string>());
    const fs::path events = base / item["events"].get<std::string>();
    rec.source = fs::path(item["events"].get<std::string>()).filename().string();
    const EventFormat format = item.contains("format")
                                   ? ParseEventFormat(item["format"].get<std::string>())
                                   : FormatFromPath(events);
    ParseOptions options;
    if (item.contains("swap_xy")) options.swap_xy = item["swap_xy"].get<bool>();
    rec.stream = ParseEventsFile(events, format, geometry, options);
    if (item.contains("truth") && !item["truth"].is_null()) {
      rec.truth = ReadGroundTruthFile(base / item["truth"].get<std::string>());
    }
    recordings.push_back(std::move(rec));
  }
  return recordings;
}

void RunDataset(const DatasetArgs& args, PipelineConfig config,
                std::ostream& out, std::ostream& err) {
  args.frames_per_eye.ApplyTo(config.dataset.frames_per_eye);
  if (args.ratios.given()) {
    if (args.ratios.value.size() != 3) {
      throw Error(ErrorCode::kInvalidArgument, "--ratios takes train,val,test");
    }
    config.dataset.ratios = {args.ratios.value[0], args.ratios.value[1],
                             args.ratios.value[2]};
  }
  config.Validate();
  const std::vector<Recording> recordings =
      LoadRecordings(args.recordings, config.geometry);
  const SampleResult sample = SampleFrames(recordings, config.dataset.frames_per_eye,
                                           config.framegen, config.seed, config.threads);
  for (const auto& w : sample.warnings) err << "warning: " << w << '\n';
  std::vector<std::string> subjects;
  for (const auto& r : recordings) subjects.push_back(r.subject_id);
  const SubjectSplit split = SplitBySubject(subjects, config.dataset.ratios, config.seed);
  const SplitManifest manifest =
      EmitDataset(args.out_dir, recordings, sample.frames, split, config.threads);
  out << "dataset: train=" << manifest.train.size()
      << " val=" << manifest.val.size() << " test=" << manifest.test.size()
      << " images in " << args.out_dir << '\n';
}

// --- detect ----------------------------------------------------------------

struct DetectArgs {
  std::string frames_dir;
  std::string baseline;
  std::string from_json;
  std::string out;
  Override<std::uint64_t> min_events;
  Override<double> box_sigma;
};

void RunDetect(const DetectArgs& args, PipelineConfig config, std::ostream& out) {
  args.min_events.ApplyTo(config.centroid.min_events);
  args.box_sigma.ApplyTo(config.centroid.box_sigma);
  config.Validate();
  std::vector<Detection> detections;
  if (!args.from_json.empty()) {
    detections = LoadDetectionsFile(args.from_json, config.geometry);
  } else {
    if (args.baseline != "centroid") {
      throw Error(ErrorCode::kInvalidArgument,
                  "detect needs --baseline centroid or --from-json FILE");
    }
    if (args.frames_dir.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--baseline needs --frames DIR");
    }
    const std::vector<fs::path> files = ListFiles(args.frames_dir, ".png");
    std::vector<std::optional<Detection>> slots(files.size());
    ParallelFor(files.size(), config.threads, [&](std::size_t i) {
      const GrayImage image = ReadGrayPng(files[i]);
      slots[i] = CentroidDetect(image.pixels, image.geometry, config.centroid,
                                files[i].filename().string());
    });
    for (auto& d : slots) {
      if (d) detections.push_back(std::move(*d));
    }
  }
  if (!args.out.empty()) {
    std::ostringstream json;
    WriteDetections(json, detections);
    WriteFile(args.out, json.str());
  }
  out << "detect: " << detections.size() << " detections"
      << (args.out.empty() ? "" : " -> " + args.out) << '\n';
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string detections;
  std::string labels_dir;
  std::string report;
  std::string pr;
  Override<double> iou;
  Override<double> conf;
};

std::string Stem(const std::string& ref) { return fs::path(ref).stem().string(); }

void RunEval(const EvalArgs& args, PipelineConfig config, std::ostream& out) {
  args.iou.ApplyTo(config.match.iou_threshold);
  args.conf.ApplyTo(config.match.confidence_threshold);
  config.Validate();

  std::vector<GroundTruth> truths;
  std::set<std::string> known;
  for (const fs::path& label : ListFiles(args.labels_dir, ".txt")) {
    const std::string stem = label.stem().string();
    known.insert(stem);
    for (const Annotation& a : ReadYoloLabelFile(label)) {
      truths.push_back({stem, a.class_id, PixelBoxFromAnnotation(a, config.geometry)});
    }
  }
  std::vector<Detection> detections =
      LoadDetectionsFile(args.detections, config.geometry);
  for (Detection& d : detections) {
    d.frame_ref = Stem(d.frame_ref);
    if (!known.contains(d.frame_ref)) {
      throw Error(ErrorCode::kMismatch,
                  "detection references frame '" + d.frame_ref +
                      "' with no label file in " + args.labels_dir);
    }
  }
  const EvalReport report = Evaluate(detections, truths, config.match);
  std::ostringstream report_json;
  WriteReportJson(report_json, report);
  if (!args.report.empty()) {
    WriteFile(args.report, report_json.str());
  } else {
    out << report_json.str();
  }
  if (!args.pr.empty()) {
    std::ostringstream pr;
    WritePrCurveCsv(pr, report.pr_curve);
    WriteFile(args.pr, pr.str());
  }
  out << "eval: precision=" << report.precision << " recall=" << report.recall
      << " f1=" << report.f1 << " mAP=" << report.map << '\n';
}

// --- track -----------------------------------------------------------------

struct TrackArgs {
  std::string detections;
  std::string sidecar;
  std::string out;
  std::string saccades;
  Override<std::size_t> max_gap;
  Override<double> px_per_degree;
  Override<double> saccade_threshold;
  Override<double> min_saccade_ms;
};

void RunTrack(const TrackArgs& args, PipelineConfig config, std::ostream& out,
              std::ostream& err) {
  args.max_gap.ApplyTo(config.track.max_gap_frames);
  if (args.px_per_degree.given()) config.track.px_per_degree = args.px_per_degree.value;
  args.saccade_threshold.ApplyTo(config.track.saccade_threshold_deg_s);
  args.min_saccade_ms.ApplyTo(config.track.min_saccade_ms);
  config.Validate();

  std::ifstream sidecar_in(args.sidecar);
  if (!sidecar_in) throw Error(ErrorCode::kIo, "cannot open " + args.sidecar);
  std::vector<WindowPlan> windows;
  for (const SidecarRow& row : ReadFrameSidecar(sidecar_in)) {
    windows.push_back({row.t_start_us, row.t_end_us, row.index});
  }
  const std::vector<Detection> detections =
      LoadDetectionsFile(args.detections, config.geometry);
  BuildResult built = BuildTrajectory(detections, windows);
  for (const auto& w : built.warnings) err << "warning: " << w << '\n';
  const Trajectory trajectory =
      InterpolateGaps(built.trajectory, config.track.max_gap_frames);
  std::vector<VelocitySample> velocities;
  if (trajectory.points.size() >= 2) {
    velocities = ComputeVelocity(trajectory, config.track.px_per_degree);
  } else {
    err << "warning: fewer than 2 trajectory points; no velocities\n";
  }
  std::ostringstream csv;
  WriteTrajectoryCsv(csv, trajectory, velocities);
  WriteFile(args.out, csv.str());

  std::size_t flagged = 0;
  if (!args.saccades.empty()) {
    if (!config.track.px_per_degree) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--saccades needs a px-per-degree calibration");
    }
    const auto intervals =
        FlagSaccadeCandidates(velocities, config.track.saccade_threshold_deg_s,
                              config.track.min_saccade_ms);
    flagged = intervals.size();
    std::ostringstream sacc;
    WriteSaccadeCsv(sacc, intervals);
    WriteFile(args.saccades, sacc.str());
  }
  out << "track: " << trajectory.points.size() << " points, "
      << trajectory.Gaps().size() << " open gaps";
  if (!args.saccades.empty()) out << ", " << flagged << " saccade candidates";
  out << '\n';
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"evpupil: event-camera frames, pupil datasets, detection metrics, tracking"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags global;
  app.add_option("--config", global.config_path, "Pipeline config JSON")
      ->check(CLI::ExistingFile);
  Bind(&app, "--seed", global.seed, "Seed for every random choice");
  Bind(&app, "--threads", global.threads, "Worker threads (0 = all cores)");
  Bind(&app, "--geometry", global.geometry, "Sensor size WxH (default 346x260)");

  // Frame generation flags are shared by convert and dataset.
  Override<double> duration_ms;
  Override<std::uint64_t> threshold;
  Override<int> background;
  const auto add_framegen_flags = [&](CLI::App* sub) {
    Bind(sub, "--duration-ms", duration_ms, "Window length in milliseconds");
    Bind(sub, "--threshold", threshold, "Emit a frame only above this many events");
    Bind(sub, "--background", background, "Background intensity (1..254)");
  };

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic moving-disc stream");
  synth_cmd->add_option("--out", synth.out, "Events file")->required();
  synth_cmd->add_option("--truth", synth.truth, "Ground-truth CSV (t_ms,cx,cy,radius)");
  synth_cmd->add_option("--format", synth.format, "csv or bin (default: by extension)");
  synth_cmd->add_option("--path", synth.path, "stationary|linear|sine|step");
  synth_cmd->add_option("--x0", synth.x0);
  synth_cmd->add_option("--y0", synth.y0);
  synth_cmd->add_option("--x1", synth.x1);
  synth_cmd->add_option("--y1", synth.y1);
  synth_cmd->add_option("--amplitude", synth.amplitude, "Sine amplitude (px)");
  synth_cmd->add_option("--period-ms", synth.period_ms, "Sine period");
  synth_cmd->add_option("--onset-ms", synth.onset_ms, "Step onset");
  synth_cmd->add_option("--step-ms", synth.step_ms, "Step duration");
  synth_cmd->add_option("--radius", synth.disc.radius_px, "Disc radius (px)");
  synth_cmd->add_option("--rate", synth.disc.event_rate_per_ms, "Events per ms");
  synth_cmd->add_option("--length-ms", synth.disc.duration_ms, "Stream length (ms)");
  synth_cmd->add_option("--flicker", synth.disc.flicker_speed_px_per_ms,
                        "Flicker speed (px/ms)");

  ConvertArgs convert;
  CLI::App* convert_cmd = app.add_subcommand("convert", "Accumulate events into PNG frames");
  convert_cmd->add_option("events", convert.events, "Events file")->required();
  convert_cmd->add_option("--out", convert.out_dir, "Output directory")->required();
  convert_cmd->add_option("--format", convert.format, "csv or bin (default: by extension)");
  convert_cmd->add_flag("--swap-xy", convert.swap_xy, "Columns are t,y,x,p");
  convert_cmd->add_flag("--no-sidecar", convert.no_sidecar, "Skip frames.csv");
  add_framegen_flags(convert_cmd);

  DatasetArgs dataset;
  CLI::App* dataset_cmd = app.add_subcommand("dataset", "Sample frames into a YOLO dataset");
  dataset_cmd->add_option("--recordings", dataset.recordings,
                          "JSON list of {subject, eye, events[, truth, format]}")
      ->required();
  dataset_cmd->add_option("--out", dataset.out_dir, "Dataset root")->required();
  Bind(dataset_cmd, "--frames-per-eye", dataset.frames_per_eye, "Frames per subject and eye");
  Bind(dataset_cmd, "--ratios", dataset.ratios, "train,val,test")->options.back()->delimiter(',');
  add_framegen_flags(dataset_cmd);

  DetectArgs detect;
  CLI::App* detect_cmd = app.add_subcommand("detect", "Centroid baseline or detections import");
  detect_cmd->add_option("--frames", detect.frames_dir, "Directory of frame PNGs");
  auto* baseline_opt =
      detect_cmd->add_option("--baseline", detect.baseline, "Baseline detector (centroid)");
  auto* from_json_opt =
      detect_cmd->add_option("--from-json", detect.from_json, "Validate a detections JSON");
  baseline_opt->excludes(from_json_opt);
  detect_cmd->add_option("--out", detect.out, "Detections JSON to write");
  Bind(detect_cmd, "--min-events", detect.min_events, "Minimum non-background pixels");
  Bind(detect_cmd, "--box-sigma", detect.box_sigma, "Box half-size in std devs");

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score detections against YOLO labels");
  eval_cmd->add_option("--detections", eval.detections, "Detections JSON")->required();
  eval_cmd->add_option("--labels", eval.labels_dir, "Label directory")->required();
  eval_cmd->add_option("--report", eval.report, "Report JSON path");
  eval_cmd->add_option("--pr", eval.pr, "PR curve CSV path");
  Bind(eval_cmd, "--iou", eval.iou, "IoU threshold");
  Bind(eval_cmd, "--conf", eval.conf, "Confidence threshold");

  TrackArgs track;
  CLI::App* track_cmd = app.add_subcommand("track", "Build a pupil trajectory");
  track_cmd->add_option("--detections", track.detections, "Detections JSON")->required();
  track_cmd->add_option("--sidecar", track.sidecar, "frames.csv from convert")->required();
  track_cmd->add_option("--out", track.out, "Trajectory CSV")->required();
  track_cmd->add_option("--saccades", track.saccades, "Saccade intervals CSV");
  Bind(track_cmd, "--max-gap", track.max_gap, "Longest gap to interpolate (frames)");
  Bind(track_cmd, "--px-per-degree", track.px_per_degree, "Angular calibration");
  Bind(track_cmd, "--saccade-threshold", track.saccade_threshold, "deg/s");
  Bind(track_cmd, "--min-saccade-ms", track.min_saccade_ms, "Minimum interval span");

  CLI::App* config_cmd = app.add_subcommand("config", "Print the effective config JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    PipelineConfig config;
    if (!global.config_path.empty()) config = LoadPipelineConfig(global.config_path);
    global.seed.ApplyTo(config.seed);
    global.threads.ApplyTo(config.threads);
    if (global.geometry.given()) config.geometry = ParseGeometry(global.geometry.value);
    duration_ms.ApplyTo(config.framegen.duration_ms);
    threshold.ApplyTo(config.framegen.event_threshold);
    if (background.given()) {
      if (background.value < 0 || background.value > 255) {
        throw Error(ErrorCode::kInvalidArgument, "--background must be 0..255");
      }
      config.framegen.background_intensity = static_cast<std::uint8_t>(background.value);
      config.centroid.background_intensity = config.framegen.background_intensity;
    }
    config.Validate();

    if (synth_cmd->parsed()) {
      RunSynth(synth, config, out);
    } else if (convert_cmd->parsed()) {
      RunConvert(convert, config, out, err);
    } else if (dataset_cmd->parsed()) {
      RunDataset(dataset, config, out, err);
    } else if (detect_cmd->parsed()) {
      RunDetect(detect, config, out);
    } else if (eval_cmd->parsed()) {
      RunEval(eval, config, out);
    } else if (track_cmd->parsed()) {
      RunTrack(track, config, out, err);
    } else if (config_cmd->parsed()) {
      out << PipelineConfigToJson(config);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("evpupil");
  for (const auto& a : args) argv.push_back(a.c_str());
  return Run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace evpupil::cli
