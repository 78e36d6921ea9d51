#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cacti/analysis.hpp"
#include "cacti/calibration.hpp"
#include "cacti/forward_model.hpp"
#include "cacti/gap_solver.hpp"
#include "cacti/io.hpp"
#include "cacti/scene.hpp"
#include "cacti/transforms.hpp"

namespace cacti::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return kInvalidArgument;
    case ErrorCode::dimension_mismatch: return kDimensionMismatch;
    case ErrorCode::infeasible_shift: return kInfeasibleShift;
    case ErrorCode::cap_exceeded: return kCapExceeded;
    case ErrorCode::format_bad_magic: return kBadMagic;
    case ErrorCode::format_truncated: return kTruncated;
    case ErrorCode::format_dim_overflow: return kDimOverflow;
    case ErrorCode::format_trailing_data: return kTrailingData;
    case ErrorCode::io: return kIo;
    case ErrorCode::config: return kConfig;
  }
  return kInternal;
}

namespace {

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage error (unknown flag, bad flag value, missing subcommand)\n"
    "  3  file could not be read or written\n"
    "  4  configuration error (missing seed or required setting, bad value)\n"
    "  5  dimension mismatch between inputs\n"
    "  6  CCV1 bad magic\n"
    "  7  CCV1 truncated header or payload\n"
    "  8  CCV1 zero or oversized dimensions\n"
    "  9  CCV1 trailing bytes after payload\n"
    " 10  invalid argument value\n"
    " 11  mask motion does not fit in the active area\n"
    " 12  explicit matrix size cap exceeded\n";

// Flags are bound to config keys; values given on the command line override
// those loaded from --config.
class Flags {
 public:
  explicit Flags(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "Flat key = value config file");
  }

  void add(const std::string& name, const std::string& key, const std::string& help) {
    bound_.emplace_back(app_->add_option(name, values_[key], help + " [" + key + "]"), key);
  }

  RunConfig resolve(RunConfig base = {}) const {
    if (!config_path_.empty()) base.merge(RunConfig::load(config_path_));
    for (const auto& [opt, key] : bound_)
      if (opt->count() > 0) base.set(key, values_.at(key));
    return base;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, std::string> values_;
  std::vector<std::pair<CLI::Option*, std::string>> bound_;
};

// Readers that also record the default they fell back to, so the echoed
// config reproduces the run.
double take_double(RunConfig& c, const std::string& key, double fallback) {
  if (!c.has(key)) c.set(key, fallback);
  return c.get_double(key);
}

std::size_t take_size(RunConfig& c, const std::string& key, std::size_t fallback) {
  if (!c.has(key)) c.set(key, std::to_string(fallback));
  return static_cast<std::size_t>(c.get_u64(key));
}

std::string take_string(RunConfig& c, const std::string& key, const std::string& fallback) {
  if (!c.has(key)) c.set(key, fallback);
  return c.get(key);
}

std::uint64_t require_seed(const RunConfig& c, const std::string& key) {
  if (!c.has(key)) fail(ErrorCode::config, "missing seed: pass --seed or set " + key);
  return c.get_u64(key);
}

void resolve_seeds(RunConfig& c) {
  if (!c.has("run.seed")) return;
  const std::uint64_t s = c.get_u64("run.seed");
  if (!c.has("mask.seed")) c.set("mask.seed", std::to_string(s));
  if (!c.has("scene.seed")) c.set("scene.seed", std::to_string(derive_seed(s, 1)));
  if (!c.has("noise.seed")) c.set("noise.seed", std::to_string(derive_seed(s, 2)));
  if (!c.has("calibration.seed")) c.set("calibration.seed", std::to_string(derive_seed(s, 3)));
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof()) fail(ErrorCode::config, "bad " + what + " entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) fail(ErrorCode::config, what + " list is empty");
  return out;
}

std::string require_path(const RunConfig& c, const std::string& key, const std::string& flag) {
  if (!c.has(key) || c.get(key).empty()) fail(ErrorCode::config, "missing " + flag + " [" + key + "]");
  return c.get(key);
}

std::string echo_path(const std::string& out) { return out + ".config.txt"; }

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

void add_scene_flags(Flags& f) {
  f.add("--scene", "scene.kind", "moving_square | rotating_spokes | two_blobs | static_target");
  f.add("--rows", "scene.rows", "Active-area rows");
  f.add("--cols", "scene.cols", "Active-area columns");
  f.add("--frames", "scene.frames", "Frames in the ground-truth video");
  f.add("--size", "scene.size", "Square side, blob sigma or wheel radius (px)");
  f.add("--start-row", "scene.start_row", "Object start row");
  f.add("--start-col", "scene.start_col", "Object start column");
  f.add("--velocity-row", "scene.velocity_row", "Row velocity (px/frame)");
  f.add("--velocity-col", "scene.velocity_col", "Column velocity (px/frame)");
  f.add("--angular-step", "scene.angular_step", "Spoke rotation per frame (rad)");
  f.add("--spokes", "scene.spokes", "Number of spokes");
  f.add("--intensity", "scene.intensity", "Object intensity");
  f.add("--background", "scene.background", "Background intensity");
  f.add("--texture", "scene.texture", "Static background texture amplitude");
  f.add("--scene-seed", "scene.seed", "Scene seed");
}

void add_mask_flags(Flags& f) {
  f.add("--mask", "input.mask", "Mask CCV1 file (otherwise generated)");
  f.add("--fill", "mask.fill", "Mask open fraction");
  f.add("--mask-rows", "mask.rows", "Generated mask rows (default rows - ceil(C))");
  f.add("--mask-cols", "mask.cols", "Generated mask columns (default cols)");
  f.add("--upsample", "mask.upsample", "Mask element size in detector pixels");
  f.add("--mask-seed", "mask.seed", "Mask seed");
}

void add_motion_flags(Flags& f) {
  f.add("--C", "motion.C", "Mask travel per integration (px)");
  f.add("--d", "motion.d", "Mask travel between temporal channels (px)");
}

void add_solver_flags(Flags& f) {
  f.add("--transform", "solver.transform", "Per-axis kinds 'dct,dct,dct', or moving | mostly_static");
  f.add("--partition", "solver.partition", "blocks | singletons");
  f.add("--subband-weights", "solver.subband_weights", "Scale-dependent group weights (true/false)");
  f.add("--max-iterations", "solver.max_iterations", "Iteration cap");
  f.add("--tol", "solver.stop_tolerance", "Relative gap-change stop tolerance");
}

SceneSpec scene_from(RunConfig& c, std::size_t frames) {
  SceneSpec s;
  s.kind = parse_scene_kind(take_string(c, "scene.kind", to_string(s.kind)));
  s.rows = take_size(c, "scene.rows", s.rows);
  s.cols = take_size(c, "scene.cols", s.cols);
  s.frames = frames;
  c.set("scene.frames", std::to_string(frames));
  s.size = take_double(c, "scene.size", s.size);
  s.start_row = take_double(c, "scene.start_row", s.start_row);
  s.start_col = take_double(c, "scene.start_col", s.start_col);
  s.velocity_row = take_double(c, "scene.velocity_row", s.velocity_row);
  s.velocity_col = take_double(c, "scene.velocity_col", s.velocity_col);
  s.angular_step = take_double(c, "scene.angular_step", s.angular_step);
  s.spokes = take_size(c, "scene.spokes", s.spokes);
  s.intensity = take_double(c, "scene.intensity", s.intensity);
  s.background = take_double(c, "scene.background", s.background);
  s.texture = take_double(c, "scene.texture", s.texture);
  s.seed = require_seed(c, "scene.seed");
  return s;
}

Mask mask_from(RunConfig& c, std::size_t rows, std::size_t cols, double compression) {
  if (c.has("input.mask") && !c.get("input.mask").empty()) return read_mask(c.get("input.mask"));
  const auto pad = static_cast<std::size_t>(std::ceil(compression));
  if (pad >= rows) fail(ErrorCode::infeasible_shift, "C leaves no rows for the mask");
  const std::size_t mr = take_size(c, "mask.rows", rows - pad);
  const std::size_t mc = take_size(c, "mask.cols", cols);
  const double fill = take_double(c, "mask.fill", 0.5);
  const std::size_t up = take_size(c, "mask.upsample", 1);
  return generate_mask(mr, mc, fill, require_seed(c, "mask.seed"), up);
}

MotionProfile motion_from(RunConfig& c) {
  if (!c.has("motion.C")) fail(ErrorCode::config, "missing --C [motion.C]");
  return triangle_positions(c.get_double("motion.C"), take_double(c, "motion.d", 1.0));
}

SolverSettings settings_from(RunConfig& c) {
  SolverSettings s;
  const std::string t = take_string(c, "solver.transform", "dct,dct,dct");
  if (t == "moving") {
    s.transform = {AxisKind::dct, AxisKind::dct, AxisKind::dct};
  } else if (t == "mostly_static") {
    s.transform = {AxisKind::haar, AxisKind::haar, AxisKind::dct};
  } else {
    const auto parts = parse_list<std::string>(t, "solver.transform");
    if (parts.size() == 1) {
      const AxisKind k = parse_axis_kind(parts[0]);
      s.transform = {k, k, k};
    } else if (parts.size() == 3) {
      for (std::size_t a = 0; a < 3; ++a) s.transform[a] = parse_axis_kind(parts[a]);
    } else {
      fail(ErrorCode::config, "solver.transform needs one or three axis kinds");
    }
  }
  s.partition = parse_partition_scheme(take_string(c, "solver.partition", "blocks"));
  s.subband_weights = c.get_bool_or("solver.subband_weights", false);
  c.set("solver.subband_weights", s.subband_weights ? "true" : "false");
  s.max_iterations = take_size(c, "solver.max_iterations", s.max_iterations);
  s.stop_tolerance = take_double(c, "solver.stop_tolerance", s.stop_tolerance);
  return s;
}

void dump_frames(const RunConfig& c, const std::string& prefix, const Cube& cube) {
  if (!c.has("output.pgm_dir")) return;
  const double hi = cube.max_value() > 0.0 ? cube.max_value() : 1.0;
  dump_pgm_frames(c.get("output.pgm_dir"), prefix, cube, 0.0, hi);
}

std::string fmt(double v) { return format_double(v); }

// Human-readable summaries; files keep the round-trip form.
std::string brief(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

// simulate -------------------------------------------------------------------

int run_simulate(const Flags& flags, std::ostream& out, std::ostream& err) {
  RunConfig c = flags.resolve();
  resolve_seeds(c);
  const std::string g_path = require_path(c, "output.g", "--out");
  const MotionProfile profile = motion_from(c);
  std::size_t frames = profile.frames();
  if (c.has("scene.frames") && c.get_u64("scene.frames") != frames) {
    std::ostringstream os;
    os << "--frames " << c.get("scene.frames") << " disagrees with N_F = C/d = " << frames;
    fail(ErrorCode::dimension_mismatch, os.str());
  }
  const SceneSpec spec = scene_from(c, frames);
  const GeneratedScene scene = generate_scene(spec);
  for (const auto& w : scene.warnings) err << "cacti: warning: " << w << '\n';

  const Mask mask = mask_from(c, spec.rows, spec.cols, profile.compression);
  const ForwardOperator op = build_operator(mask, profile, spec.rows, spec.cols);

  NoiseModel noise;
  const double sigma = take_double(c, "noise.sigma", 0.0);
  if (sigma < 0.0) fail(ErrorCode::config, "noise.sigma must be >= 0");
  if (sigma > 0.0) noise = NoiseModel::gaussian(sigma, require_seed(c, "noise.seed"));
  c.set("noise.kind", sigma > 0.0 ? "gaussian" : "none");
  const Snapshot g = forward(op, scene.cube, noise);

  write_ccv1(g_path, g);
  if (c.has("output.truth")) write_ccv1(c.get("output.truth"), scene.cube);
  if (!c.has("input.mask") || c.get("input.mask").empty()) {
    const std::string mask_path = c.get_or("output.mask", fs::path(g_path).replace_extension(".mask.ccv1").string());
    write_ccv1(mask_path, mask.to_cube());
    c.set("output.mask", absolute(mask_path));
  } else {
    c.set("output.mask", absolute(c.get("input.mask")));
  }
  if (c.has("output.truth")) c.set("output.truth", absolute(c.get("output.truth")));
  dump_frames(c, "truth", scene.cube);
  dump_frames(c, "snapshot", g);
  c.save(echo_path(g_path));
  out << "simulate: " << spec.rows << "x" << spec.cols << "x" << frames << " -> " << g_path
      << " (N_F=" << frames << ", zero-code pixels=" << op.zero_code_pixels() << ")\n";
  return kOk;
}

// calibrate ------------------------------------------------------------------

CalibrationStack load_stack(const std::string& path) {
  const std::string manifest_path = path + ".manifest.txt";
  if (!fs::exists(manifest_path)) fail(ErrorCode::io, "missing calibration manifest " + manifest_path);
  const RunConfig m = RunConfig::load(manifest_path);
  CalibrationStack stack;
  stack.planes = read_ccv1(path);
  stack.compression = m.get_double("motion.C");
  stack.step = m.get_double("motion.d");
  stack.jitter_rms = m.get_double_or("calibration.jitter", 0.0);
  stack.blur_width = m.get_double_or("calibration.blur", 0.0);
  stack.seed = m.get_u64_or("calibration.seed", 0);
  const MotionProfile p = triangle_positions(stack.compression, stack.step);
  if (p.frames() != stack.planes.frames())
    fail(ErrorCode::dimension_mismatch, "stack plane count disagrees with its manifest C/d");
  stack.nominal_positions = p.positions;
  return stack;
}

int run_calibrate(const Flags& flags, std::ostream& out, std::ostream&) {
  RunConfig c = flags.resolve();
  resolve_seeds(c);
  const std::string path = require_path(c, "output.stack", "--out");
  const MotionProfile profile = motion_from(c);
  const std::size_t rows = take_size(c, "scene.rows", 64);
  const std::size_t cols = take_size(c, "scene.cols", 64);
  const Mask mask = mask_from(c, rows, cols, profile.compression);
  const double jitter = take_double(c, "calibration.jitter", 0.0);
  const double blur = take_double(c, "calibration.blur", 0.0);
  const std::uint64_t seed = require_seed(c, "calibration.seed");
  const CalibrationStack stack = simulate_calibration_stack(mask, profile, rows, cols, jitter, blur, seed);
  write_ccv1(path, stack.planes);

  RunConfig manifest;
  manifest.set("motion.C", stack.compression);
  manifest.set("motion.d", stack.step);
  manifest.set("calibration.jitter", stack.jitter_rms);
  manifest.set("calibration.blur", stack.blur_width);
  manifest.set("calibration.seed", std::to_string(stack.seed));
  manifest.set("calibration.planes", std::to_string(stack.frames()));
  std::string realized;
  for (std::size_t k = 0; k < stack.realized_positions.size(); ++k)
    realized += (k ? "," : "") + fmt(stack.realized_positions[k]);
  manifest.set("calibration.realized_positions", realized);
  manifest.save(path + ".manifest.txt");
  c.save(echo_path(path));
  out << "calibrate: " << stack.frames() << " planes -> " << path << '\n';
  return kOk;
}

// reconstruct ----------------------------------------------------------------

RunConfig inherited_from_snapshot(const std::string& g_path) {
  RunConfig base;
  const std::string p = echo_path(g_path);
  if (!fs::exists(p)) return base;
  const RunConfig g = RunConfig::load(p);
  for (const auto& [k, v] : g.values()) {
    for (const char* prefix : {"scene.", "mask.", "motion.", "noise.", "run."})
      if (k.rfind(prefix, 0) == 0) base.set(k, v);
  }
  if (g.has("output.mask")) base.set("input.mask", g.get("output.mask"));
  return base;
}

// Builds the reconstruction operator from a calibration stack or a mask.
ForwardOperator operator_from(RunConfig& c, const Snapshot& g) {
  if (c.has("input.stack")) {
    const CalibrationStack stack = load_stack(c.get("input.stack"));
    const auto channels = parse_channel_selection(take_string(c, "input.channels", "all"), stack);
    c.set("motion.C", stack.compression);
    c.set("motion.d", stack.step);
    return subset_operator(stack, channels);
  }
  if (!c.has("input.mask")) fail(ErrorCode::config, "reconstruct needs --mask or --stack");
  if (!c.has("motion.C")) fail(ErrorCode::config, "missing --C [motion.C]");
  if (c.has("recon.frames")) {
    const double frames = static_cast<double>(c.get_u64("recon.frames"));
    if (frames == 0) fail(ErrorCode::config, "recon.frames must be >= 1");
    c.set("motion.d", c.get_double("motion.C") / frames);
  }
  const Mask mask = read_mask(c.get("input.mask"));
  return build_operator(mask, motion_from(c), g.rows(), g.cols());
}

int run_reconstruct(const Flags& flags, bool verbose, std::ostream& out, std::ostream& err) {
  RunConfig pre = flags.resolve();
  const std::string g_path = require_path(pre, "input.g", "--in");
  RunConfig c = flags.resolve(inherited_from_snapshot(g_path));
  const std::string f_path = require_path(c, "output.estimate", "--out");
  const Snapshot g = read_ccv1(g_path);
  if (g.frames() != 1) fail(ErrorCode::dimension_mismatch, "snapshot must have a single frame");
  const ForwardOperator op = operator_from(c, g);
  if (op.rows() != g.rows() || op.cols() != g.cols())
    fail(ErrorCode::dimension_mismatch, "operator and snapshot sizes differ");
  if (c.has("recon.frames") && c.get_u64("recon.frames") != op.frames()) {
    std::ostringstream os;
    os << "--frames " << c.get("recon.frames") << " but the operator has " << op.frames() << " channels";
    fail(ErrorCode::dimension_mismatch, os.str());
  }

  SolverConfig cfg = make_solver_config(op, settings_from(c));
  if (verbose) cfg.log = &err;
  const auto t0 = std::chrono::steady_clock::now();
  const SolveResult result = solve(op, g, cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_ccv1(f_path, result.estimate);
  if (result.state.infeasible_pixels > 0)
    err << "cacti: warning: " << result.state.infeasible_pixels
        << " pixels have signal but an all-zero code; they are left unconstrained\n";

  std::ostringstream report;
  report << "frames: " << op.frames() << "\n"
         << "iterations: " << result.state.iteration << "\n"
         << "status: " << to_string(result.state.status) << "\n"
         << "residual: " << fmt(normalized_residual(op, result.estimate, g).value) << "\n"
         << "sparse_residual: " << fmt(normalized_residual(op, result.state.theta, g).value) << "\n"
         << "seconds_total: " << fmt(seconds) << "\n"
         << "seconds_per_iteration: "
         << fmt(result.state.iteration ? seconds / static_cast<double>(result.state.iteration) : 0.0) << "\n"
         << "passthrough_pixels: " << result.state.passthrough_pixels << "\n"
         << "infeasible_pixels: " << result.state.infeasible_pixels << "\n";
  double mean_psnr = 0.0;
  double base_psnr = 0.0;
  const bool have_truth = c.has("input.truth");
  if (have_truth) {
    const Cube truth = read_ccv1(c.get("input.truth"));
    const ExperimentReport r = make_report(op, g, truth, result, seconds, c.get_double_or("eval.peak", -1.0));
    mean_psnr = r.mean_psnr;
    base_psnr = r.baseline_mean_psnr;
    report << "mean_psnr_db: " << fmt(r.mean_psnr) << "\n"
           << "baseline_mean_psnr_db: " << fmt(r.baseline_mean_psnr) << "\n";
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < r.psnr_db.size(); ++k)
      rows.push_back({std::to_string(k), fmt(r.psnr_db[k]), r.psnr_identical[k] ? "1" : "0"});
    write_csv(f_path + ".psnr.csv", {"frame", "psnr_db", "identical"}, rows);
  }
  write_text(f_path + ".report.txt", report.str());
  if (c.has("output.history")) {
    std::vector<std::vector<std::string>> rows;
    const auto& s = result.state;
    for (std::size_t t = 0; t < s.gap_norm_history.size(); ++t)
      rows.push_back({std::to_string(t + 1), fmt(s.gap_norm_history[t]),
                      t < s.residual_history.size() ? fmt(s.residual_history[t]) : ""});
    write_csv(c.get("output.history"), {"iteration", "gap_norm", "residual"}, rows);
  }
  dump_frames(c, "estimate", result.estimate);
  c.set("input.g", absolute(g_path));
  c.save(echo_path(f_path));
  out << "reconstruct: " << op.frames() << " frames, " << result.state.iteration << " iterations ("
      << to_string(result.state.status) << "), " << brief(seconds) << " s";
  if (have_truth) out << ", PSNR " << brief(mean_psnr) << " dB (baseline " << brief(base_psnr) << " dB)";
  out << " -> " << f_path << '\n';
  return kOk;
}

// evaluate -------------------------------------------------------------------

int run_evaluate(const Flags& flags, std::ostream& out, std::ostream&) {
  RunConfig c = flags.resolve();
  const Cube truth = read_ccv1(require_path(c, "input.truth", "--truth"));
  const Cube estimate = read_ccv1(require_path(c, "input.estimate", "--estimate"));
  require_same_shape(truth, estimate, "evaluate");
  const double peak = c.get_double_or("eval.peak", truth.max_value() > 0.0 ? truth.max_value() : 1.0);
  const PsnrResult p = psnr(truth, estimate, peak);

  std::vector<std::string> header{"frame", "psnr_db", "identical"};
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < p.db.size(); ++k)
    rows.push_back({std::to_string(k), fmt(p.db[k]), p.identical[k] ? "1" : "0"});
  std::ostringstream summary;
  summary << "evaluate: mean PSNR " << brief(p.mean()) << " dB over " << p.db.size() << " frames";

  if (c.has("input.g")) {
    const std::string g_path = c.get("input.g");
    RunConfig oc = inherited_from_snapshot(g_path);
    oc.merge(c);
    const Snapshot g = read_ccv1(g_path);
    const ForwardOperator op = operator_from(oc, g);
    if (op.frames() != estimate.frames())
      fail(ErrorCode::dimension_mismatch, "estimate frames differ from the operator's channel count");
    const double residual = normalized_residual(op, estimate, g).value;
    const PsnrResult base = psnr(truth, baseline_replicate(g, truth.frames()), peak);
    header.push_back("baseline_psnr_db");
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k].push_back(fmt(base.db[k]));
    summary << ", baseline " << brief(base.mean()) << " dB, residual " << brief(residual);
  }
  if (c.has("output.csv")) write_csv(c.get("output.csv"), header, rows);
  out << summary.str() << '\n';
  return kOk;
}


// sweep ----------------------------------------------------------------------

int run_sweep(const Flags& flags, std::ostream& out, std::ostream&) {
  RunConfig c = flags.resolve();
  resolve_seeds(c);
  const std::string csv = require_path(c, "output.csv", "--out");
  const std::string protocol = take_string(c, "sweep.protocol", "residual");
  const SolverSettings settings = settings_from(c);

  if (protocol == "residual") {
    if (!c.has("motion.C")) fail(ErrorCode::config, "missing --C [motion.C]");
    const double C = c.get_double("motion.C");
    const auto steps = parse_list<double>(take_string(c, "sweep.steps", "7,2,1,0.5"), "sweep.steps");
    const MotionProfile critical = triangle_positions(C, 1.0);
    const SceneSpec spec = scene_from(c, critical.frames());
    const Cube scene = generate_scene(spec).cube;
    const Mask mask = mask_from(c, spec.rows, spec.cols, C);
    const auto rows = residual_vs_nf_sweep(scene, mask, C, steps, settings);
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
      cells.push_back({fmt(r.step), std::to_string(r.frames), fmt(r.residual), fmt(r.estimate_residual),
                       std::to_string(r.iterations)});
      out << "N_F=" << r.frames << " d=" << brief(r.step) << " residual=" << brief(r.residual) << '\n';
    }
    write_csv(csv, {"step", "frames", "residual", "estimate_residual", "iterations"}, cells);
  } else if (protocol == "runtime") {
    const auto cs = parse_list<std::size_t>(take_string(c, "sweep.compressions", "7,14,28,56"), "sweep.compressions");
    const std::size_t iterations = take_size(c, "sweep.iterations", 20);
    const std::size_t repeats = take_size(c, "sweep.repeats", 3);
    SceneSpec spec = scene_from(c, cs.front());
    const double fill = take_double(c, "mask.fill", 0.5);
    const RuntimeSweep sweep =
        runtime_vs_nf_sweep(spec, fill, require_seed(c, "mask.seed"), cs, settings, iterations, repeats);
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : sweep.rows) {
      std::string samples;
      for (std::size_t i = 0; i < r.samples.size(); ++i) samples += (i ? ";" : "") + fmt(r.samples[i]);
      cells.push_back({std::to_string(r.frames), fmt(r.seconds_per_iteration), samples});
      out << "N_F=" << r.frames << " seconds/iteration=" << brief(r.seconds_per_iteration) << '\n';
    }
    write_csv(csv, {"frames", "seconds_per_iteration", "samples"}, cells);
    out << "fit: slope=" << brief(sweep.fit.slope) << " intercept=" << brief(sweep.fit.intercept)
        << " r_squared=" << brief(sweep.fit.r_squared) << '\n';
  } else {
    fail(ErrorCode::config, "sweep.protocol must be residual or runtime");
  }
  c.save(echo_path(csv));
  return kOk;
}

// compare-coding -------------------------------------------------------------

int run_compare(const Flags& flags, std::ostream& out, std::ostream&) {
  RunConfig c = flags.resolve();
  resolve_seeds(c);
  const std::string csv = require_path(c, "output.csv", "--out");
  if (!c.has("motion.C")) fail(ErrorCode::config, "missing --C [motion.C]");
  const double C = c.get_double("motion.C");
  const SceneSpec spec = scene_from(c, triangle_positions(C, 1.0).frames());
  const Cube scene = generate_scene(spec).cube;
  const double fill = take_double(c, "mask.fill", 0.5);
  const std::string truth = take_string(c, "compare.truth", "scene");
  if (truth != "scene" && truth != "from-recon") fail(ErrorCode::config, "--truth must be scene or from-recon");
  const CodingComparison r = coding_strategy_compare(scene, C, fill, require_seed(c, "mask.seed"),
                                                     settings_from(c), truth == "from-recon");
  std::vector<std::vector<std::string>> cells;
  for (std::size_t k = 0; k < r.translated.db.size(); ++k)
    cells.push_back({std::to_string(k), fmt(r.translated.db[k]), fmt(r.rerandomized.db[k]),
                     fmt(r.baseline_translated.db[k]), fmt(r.baseline_rerandomized.db[k])});
  write_csv(csv, {"frame", "translated_db", "rerandomized_db", "baseline_translated_db", "baseline_rerandomized_db"},
            cells);
  c.save(echo_path(csv));
  out << "compare-coding: translated " << brief(r.mean_translated) << " dB, re-randomized "
      << brief(r.mean_rerandomized) << " dB, baseline " << brief(r.mean_baseline) << " dB, gap " << brief(r.mean_gap) << " dB\n";
  return kOk;
}

// spectrum-check -------------------------------------------------------------

int run_spectrum(const Flags& flags, std::ostream& out, std::ostream&) {
  RunConfig c = flags.resolve();
  const std::size_t n = take_size(c, "spectrum.n", 64);
  if (n == 0) fail(ErrorCode::config, "spectrum.n must be >= 1");
  const double velocity = take_double(c, "spectrum.velocity", 1.0);
  if (velocity != std::round(velocity)) fail(ErrorCode::config, "spectrum.velocity must be an integer");
  const std::string code_kind = take_string(c, "spectrum.code", "random");
  const std::string object_kind = take_string(c, "spectrum.object", "tone");
  const bool seeded = code_kind == "random" || object_kind == "random";
  Rng rng(seeded ? require_seed(c, "run.seed") : 0);

  Eigen::MatrixXd video(n, n);
  if (object_kind == "tone") {
    const double u0 = take_double(c, "spectrum.tone_u", 3.0);
    const double v0 = take_double(c, "spectrum.tone_v", 5.0);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t t = 0; t < n; ++t)
        video(x, t) = 1.0 + std::cos(2.0 * std::numbers::pi * (u0 * x + v0 * t) / static_cast<double>(n));
  } else if (object_kind == "random") {
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t t = 0; t < n; ++t) video(x, t) = rng.uniform();
  } else {
    fail(ErrorCode::config, "spectrum.object must be tone or random");
  }
  std::vector<double> code(n, 1.0);
  if (code_kind == "random") {
    for (auto& v : code) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
  } else if (code_kind != "ones") {
    fail(ErrorCode::config, "spectrum.code must be ones or random");
  }
  const SpectrumReport r =
      temporal_spectrum_check(video, code, static_cast<long>(velocity), take_size(c, "spectrum.pixel_width", 1),
                              take_size(c, "spectrum.integration_width", 1));
  if (c.has("output.csv")) {
    std::vector<std::vector<std::string>> cells;
    for (Eigen::Index u = 0; u < r.measured.rows(); ++u)
      for (Eigen::Index v = 0; v < r.measured.cols(); ++v)
        cells.push_back({std::to_string(u), std::to_string(v), fmt(std::abs(r.measured(u, v))),
                         fmt(std::abs(r.predicted(u, v)))});
    write_csv(c.get("output.csv"), {"u", "v", "measured_abs", "predicted_abs"}, cells);
    c.save(echo_path(c.get("output.csv")));
  }
  out << "spectrum-check: n=" << n << " discrepancy=" << brief(r.discrepancy)
      << " kernel_only_discrepancy=" << brief(r.kernel_only_discrepancy) << '\n';
  return kOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coded aperture compressive temporal imaging: simulation and GAP reconstruction", "cacti"};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);
  app.set_version_flag("--version", "cacti 0.1.0");

  auto* simulate = app.add_subcommand("simulate", "Scene + mask + motion -> snapshot and truth cube");
  Flags sim(simulate);
  add_scene_flags(sim);
  add_mask_flags(sim);
  add_motion_flags(sim);
  sim.add("--seed", "run.seed", "Master seed for scene, mask and noise");
  sim.add("--noise-sigma", "noise.sigma", "Gaussian read-noise sigma");
  sim.add("--noise-seed", "noise.seed", "Noise seed");
  sim.add("--out", "output.g", "Snapshot output (CCV1)");
  sim.add("--truth", "output.truth", "Ground-truth cube output (CCV1)");
  sim.add("--mask-out", "output.mask", "Mask output (CCV1)");
  sim.add("--pgm-dir", "output.pgm_dir", "Directory for 8-bit PGM frame dumps");

  auto* calibrate = app.add_subcommand("calibrate", "Mask + motion -> calibration stack");
  Flags cal(calibrate);
  cal.add("--rows", "scene.rows", "Active-area rows");
  cal.add("--cols", "scene.cols", "Active-area columns");
  add_mask_flags(cal);
  add_motion_flags(cal);
  cal.add("--jitter", "calibration.jitter", "RMS position jitter (px)");
  cal.add("--blur", "calibration.blur", "Gaussian blur sigma along rows (px)");
  cal.add("--seed", "run.seed", "Master seed");
  cal.add("--calibration-seed", "calibration.seed", "Jitter seed");
  cal.add("--out", "output.stack", "Stack output (CCV1)");

  auto* reconstruct = app.add_subcommand("reconstruct", "Snapshot + operator -> estimate cube and report");
  Flags rec(reconstruct);
  rec.add("--in", "input.g", "Snapshot (CCV1); <in>.config.txt supplies defaults when present");
  rec.add("--mask", "input.mask", "Mask (CCV1)");
  add_motion_flags(rec);
  rec.add("--frames", "recon.frames", "Reconstruct this many frames (sets d = C / frames)");
  rec.add("--stack", "input.stack", "Calibration stack (CCV1) used instead of a mask");
  rec.add("--channels", "input.channels", "Stack channels: all | critical | interior:N | every:N | A-B, ...");
  rec.add("--truth", "input.truth", "Ground truth for PSNR (CCV1)");
  rec.add("--peak", "eval.peak", "PSNR peak (default: truth maximum)");
  add_solver_flags(rec);
  rec.add("--out", "output.estimate", "Estimate output (CCV1)");
  rec.add("--history", "output.history", "Per-iteration CSV");
  rec.add("--pgm-dir", "output.pgm_dir", "Directory for 8-bit PGM frame dumps");
  bool verbose = false;
  reconstruct->add_flag("-v,--verbose", verbose, "Log one line per iteration to stderr");

  auto* evaluate = app.add_subcommand("evaluate", "Truth + estimate -> per-frame PSNR CSV");
  Flags ev(evaluate);
  ev.add("--truth", "input.truth", "Ground truth (CCV1)");
  ev.add("--estimate", "input.estimate", "Estimate (CCV1)");
  ev.add("--g", "input.g", "Snapshot, for residual and baseline (CCV1)");
  ev.add("--mask", "input.mask", "Mask for the residual operator");
  ev.add("--peak", "eval.peak", "PSNR peak (default: truth maximum)");
  ev.add("--out", "output.csv", "CSV output");

  auto* sweep = app.add_subcommand("sweep", "Residual or runtime versus number of frames");
  Flags sw(sweep);
  sw.add("--protocol", "sweep.protocol", "residual | runtime");
  add_scene_flags(sw);
  add_mask_flags(sw);
  sw.add("--C", "motion.C", "Mask travel per integration (residual protocol)");
  sw.add("--steps", "sweep.steps", "Comma list of d values (residual protocol)");
  sw.add("--compressions", "sweep.compressions", "Comma list of C values (runtime protocol)");
  sw.add("--iterations", "sweep.iterations", "Timed iterations per configuration");
  sw.add("--repeats", "sweep.repeats", "Timing repeats (median is reported)");
  sw.add("--seed", "run.seed", "Master seed");
  add_solver_flags(sw);
  sw.add("--out", "output.csv", "CSV output");

  auto* compare = app.add_subcommand("compare-coding", "Translated versus re-randomized coding");
  Flags cmp(compare);
  add_scene_flags(cmp);
  cmp.add("--C", "motion.C", "Mask travel per integration");
  cmp.add("--fill", "mask.fill", "Mask open fraction");
  cmp.add("--mask-seed", "mask.seed", "Mask seed");
  cmp.add("--seed", "run.seed", "Master seed");
  cmp.add("--truth", "compare.truth", "scene | from-recon");
  add_solver_flags(cmp);
  cmp.add("--out", "output.csv", "CSV output");

  auto* spectrum = app.add_subcommand("spectrum-check", "Discrete moving-code spectrum check");
  Flags sp(spectrum);
  sp.add("--n", "spectrum.n", "Samples per axis");
  sp.add("--velocity", "spectrum.velocity", "Code shift per time sample (integer)");
  sp.add("--code", "spectrum.code", "ones | random");
  sp.add("--object", "spectrum.object", "tone | random");
  sp.add("--tone-u", "spectrum.tone_u", "Tone spatial frequency");
  sp.add("--tone-v", "spectrum.tone_v", "Tone temporal frequency");
  sp.add("--pixel-width", "spectrum.pixel_width", "Spatial integration width");
  sp.add("--integration-width", "spectrum.integration_width", "Temporal integration width");
  sp.add("--seed", "run.seed", "Seed for random code or object");
  sp.add("--out", "output.csv", "CSV of spectrum magnitudes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) return run_simulate(sim, out, err);
    if (*calibrate) return run_calibrate(cal, out, err);
    if (*reconstruct) return run_reconstruct(rec, verbose, out, err);
    if (*evaluate) return run_evaluate(ev, out, err);
    if (*sweep) return run_sweep(sw, out, err);
    if (*compare) return run_compare(cmp, out, err);
    if (*spectrum) return run_spectrum(sp, out, err);
  } catch (const Error& e) {
    err << "cacti: error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "cacti: internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace cacti::cli
