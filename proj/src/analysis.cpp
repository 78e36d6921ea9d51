#include "cacti/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace cacti {

double PsnrResult::mean() const {
  if (db.empty()) return 0.0;
  return std::accumulate(db.begin(), db.end(), 0.0) / static_cast<double>(db.size());
}

PsnrResult psnr(const Cube& reference, const Cube& estimate, double peak) {
  require_same_shape(reference, estimate, "psnr");
  if (!(peak > 0.0)) fail(ErrorCode::invalid_argument, "psnr peak must be > 0");
  PsnrResult out;
  for (std::size_t k = 0; k < reference.frames(); ++k) {
    auto a = reference.frame(k);
    auto b = estimate.frame(k);
    double mse = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) {
      const double e = a[p] - b[p];
      mse += e * e;
    }
    mse /= static_cast<double>(a.size());
    if (mse == 0.0) {
      out.db.push_back(kPsnrCap);
      out.identical.push_back(true);
    } else {
      out.db.push_back(std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse)));
      out.identical.push_back(false);
    }
  }
  return out;
}

PsnrResult psnr(const Cube& reference, const Cube& estimate) {
  const double peak = reference.max_value();
  return psnr(reference, estimate, peak > 0.0 ? peak : 1.0);
}

Snapshot sum_frames(const Cube& cube) {
  Snapshot out(cube.rows(), cube.cols(), 1);
  for (std::size_t k = 0; k < cube.frames(); ++k) {
    auto f = cube.frame(k);
    for (std::size_t p = 0; p < f.size(); ++p) out.values()[p] += f[p];
  }
  return out;
}

Cube baseline_replicate(const Snapshot& snapshot, std::size_t frames) {
  if (snapshot.frames() != 1) fail(ErrorCode::dimension_mismatch, "baseline expects a single-frame snapshot");
  if (frames == 0) fail(ErrorCode::invalid_argument, "baseline needs at least one frame");
  Cube out(snapshot.rows(), snapshot.cols(), frames);
  const double scale = 1.0 / static_cast<double>(frames);
  for (std::size_t k = 0; k < frames; ++k) {
    auto dst = out.frame(k);
    for (std::size_t p = 0; p < dst.size(); ++p) dst[p] = snapshot.values()[p] * scale;
  }
  return out;
}

ExperimentReport make_report(const ForwardOperator& op, const Snapshot& snapshot, const Cube& truth,
                             const SolveResult& result, double seconds, double peak) {
  ExperimentReport r;
  if (peak <= 0.0) peak = truth.max_value() > 0.0 ? truth.max_value() : 1.0;
  const PsnrResult p = psnr(truth, result.estimate, peak);
  r.psnr_db = p.db;
  r.psnr_identical = p.identical;
  r.mean_psnr = p.mean();
  r.baseline_mean_psnr = psnr(truth, baseline_replicate(snapshot, op.frames()), peak).mean();
  r.residual = normalized_residual(op, result.estimate, snapshot).value;
  r.sparse_residual = normalized_residual(op, result.state.theta, snapshot).value;
  r.iterations = result.state.iteration;
  r.status = to_string(result.state.status);
  r.seconds_total = seconds;
  r.seconds_per_iteration = r.iterations ? seconds / static_cast<double>(r.iterations) : 0.0;
  return r;
}

std::vector<ResidualSweepRow> residual_vs_nf_sweep(const Cube& scene, const Mask& mask, double compression,
                                                   const std::vector<double>& steps,
                                                   const SolverSettings& settings) {
  const MotionProfile critical = triangle_positions(compression, 1.0);
  if (critical.frames() != scene.frames()) {
    std::ostringstream os;
    os << "sweep scene must have C = " << critical.frames() << " frames, got " << scene.frames();
    fail(ErrorCode::dimension_mismatch, os.str());
  }
  const ForwardOperator truth_op = build_operator(mask, critical, scene.rows(), scene.cols());
  const Snapshot g = forward(truth_op, scene);

  std::vector<ResidualSweepRow> rows;
  for (double d : steps) {
    const ForwardOperator op = build_operator(mask, triangle_positions(compression, d), scene.rows(), scene.cols());
    const SolveResult res = solve(op, g, make_solver_config(op, settings));
    ResidualSweepRow row;
    row.step = d;
    row.frames = op.frames();
    row.residual = normalized_residual(op, res.state.theta, g).value;
    row.estimate_residual = normalized_residual(op, res.estimate, g).value;
    row.iterations = res.state.iteration;
    rows.push_back(row);
  }
  return rows;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::invalid_argument, "line fit needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  if (sxx == 0.0) fail(ErrorCode::invalid_argument, "line fit needs distinct x values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

RuntimeSweep runtime_vs_nf_sweep(const SceneSpec& scene, double fill, std::uint64_t mask_seed,
                                 const std::vector<std::size_t>& compressions, const SolverSettings& settings,
                                 std::size_t iterations, std::size_t repeats) {
  if (compressions.empty()) fail(ErrorCode::invalid_argument, "runtime sweep needs at least one C");
  if (repeats == 0) fail(ErrorCode::invalid_argument, "runtime sweep needs repeats >= 1");
  const std::size_t max_c = *std::max_element(compressions.begin(), compressions.end());
  if (max_c >= scene.rows) fail(ErrorCode::infeasible_shift, "largest C leaves no room for the mask");
  const Mask mask = generate_mask(scene.rows - max_c, scene.cols, fill, mask_seed);

  RuntimeSweep sweep;
  std::vector<double> xs, ys;
  for (std::size_t c : compressions) {
    SceneSpec spec = scene;
    spec.frames = c;
    const Cube truth = generate_scene(spec).cube;
    const ForwardOperator op =
        build_operator(mask, triangle_positions(static_cast<double>(c), 1.0), scene.rows, scene.cols);
    const Snapshot g = forward(op, truth);
    SolverConfig cfg = make_solver_config(op, settings);
    cfg.max_iterations = std::max<std::size_t>(1, iterations);
    cfg.stop_tolerance = std::numeric_limits<double>::min();
    cfg.record_history = false;

    RuntimeSweepRow row;
    row.frames = op.frames();
    for (std::size_t rep = 0; rep < repeats; ++rep) {
      if (iterations == 0) {
        row.samples.push_back(0.0);
        continue;
      }
      GapSolver solver(op, g, cfg);
      const auto t0 = std::chrono::steady_clock::now();
      solver.run();
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      row.samples.push_back(secs / static_cast<double>(solver.state().iteration));
    }
    std::vector<double> sorted = row.samples;
    std::sort(sorted.begin(), sorted.end());
    row.seconds_per_iteration = sorted[sorted.size() / 2];
    xs.push_back(static_cast<double>(row.frames));
    ys.push_back(row.seconds_per_iteration);
    sweep.rows.push_back(std::move(row));
  }
  if (xs.size() >= 2 && iterations > 0) sweep.fit = fit_line(xs, ys);
  return sweep;
}

CodingComparison coding_strategy_compare(const Cube& scene, double compression, double fill,
                                         std::uint64_t seed, const SolverSettings& settings,
                                         bool truth_from_recon) {
  const MotionProfile profile = triangle_positions(compression, 1.0);
  if (profile.frames() != scene.frames())
    fail(ErrorCode::dimension_mismatch, "coding comparison scene must have C frames");
  const auto pad = static_cast<std::size_t>(std::ceil(compression));
  if (pad >= scene.rows()) fail(ErrorCode::infeasible_shift, "C leaves no room for the mask");

  const Mask mask = generate_mask(scene.rows() - pad, scene.cols(), fill, seed);
  const ForwardOperator translated = build_operator(mask, profile, scene.rows(), scene.cols());
  const ForwardOperator rerandomized =
      build_rerandomized_operator(scene.rows(), scene.cols(), profile.frames(), fill, derive_seed(seed, 1));

  Cube truth = scene;
  if (truth_from_recon) {
    const Snapshot g = forward(translated, scene);
    truth = solve(translated, g, make_solver_config(translated, settings)).estimate;
  }
  const double peak = truth.max_value() > 0.0 ? truth.max_value() : 1.0;

  CodingComparison out;
  auto run = [&](const ForwardOperator& op, PsnrResult& recon, PsnrResult& base, double& residual) {
    const Snapshot g = forward(op, truth);
    const SolveResult res = solve(op, g, make_solver_config(op, settings));
    recon = psnr(truth, res.estimate, peak);
    base = psnr(truth, baseline_replicate(g, op.frames()), peak);
    residual = normalized_residual(op, res.state.theta, g).value;
  };
  run(translated, out.translated, out.baseline_translated, out.residual_translated);
  run(rerandomized, out.rerandomized, out.baseline_rerandomized, out.residual_rerandomized);
  out.mean_translated = out.translated.mean();
  out.mean_rerandomized = out.rerandomized.mean();
  out.mean_baseline = std::max(out.baseline_translated.mean(), out.baseline_rerandomized.mean());
  out.mean_gap = out.mean_translated - out.mean_rerandomized;
  return out;
}

namespace {

// Row-wise then column-wise DFT with a precomputed twiddle table.
Eigen::MatrixXcd dft_rows_cols(const Eigen::MatrixXcd& in) {
  const auto nx = in.rows();
  const auto nt = in.cols();
  auto twiddles = [](Eigen::Index n) {
    Eigen::MatrixXcd w(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        w(a, b) = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((a * b) % n) / static_cast<double>(n));
    return w;
  };
  const Eigen::MatrixXcd wx = twiddles(nx);
  const Eigen::MatrixXcd wt = twiddles(nt);
  return wx * in * wt;
}

Eigen::VectorXcd box_transfer(Eigen::Index n, std::size_t width) {
  Eigen::VectorXcd k = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index u = 0; u < n; ++u)
    for (std::size_t a = 0; a < width; ++a)
      k(u) += std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((u * static_cast<Eigen::Index>(a)) % n) /
                                  static_cast<double>(n));
  return k;
}

}  // namespace

Eigen::MatrixXcd dft2(const Eigen::MatrixXcd& input) { return dft_rows_cols(input); }

SpectrumReport temporal_spectrum_check(const Eigen::MatrixXd& video, const std::vector<double>& code,
                                       long velocity, std::size_t pixel_width, std::size_t integration_width) {
  const Eigen::Index n = video.rows();
  if (n == 0 || video.cols() != n) fail(ErrorCode::dimension_mismatch, "spectrum check needs a square n x n video");
  if (static_cast<Eigen::Index>(code.size()) != n)
    fail(ErrorCode::dimension_mismatch, "code length must equal the video's spatial length");
  if (pixel_width == 0 || integration_width == 0)
    fail(ErrorCode::invalid_argument, "integration widths must be >= 1");

  const auto nu = static_cast<Eigen::Index>(velocity);
  auto wrap = [n](Eigen::Index v) { return ((v % n) + n) % n; };

  // Coded video c(x, t) = f(x, t) T(x - velocity t), then box integration.
  Eigen::MatrixXd coded(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index t = 0; t < n; ++t)
      coded(x, t) = video(x, t) * code[static_cast<std::size_t>(wrap(x - nu * t))];
  Eigen::MatrixXd measured(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index t = 0; t < n; ++t) {
      double acc = 0.0;
      for (std::size_t a = 0; a < pixel_width; ++a)
        for (std::size_t b = 0; b < integration_width; ++b)
          acc += coded(wrap(x - static_cast<Eigen::Index>(a)), wrap(t - static_cast<Eigen::Index>(b)));
      measured(x, t) = acc;
    }

  SpectrumReport r;
  r.measured = dft_rows_cols(measured.cast<std::complex<double>>());
  const Eigen::MatrixXcd object = dft_rows_cols(video.cast<std::complex<double>>());
  Eigen::VectorXcd code_spec = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index w = 0; w < n; ++w)
    for (Eigen::Index y = 0; y < n; ++y)
      code_spec(w) += code[static_cast<std::size_t>(y)] *
                      std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((w * y) % n) /
                                          static_cast<double>(n));
  const Eigen::VectorXcd kx = box_transfer(n, pixel_width);
  const Eigen::VectorXcd kt = box_transfer(n, integration_width);

  r.predicted.resize(n, n);
  Eigen::MatrixXcd kernel_only(n, n);
  for (Eigen::Index u = 0; u < n; ++u)
    for (Eigen::Index v = 0; v < n; ++v) {
      std::complex<double> acc = 0.0;
      for (Eigen::Index w = 0; w < n; ++w)
        acc += code_spec(w) * object(wrap(u - w), wrap(v + nu * w));
      r.predicted(u, v) = kx(u) * kt(v) * acc / static_cast<double>(n);
      kernel_only(u, v) = kx(u) * kt(v) * object(u, v);
    }

  const double scale = r.measured.cwiseAbs().maxCoeff();
  const double denom = scale > 0.0 ? scale : 1.0;
  r.discrepancy = (r.measured - r.predicted).cwiseAbs().maxCoeff() / denom;
  r.kernel_only_discrepancy = (r.measured - kernel_only).cwiseAbs().maxCoeff() / denom;
  return r;
}

}  // namespace cacti
