#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cacti/core.hpp"
#include "cacti/forward_model.hpp"
#include "cacti/gap_solver.hpp"
#include "cacti/scene.hpp"

namespace cacti {

/// Reported for frames that match the reference exactly.
inline constexpr double kPsnrCap = 300.0;

struct PsnrResult {
  std::vector<double> db;
  std::vector<bool> identical;

  double mean() const;
};

/// Per frame: 10 log10(peak^2 / MSE_k). Identical frames report kPsnrCap.
PsnrResult psnr(const Cube& reference, const Cube& estimate, double peak);
/// Peak defaults to the reference maximum (1 if the reference is all zero).
PsnrResult psnr(const Cube& reference, const Cube& estimate);

/// Per-pixel sum over frames: the uncoded, time-integrated image.
Snapshot sum_frames(const Cube& cube);

/// Motion-blind comparator: every frame is snapshot / frames.
Cube baseline_replicate(const Snapshot& snapshot, std::size_t frames);

struct ExperimentReport {
  std::vector<double> psnr_db;
  std::vector<bool> psnr_identical;
  double mean_psnr = 0.0;
  double baseline_mean_psnr = 0.0;
  /// ||g - H f_e|| / ||g|| of the returned estimate.
  double residual = 0.0;
  /// Same metric for the sparse iterate theta^(t).
  double sparse_residual = 0.0;
  std::size_t iterations = 0;
  std::string status;
  double seconds_total = 0.0;
  double seconds_per_iteration = 0.0;
  std::map<std::string, std::string> config;
};

/// Scores a finished solve against ground truth.
ExperimentReport make_report(const ForwardOperator& op, const Snapshot& snapshot, const Cube& truth,
                             const SolveResult& result, double seconds, double peak = -1.0);

struct ResidualSweepRow {
  double step = 0.0;
  std::size_t frames = 0;
  /// Residual of the sparse iterate theta^(t), the quantity swept.
  double residual = 0.0;
  /// Residual of the manifold iterate f^(t); ~0 by construction when noiseless.
  double estimate_residual = 0.0;
  std::size_t iterations = 0;
};

/// Simulates g from `scene` (frames = C) with the critically encoded operator,
/// then reconstructs it with the operator for every d in `steps`.
std::vector<ResidualSweepRow> residual_vs_nf_sweep(const Cube& scene, const Mask& mask, double compression,
                                                   const std::vector<double>& steps,
                                                   const SolverSettings& settings);

struct RuntimeSweepRow {
  std::size_t frames = 0;
  double seconds_per_iteration = 0.0;
  std::vector<double> samples;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct RuntimeSweep {
  std::vector<RuntimeSweepRow> rows;
  LinearFit fit;
};

/// For each C (d = 1) renders `scene` with C frames, simulates g and times
/// exactly `iterations` solver iterations; reports the median over `repeats`.
RuntimeSweep runtime_vs_nf_sweep(const SceneSpec& scene, double fill, std::uint64_t mask_seed,
                                 const std::vector<std::size_t>& compressions, const SolverSettings& settings,
                                 std::size_t iterations, std::size_t repeats = 3);

struct CodingComparison {
  PsnrResult translated;
  PsnrResult rerandomized;
  PsnrResult baseline_translated;
  PsnrResult baseline_rerandomized;
  double mean_translated = 0.0;
  double mean_rerandomized = 0.0;
  double mean_baseline = 0.0;
  /// mean_translated - mean_rerandomized
  double mean_gap = 0.0;
  double residual_translated = 0.0;
  double residual_rerandomized = 0.0;
};

/// Reconstructs the same scene (frames = C, d = 1) from a translated-mask
/// snapshot and from a per-frame re-randomized snapshot. With
/// `truth_from_recon`, the translated reconstruction replaces the scene as
/// ground truth before both simulations.
CodingComparison coding_strategy_compare(const Cube& scene, double compression, double fill,
                                         std::uint64_t seed, const SolverSettings& settings,
                                         bool truth_from_recon = false);

struct SpectrumReport {
  Eigen::MatrixXcd measured;
  Eigen::MatrixXcd predicted;
  /// max |measured - predicted| / max |measured|
  double discrepancy = 0.0;
  /// Same comparison against kernel * object spectrum alone (exact only when
  /// the code is identically one).
  double kernel_only_discrepancy = 0.0;
};

/// Unnormalized 2D DFT, F(u, v) = sum_{x,t} f(x, t) exp(-2 pi i (u x / nx + v t / nt)).
Eigen::MatrixXcd dft2(const Eigen::MatrixXcd& input);

/// Discrete space-time spectrum check on an n x n video (rows: x, cols: t).
/// The code T moves `velocity` samples per time step (circularly); the
/// detector integrates `pixel_width` x `integration_width` samples. The
/// measured spectrum is compared with
///   Kx(u) Kt(v) (1/n) sum_w T^(w) f^(u - w, v + velocity w),
/// K being the geometric-sum transfer function of each box integrator.
SpectrumReport temporal_spectrum_check(const Eigen::MatrixXd& video, const std::vector<double>& code,
                                       long velocity, std::size_t pixel_width = 1,
                                       std::size_t integration_width = 1);

}  // namespace cacti
