#include "cacti/gap_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace cacti {

namespace {

void check_partition_shape(const Cube& w, const GroupPartition& partition) {
  if (w.rows() == partition.rows && w.cols() == partition.cols && w.frames() == partition.frames) return;
  std::ostringstream os;
  os << "group partition sized " << partition.rows << "x" << partition.cols << "x" << partition.frames
     << " does not match coefficients " << w.rows() << "x" << w.cols() << "x" << w.frames();
  fail(ErrorCode::dimension_mismatch, os.str());
}

}  // namespace

GroupPartition GroupPartition::blocks(std::size_t rows, std::size_t cols, std::size_t frames,
                                      std::size_t block_rows, std::size_t block_cols,
                                      std::size_t block_frames) {
  if (rows == 0 || cols == 0 || frames == 0) fail(ErrorCode::invalid_argument, "partition dims must be >= 1");
  if (block_rows == 0 || block_cols == 0 || block_frames == 0)
    fail(ErrorCode::invalid_argument, "block sizes must be >= 1");
  GroupPartition p;
  p.rows = rows;
  p.cols = cols;
  p.frames = frames;
  p.indices.reserve(rows * cols * frames);
  for (std::size_t k0 = 0; k0 < frames; k0 += block_frames)
    for (std::size_t i0 = 0; i0 < rows; i0 += block_rows)
      for (std::size_t j0 = 0; j0 < cols; j0 += block_cols) {
        for (std::size_t k = k0; k < std::min(frames, k0 + block_frames); ++k)
          for (std::size_t i = i0; i < std::min(rows, i0 + block_rows); ++i)
            for (std::size_t j = j0; j < std::min(cols, j0 + block_cols); ++j)
              p.indices.push_back(k * rows * cols + i * cols + j);
        p.offsets.push_back(p.indices.size());
        p.weights.push_back(1.0);
      }
  return p;
}

GroupPartition GroupPartition::singletons(std::size_t rows, std::size_t cols, std::size_t frames) {
  return blocks(rows, cols, frames, 1, 1, 1);
}

GroupPartition GroupPartition::from_groups(std::size_t rows, std::size_t cols, std::size_t frames,
                                           const std::vector<std::vector<std::size_t>>& groups,
                                           std::vector<double> weights) {
  GroupPartition p;
  p.rows = rows;
  p.cols = cols;
  p.frames = frames;
  for (const auto& g : groups) {
    p.indices.insert(p.indices.end(), g.begin(), g.end());
    p.offsets.push_back(p.indices.size());
  }
  p.weights = std::move(weights);
  p.validate();
  return p;
}

void GroupPartition::apply_subband_weights(const TransformSpec& spec) {
  const auto& kinds = spec.kinds();
  for (std::size_t l = 0; l < group_count(); ++l) {
    const std::size_t first = indices[offsets[l]];
    const std::size_t k = first / (rows * cols);
    const std::size_t i = (first / cols) % rows;
    const std::size_t j = first % cols;
    weights[l] = 1.0 + static_cast<double>(axis_level(kinds[0], i) + axis_level(kinds[1], j) +
                                           axis_level(kinds[2], k));
  }
}

void GroupPartition::validate() const {
  const std::size_t total = rows * cols * frames;
  if (total == 0) fail(ErrorCode::invalid_argument, "partition covers an empty cube");
  if (offsets.size() != weights.size() + 1 || offsets.front() != 0 || offsets.back() != indices.size())
    fail(ErrorCode::invalid_argument, "partition offsets and weights are inconsistent");
  for (std::size_t l = 0; l < group_count(); ++l) {
    if (group_size(l) == 0) fail(ErrorCode::invalid_argument, "partition contains an empty group");
    if (!(weights[l] > 0.0)) fail(ErrorCode::invalid_argument, "partition weights must be > 0");
  }
  if (indices.size() != total) fail(ErrorCode::invalid_argument, "partition is not exhaustive");
  std::vector<char> seen(total, 0);
  for (std::size_t idx : indices) {
    if (idx >= total) fail(ErrorCode::invalid_argument, "partition index out of range");
    if (seen[idx]) fail(ErrorCode::invalid_argument, "partition groups overlap");
    seen[idx] = 1;
  }
}

PartitionScheme parse_partition_scheme(const std::string& name) {
  if (name == "blocks" || name == "block2") return PartitionScheme::blocks;
  if (name == "singletons" || name == "l1") return PartitionScheme::singletons;
  fail(ErrorCode::invalid_argument, "unknown partition scheme '" + name + "'");
}

const char* to_string(PartitionScheme scheme) noexcept {
  return scheme == PartitionScheme::blocks ? "blocks" : "singletons";
}

std::vector<double> group_norms(const Cube& w, const GroupPartition& partition) {
  check_partition_shape(w, partition);
  std::vector<double> norms(partition.group_count());
  const auto& v = w.values();
  for (std::size_t l = 0; l < norms.size(); ++l) {
    double acc = 0.0;
    for (std::size_t n = partition.offsets[l]; n < partition.offsets[l + 1]; ++n) {
      const double x = v[partition.indices[n]];
      acc += x * x;
    }
    norms[l] = std::sqrt(acc);
  }
  return norms;
}

double weighted_l21_norm(const Cube& w, const GroupPartition& partition) {
  const auto norms = group_norms(w, partition);
  double acc = 0.0;
  for (std::size_t l = 0; l < norms.size(); ++l) acc += partition.weights[l] * norms[l];
  return acc;
}

RadiusSelection select_radius(const Cube& w, const GroupPartition& partition,
                              std::size_t measurement_count) {
  RadiusSelection sel;
  sel.norms = group_norms(w, partition);
  const std::size_t m = sel.norms.size();
  std::vector<double> level(m);
  for (std::size_t l = 0; l < m; ++l) level[l] = sel.norms[l] / partition.weights[l];

  sel.order.resize(m);
  std::iota(sel.order.begin(), sel.order.end(), std::size_t{0});
  std::stable_sort(sel.order.begin(), sel.order.end(),
                   [&](std::size_t a, std::size_t b) { return level[a] > level[b]; });

  std::size_t covered = 0;
  sel.m_star = m;
  for (std::size_t q = 0; q < m; ++q) {
    covered += partition.group_size(sel.order[q]);
    if (covered >= measurement_count) {
      sel.m_star = q + 1;
      break;
    }
  }
  if (sel.m_star < m) {
    sel.reference_group = sel.order[sel.m_star];
    sel.reference_level = level[*sel.reference_group];
  }
  for (std::size_t q = 0; q < sel.m_star; ++q) {
    const std::size_t l = sel.order[q];
    const double beta = partition.weights[l];
    sel.radius += beta * beta * (level[l] - sel.reference_level);
  }
  return sel;
}

Cube shrink_groups(const Cube& w, const GroupPartition& partition, double level) {
  check_partition_shape(w, partition);
  Cube out(w.rows(), w.cols(), w.frames());
  if (level <= 0.0) {
    out = w;
    return out;
  }
  const auto norms = group_norms(w, partition);
  const auto& in = w.values();
  auto& dst = out.values();
  for (std::size_t l = 0; l < norms.size(); ++l) {
    if (norms[l] == 0.0) continue;
    const double factor = std::max(1.0 - partition.weights[l] * level / norms[l], 0.0);
    if (factor == 0.0) continue;
    for (std::size_t n = partition.offsets[l]; n < partition.offsets[l + 1]; ++n) {
      const std::size_t idx = partition.indices[n];
      dst[idx] = in[idx] * factor;
    }
  }
  return out;
}

Cube project_l21_ball(const Cube& w, const GroupPartition& partition, const RadiusSelection& selection) {
  return shrink_groups(w, partition, selection.reference_level);
}

ManifoldProjection project_linear_manifold(const ForwardOperator& op, const Snapshot& snapshot,
                                           const Cube& theta) {
  require_same_shape(op.planes(), theta, "manifold projection");
  if (snapshot.rows() != op.rows() || snapshot.cols() != op.cols() || snapshot.frames() != 1)
    fail(ErrorCode::dimension_mismatch, "manifold projection: snapshot does not match operator");

  ManifoldProjection out{theta};
  const std::size_t n = op.pixels();
  const auto& norm = op.normalizer().values();
  auto g = snapshot.frame(0);

  std::vector<double> correction(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) correction[p] = g[p];
  for (std::size_t k = 0; k < op.frames(); ++k) {
    auto t = op.planes().frame(k);
    auto th = theta.frame(k);
    for (std::size_t p = 0; p < n; ++p) correction[p] -= t[p] * th[p];
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (norm[p] == 0.0) {
      ++out.passthrough_pixels;
      if (g[p] != 0.0) ++out.infeasible_pixels;
      correction[p] = 0.0;
    } else {
      correction[p] /= norm[p];
    }
  }
  for (std::size_t k = 0; k < op.frames(); ++k) {
    auto t = op.planes().frame(k);
    auto f = out.f.frame(k);
    for (std::size_t p = 0; p < n; ++p) f[p] += t[p] * correction[p];
  }
  return out;
}

Residual normalized_residual(const ForwardOperator& op, const Cube& f, const Snapshot& snapshot) {
  const Snapshot predicted = forward(op, f);
  if (snapshot.rows() != op.rows() || snapshot.cols() != op.cols() || snapshot.frames() != 1)
    fail(ErrorCode::dimension_mismatch, "residual: snapshot does not match operator");
  const auto& norm = op.normalizer().values();
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t p = 0; p < op.pixels(); ++p) {
    if (norm[p] == 0.0) continue;
    const double g = snapshot.values()[p];
    const double e = g - predicted.values()[p];
    err += e * e;
    ref += g * g;
  }
  if (ref == 0.0) return {std::sqrt(err), true};
  return {std::sqrt(err / ref), false};
}

SolverConfig SolverConfig::defaults_for(const ForwardOperator& op) {
  SolverConfig cfg;
  cfg.transform = TransformSpec::moving(op.rows(), op.cols(), op.frames());
  cfg.partition = GroupPartition::blocks(op.rows(), op.cols(), op.frames());
  return cfg;
}

void SolverConfig::validate() const {
  if (max_iterations == 0) fail(ErrorCode::invalid_argument, "max_iterations must be >= 1");
  if (!(stop_tolerance > 0.0)) fail(ErrorCode::invalid_argument, "stop_tolerance must be > 0");
  if (stall_window == 0) fail(ErrorCode::invalid_argument, "stall_window must be >= 1");
  partition.validate();
  if (transform.rows() != partition.rows || transform.cols() != partition.cols ||
      transform.frames() != partition.frames)
    fail(ErrorCode::dimension_mismatch, "transform and partition sizes disagree");
}

const char* to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::running: return "running";
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
  }
  return "unknown";
}

GapSolver::GapSolver(const ForwardOperator& op, Snapshot snapshot, SolverConfig config)
    : op_(op), snapshot_(std::move(snapshot)), config_(std::move(config)) {
  config_.validate();
  if (config_.transform.rows() != op.rows() || config_.transform.cols() != op.cols() ||
      config_.transform.frames() != op.frames())
    fail(ErrorCode::dimension_mismatch, "solver transform does not match operator");
  if (snapshot_.rows() != op.rows() || snapshot_.cols() != op.cols() || snapshot_.frames() != 1)
    fail(ErrorCode::dimension_mismatch, "snapshot does not match operator active area");
  state_.theta = Cube(op.rows(), op.cols(), op.frames());
  state_.theta_coefficients = state_.theta;
  state_.f = state_.theta;
}

GapSolver::GapSolver(const ForwardOperator& op, Snapshot snapshot, SolverConfig config, SolverState resume)
    : GapSolver(op, std::move(snapshot), std::move(config)) {
  require_same_shape(op.planes(), resume.theta, "resume state");
  state_ = std::move(resume);
  if (state_.status == SolveStatus::max_iterations) state_.status = SolveStatus::running;
}

bool GapSolver::step() {
  if (state_.status == SolveStatus::converged) return false;

  ManifoldProjection proj = project_linear_manifold(op_, snapshot_, state_.theta);
  state_.passthrough_pixels = proj.passthrough_pixels;
  state_.infeasible_pixels = proj.infeasible_pixels;
  state_.f = std::move(proj.f);

  const Cube w = apply(config_.transform, state_.f);
  const RadiusSelection sel = select_radius(w, config_.partition, op_.pixels());
  state_.m_star = sel.m_star;
  state_.radius = sel.radius;
  state_.theta_coefficients = project_l21_ball(w, config_.partition, sel);
  state_.theta = apply_inverse(config_.transform, state_.theta_coefficients);
  ++state_.iteration;

  double diff = 0.0;
  for (std::size_t n = 0; n < state_.f.size(); ++n) {
    const double e = state_.f.values()[n] - state_.theta.values()[n];
    diff += e * e;
  }
  const double gap = std::sqrt(diff);
  const double residual = normalized_residual(op_, state_.theta, snapshot_).value;
  if (config_.record_history) {
    state_.gap_norm_history.push_back(gap);
    state_.residual_history.push_back(residual);
  }
  if (config_.log) *config_.log << state_.iteration << ' ' << gap << ' ' << residual << '\n';

  if (state_.iteration > 1) {
    const double prev = state_.last_gap_norm;
    const double change = prev > 0.0 ? std::abs(gap - prev) / prev : std::abs(gap - prev);
    state_.stalled = change < config_.stop_tolerance ? state_.stalled + 1 : 0;
  }
  state_.last_gap_norm = gap;

  if (gap == 0.0 || state_.stalled >= config_.stall_window) {
    state_.status = SolveStatus::converged;
    return false;
  }
  if (state_.iteration >= config_.max_iterations) {
    state_.status = SolveStatus::max_iterations;
    return false;
  }
  state_.status = SolveStatus::running;
  return true;
}

SolveStatus GapSolver::run() {
  while (state_.iteration < config_.max_iterations && step()) {
  }
  if (state_.status == SolveStatus::running) state_.status = SolveStatus::max_iterations;
  return state_.status;
}

SolverConfig make_solver_config(const ForwardOperator& op, const SolverSettings& settings) {
  SolverConfig cfg;
  cfg.max_iterations = settings.max_iterations;
  cfg.stop_tolerance = settings.stop_tolerance;
  cfg.transform = TransformSpec(settings.transform, op.rows(), op.cols(), op.frames());
  cfg.partition = settings.partition == PartitionScheme::blocks
                      ? GroupPartition::blocks(op.rows(), op.cols(), op.frames())
                      : GroupPartition::singletons(op.rows(), op.cols(), op.frames());
  if (settings.subband_weights) cfg.partition.apply_subband_weights(cfg.transform);
  return cfg;
}

SolveResult solve(const ForwardOperator& op, const Snapshot& snapshot, const SolverConfig& config) {
  GapSolver solver(op, snapshot, config);
  solver.run();
  return {solver.state().f, solver.state()};
}

}  // namespace cacti
