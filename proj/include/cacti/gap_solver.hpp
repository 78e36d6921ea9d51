#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cacti/core.hpp"
#include "cacti/forward_model.hpp"
#include "cacti/transforms.hpp"

namespace cacti {

/// Disjoint, exhaustive index groups over a coefficient cube, stored CSR-style:
/// group l owns indices[offsets[l] .. offsets[l + 1]).
struct GroupPartition {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t frames = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> indices;
  std::vector<double> weights;

  std::size_t group_count() const noexcept { return weights.size(); }
  std::size_t group_size(std::size_t l) const noexcept { return offsets[l + 1] - offsets[l]; }

  /// Non-overlapping block_rows x block_cols x block_frames blocks; blocks at
  /// the trailing edge of an axis may be smaller. Unit weights.
  static GroupPartition blocks(std::size_t rows, std::size_t cols, std::size_t frames,
                               std::size_t block_rows = 2, std::size_t block_cols = 2,
                               std::size_t block_frames = 2);
  /// One group per coefficient (plain l1). Unit weights.
  static GroupPartition singletons(std::size_t rows, std::size_t cols, std::size_t frames);
  /// Arbitrary groups given as index lists.
  static GroupPartition from_groups(std::size_t rows, std::size_t cols, std::size_t frames,
                                    const std::vector<std::vector<std::size_t>>& groups,
                                    std::vector<double> weights);

  /// Sets beta_l = 1 + sum of the dyadic scale levels (per axis) of the first
  /// coefficient in group l.
  void apply_subband_weights(const TransformSpec& spec);

  /// Throws unless the groups partition the cube and every weight is > 0.
  void validate() const;
};

enum class PartitionScheme { blocks, singletons };
PartitionScheme parse_partition_scheme(const std::string& name);
const char* to_string(PartitionScheme scheme) noexcept;

/// Euclidean norm of each group.
std::vector<double> group_norms(const Cube& w, const GroupPartition& partition);

/// sum_l beta_l * ||w_{G_l}||_2
double weighted_l21_norm(const Cube& w, const GroupPartition& partition);

struct RadiusSelection {
  std::size_t m_star = 0;
  double radius = 0.0;
  /// Group l_{m*+1}; empty when m* = m.
  std::optional<std::size_t> reference_group;
  /// ||w_ref|| / beta_ref, or 0 without a reference group.
  double reference_level = 0.0;
  /// Groups sorted by descending beta-normalized norm (stable in group index).
  std::vector<std::size_t> order;
  std::vector<double> norms;
};

/// Sorts groups by ||w_G|| / beta descending, picks the smallest prefix m*
/// whose union holds at least `measurement_count` indices and evaluates
/// R = sum_{q <= m*} beta_q^2 (level_q - level_ref).
RadiusSelection select_radius(const Cube& w, const GroupPartition& partition,
                              std::size_t measurement_count);

/// Group soft shrinkage: every coefficient of group l is scaled by
/// max(1 - beta_l * level / ||w_l||, 0). Zero-norm groups stay zero.
Cube shrink_groups(const Cube& w, const GroupPartition& partition, double level);

/// Ball projection for the radius chosen by select_radius on the same w.
Cube project_l21_ball(const Cube& w, const GroupPartition& partition, const RadiusSelection& selection);

struct ManifoldProjection {
  Cube f;
  /// Pixels with an all-zero code column, passed through unchanged.
  std::size_t passthrough_pixels = 0;
  /// Passthrough pixels whose measurement is nonzero, i.e. not reachable by any f.
  std::size_t infeasible_pixels = 0;
};

/// Closest f to theta with H f = g:
/// f_ijk = theta_ijk + T_ijk (g_ij - sum_k' T_ijk' theta_ijk') / sum_k' T_ijk'^2.
ManifoldProjection project_linear_manifold(const ForwardOperator& op, const Snapshot& snapshot,
                                           const Cube& theta);

struct Residual {
  double value = 0.0;
  /// True when the snapshot norm is zero and `value` is the absolute residual.
  bool absolute = false;
};

/// ||g - H f|| / ||g|| over pixels with a nonzero code column.
Residual normalized_residual(const ForwardOperator& op, const Cube& f, const Snapshot& snapshot);

struct SolverConfig {
  std::size_t max_iterations = 300;
  /// Relative change of the gap norm that counts as stalled.
  double stop_tolerance = 1e-6;
  /// Consecutive stalled iterations before stopping.
  std::size_t stall_window = 3;
  TransformSpec transform;
  GroupPartition partition;
  bool record_history = true;
  /// When set, one "t gap residual" line is written per iteration.
  std::ostream* log = nullptr;

  /// dct^3 transform and 2x2x2 blocks sized for the operator.
  static SolverConfig defaults_for(const ForwardOperator& op);
  void validate() const;
};

enum class SolveStatus { running, converged, max_iterations };
const char* to_string(SolveStatus status) noexcept;

struct SolverState {
  /// theta^(t) in coefficient space (the shrunk coefficients).
  Cube theta_coefficients;
  /// theta^(t) mapped back to voxel space.
  Cube theta;
  /// f^(t) = P_Pi(theta^(t-1)).
  Cube f;
  std::size_t iteration = 0;
  std::vector<double> gap_norm_history;
  /// Normalized data residual of theta^(t).
  std::vector<double> residual_history;
  double last_gap_norm = 0.0;
  std::size_t stalled = 0;
  std::size_t m_star = 0;
  double radius = 0.0;
  std::size_t passthrough_pixels = 0;
  std::size_t infeasible_pixels = 0;
  SolveStatus status = SolveStatus::running;
};

/// Alternating projections between {f : H f = g} and the weighted l21 ball
/// of data-driven radius. Anytime: state() is valid after every step() and
/// a solver constructed from a saved state continues where it stopped.
class GapSolver {
 public:
  GapSolver(const ForwardOperator& op, Snapshot snapshot, SolverConfig config);
  GapSolver(const ForwardOperator& op, Snapshot snapshot, SolverConfig config, SolverState resume);

  /// One full iteration. Returns false once the stop rule has fired.
  bool step();
  /// Iterates until the stop rule fires or the total count reaches max_iterations.
  SolveStatus run();

  const SolverState& state() const noexcept { return state_; }
  const SolverConfig& config() const noexcept { return config_; }

 private:
  const ForwardOperator& op_;
  Snapshot snapshot_;
  SolverConfig config_;
  SolverState state_;
};

struct SolveResult {
  /// Final f^(t): consistent with the measurement.
  Cube estimate;
  SolverState state;
};

/// Size-independent solver options; make_solver_config binds them to an operator.
struct SolverSettings {
  std::array<AxisKind, 3> transform{AxisKind::dct, AxisKind::dct, AxisKind::dct};
  PartitionScheme partition = PartitionScheme::blocks;
  bool subband_weights = false;
  std::size_t max_iterations = 300;
  double stop_tolerance = 1e-6;
};

SolverConfig make_solver_config(const ForwardOperator& op, const SolverSettings& settings);

SolveResult solve(const ForwardOperator& op, const Snapshot& snapshot, const SolverConfig& config);

}  // namespace cacti
