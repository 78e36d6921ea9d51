#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cacti/core.hpp"
#include "cacti/forward_model.hpp"

namespace cacti {

/// Images of the stationary mask at each calibration position s_k.
struct CalibrationStack {
  Cube planes;
  double compression = 0.0;
  double step = 0.0;
  double jitter_rms = 0.0;
  double blur_width = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> nominal_positions;
  /// Positions actually imaged: nominal + jitter, clamped to the feasible range.
  std::vector<double> realized_positions;
  /// Drawn jitter offsets before clamping.
  std::vector<double> jitter;

  std::size_t frames() const noexcept { return planes.frames(); }
};

/// Plane k images the mask at s_k + e_k, e_k ~ N(0, jitter_rms^2), followed by
/// an optional Gaussian blur of standard deviation `blur_width` pixels along
/// the row (motion) axis. Jittered positions are clamped to
/// [0, active_rows - mask.rows]. Values stay within [0, 1].
CalibrationStack simulate_calibration_stack(const Mask& mask, const MotionProfile& profile,
                                            std::size_t active_rows, std::size_t active_cols,
                                            double jitter_rms, double blur_width, std::uint64_t seed);

/// Operator built from the selected calibration planes; indices must be
/// strictly increasing and in range.
ForwardOperator subset_operator(const CalibrationStack& stack, const std::vector<std::size_t>& channels);

/// Every round(1/d)-th channel starting at 0: the critically encoded subset.
std::vector<std::size_t> critical_channels(const CalibrationStack& stack);

/// All channels except `drop` at each end.
std::vector<std::size_t> interior_channels(std::size_t frames, std::size_t drop);

/// Parses "all", "critical", "interior:N", "every:N", "A-B" ranges and
/// comma-separated lists of these. Returns sorted, de-duplicated, in-range indices.
std::vector<std::size_t> parse_channel_selection(const std::string& text, const CalibrationStack& stack);

/// 1D Gaussian blur along rows with zero (opaque) boundaries; no-op for sigma <= 0.
Cube blur_rows(const Cube& plane, double sigma);

}  // namespace cacti
