#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cacti/core.hpp"

namespace cacti {

enum class SceneKind { moving_square, rotating_spokes, two_blobs, static_target };

const char* to_string(SceneKind kind) noexcept;
SceneKind parse_scene_kind(std::string_view name);

/// Synthetic ground-truth video. Geometry is in pixels; velocities are in
/// pixels (or radians) per frame. Negative sizes/positions select defaults
/// derived from the frame size.
struct SceneSpec {
  SceneKind kind = SceneKind::moving_square;
  std::size_t rows = 64;
  std::size_t cols = 64;
  std::size_t frames = 14;
  /// Square side, blob sigma, or wheel radius.
  double size = -1.0;
  /// Top-left of the square / centre of the first blob at frame 0.
  double start_row = -1.0;
  double start_col = -1.0;
  double velocity_row = 0.0;
  double velocity_col = 1.0;
  /// Rotation per frame for rotating_spokes.
  double angular_step = 0.1;
  std::size_t spokes = 4;
  double intensity = 1.0;
  double background = 0.0;
  /// Amplitude of a seeded static background texture (0 disables it).
  double texture = 0.0;
  std::uint64_t seed = 0;
};

struct GeneratedScene {
  Cube cube;
  std::vector<std::string> warnings;
};

/// Deterministic per seed; intensities clamped to [0, 1]. Objects leaving the
/// frame are clipped and reported in `warnings`.
GeneratedScene generate_scene(const SceneSpec& spec);

/// Nearest-neighbour rotation of a single frame about its centre by `angle`
/// radians; samples falling outside the frame read as `fill`.
Cube rotate_nearest(const Cube& frame, double angle, double fill = 0.0);

}  // namespace cacti
