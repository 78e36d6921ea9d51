#include "cacti/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cacti {

namespace {

double overlap(double lo, double hi, double cell) {
  return std::max(0.0, std::min(hi, cell + 1.0) - std::max(lo, cell));
}

// Box-filtered coverage of the axis-aligned square [top, top+side) x [left, left+side).
void draw_square(Cube& cube, std::size_t k, double top, double left, double side, double value) {
  const auto r0 = static_cast<long>(std::floor(std::max(0.0, top)));
  const auto c0 = static_cast<long>(std::floor(std::max(0.0, left)));
  const auto r1 = std::min(static_cast<long>(cube.rows()), static_cast<long>(std::ceil(top + side)));
  const auto c1 = std::min(static_cast<long>(cube.cols()), static_cast<long>(std::ceil(left + side)));
  for (long i = r0; i < r1; ++i) {
    const double ov_r = overlap(top, top + side, static_cast<double>(i));
    if (ov_r <= 0.0) continue;
    for (long j = c0; j < c1; ++j) {
      const double ov = ov_r * overlap(left, left + side, static_cast<double>(j));
      auto& v = cube(static_cast<std::size_t>(i), static_cast<std::size_t>(j), k);
      v = v * (1.0 - ov) + value * ov;
    }
  }
}

bool inside(double lo_r, double lo_c, double hi_r, double hi_c, const SceneSpec& s) {
  return lo_r >= 0.0 && lo_c >= 0.0 && hi_r <= static_cast<double>(s.rows) && hi_c <= static_cast<double>(s.cols);
}

void add_texture(Cube& cube, const SceneSpec& spec) {
  if (spec.texture <= 0.0) return;
  // Sum of a few seeded low-frequency cosines, identical in every frame.
  Rng rng(derive_seed(spec.seed, 0x7e47));
  constexpr int kTerms = 6;
  double fr[kTerms], fc[kTerms], ph[kTerms];
  for (int t = 0; t < kTerms; ++t) {
    fr[t] = 1.0 + 3.0 * rng.uniform();
    fc[t] = 1.0 + 3.0 * rng.uniform();
    ph[t] = 2.0 * std::numbers::pi * rng.uniform();
  }
  for (std::size_t i = 0; i < cube.rows(); ++i)
    for (std::size_t j = 0; j < cube.cols(); ++j) {
      double v = 0.0;
      for (int t = 0; t < kTerms; ++t)
        v += std::cos(2.0 * std::numbers::pi * (fr[t] * i / cube.rows() + fc[t] * j / cube.cols()) + ph[t]);
      v = 0.5 + 0.5 * v / kTerms;
      for (std::size_t k = 0; k < cube.frames(); ++k) cube(i, j, k) += spec.texture * v;
    }
}

GeneratedScene moving_square(const SceneSpec& s) {
  GeneratedScene out{Cube(s.rows, s.cols, s.frames, s.background), {}};
  const double side = s.size > 0 ? s.size : std::max(1.0, std::floor(std::min(s.rows, s.cols) / 4.0));
  const double travel_r = s.velocity_row * static_cast<double>(s.frames - 1);
  const double travel_c = s.velocity_col * static_cast<double>(s.frames - 1);
  const double top = s.start_row >= 0 ? s.start_row
                                       : std::floor((static_cast<double>(s.rows) - side - travel_r) / 2.0);
  const double left = s.start_col >= 0 ? s.start_col
                                        : std::floor((static_cast<double>(s.cols) - side - travel_c) / 2.0);
  add_texture(out.cube, s);
  bool clipped = false;
  for (std::size_t k = 0; k < s.frames; ++k) {
    const double r = top + s.velocity_row * static_cast<double>(k);
    const double c = left + s.velocity_col * static_cast<double>(k);
    if (!inside(r, c, r + side, c + side, s)) clipped = true;
    draw_square(out.cube, k, r, c, side, s.intensity);
  }
  if (clipped) out.warnings.push_back("moving_square leaves the frame and was clipped");
  return out;
}

GeneratedScene rotating_spokes(const SceneSpec& s) {
  GeneratedScene out{Cube(s.rows, s.cols, s.frames, s.background), {}};
  const double radius = s.size > 0 ? s.size : 0.4 * static_cast<double>(std::min(s.rows, s.cols));
  const double cy = static_cast<double>(s.rows) / 2.0;
  const double cx = static_cast<double>(s.cols) / 2.0;
  if (radius > std::min(cy, cx)) out.warnings.push_back("rotating_spokes wheel exceeds the frame and was clipped");
  const std::size_t spokes = std::max<std::size_t>(1, s.spokes);

  Cube first(s.rows, s.cols, 1, s.background);
  for (std::size_t i = 0; i < s.rows; ++i)
    for (std::size_t j = 0; j < s.cols; ++j) {
      const double y = static_cast<double>(i) + 0.5 - cy;
      const double x = static_cast<double>(j) + 0.5 - cx;
      const double r = std::hypot(x, y);
      if (r > radius) continue;
      double phase = std::atan2(y, x) * static_cast<double>(spokes) / (2.0 * std::numbers::pi);
      phase -= std::floor(phase);
      if (phase < 0.5 || r < 0.15 * radius) first(i, j) = s.intensity;
    }
  for (std::size_t k = 0; k < s.frames; ++k) {
    const Cube rotated = rotate_nearest(first, s.angular_step * static_cast<double>(k), s.background);
    std::copy(rotated.values().begin(), rotated.values().end(), out.cube.frame(k).begin());
  }
  add_texture(out.cube, s);
  return out;
}

GeneratedScene two_blobs(const SceneSpec& s) {
  GeneratedScene out{Cube(s.rows, s.cols, s.frames, s.background), {}};
  add_texture(out.cube, s);
  const double sigma = s.size > 0 ? s.size : std::max(1.0, std::min(s.rows, s.cols) / 12.0);
  const double travel_c = s.velocity_col * static_cast<double>(s.frames - 1);
  const double r1 = s.start_row >= 0 ? s.start_row : static_cast<double>(s.rows) / 3.0;
  const double r2 = static_cast<double>(s.rows) - r1;
  const double c1 = s.start_col >= 0 ? s.start_col : (static_cast<double>(s.cols) - travel_c) / 2.0;
  const double c2 = static_cast<double>(s.cols) - c1;
  bool clipped = false;
  for (std::size_t k = 0; k < s.frames; ++k) {
    const double dk = static_cast<double>(k);
    const double centers[2][2] = {{r1 + s.velocity_row * dk, c1 + s.velocity_col * dk},
                                  {r2 - s.velocity_row * dk, c2 - s.velocity_col * dk}};
    for (const auto& c : centers) {
      if (!inside(c[0] - 2 * sigma, c[1] - 2 * sigma, c[0] + 2 * sigma, c[1] + 2 * sigma, s)) clipped = true;
      for (std::size_t i = 0; i < s.rows; ++i)
        for (std::size_t j = 0; j < s.cols; ++j) {
          const double dy = static_cast<double>(i) + 0.5 - c[0];
          const double dx = static_cast<double>(j) + 0.5 - c[1];
          out.cube(i, j, k) += s.intensity * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        }
    }
  }
  if (clipped) out.warnings.push_back("two_blobs leave the frame and were clipped");
  return out;
}

GeneratedScene static_target(const SceneSpec& s) {
  GeneratedScene out{Cube(s.rows, s.cols, s.frames, s.background), {}};
  add_texture(out.cube, s);
  // Quadrants of bars: vertical bars (top) and horizontal bars (bottom) whose
  // period halves from left to right.
  const std::size_t half_r = s.rows / 2;
  for (std::size_t i = 0; i < s.rows; ++i)
    for (std::size_t j = 0; j < s.cols; ++j) {
      const std::size_t band = std::min<std::size_t>(3, 4 * j / s.cols);
      const std::size_t period = std::size_t{16} >> band;
      const std::size_t coord = i < half_r ? j : i;
      if ((coord % period) < period / 2 || period < 2) {
        for (std::size_t k = 0; k < s.frames; ++k) out.cube(i, j, k) = s.intensity;
      }
    }
  return out;
}

}  // namespace

const char* to_string(SceneKind kind) noexcept {
  switch (kind) {
    case SceneKind::moving_square: return "moving_square";
    case SceneKind::rotating_spokes: return "rotating_spokes";
    case SceneKind::two_blobs: return "two_blobs";
    case SceneKind::static_target: return "static_target";
  }
  return "unknown";
}

SceneKind parse_scene_kind(std::string_view name) {
  if (name == "moving_square") return SceneKind::moving_square;
  if (name == "rotating_spokes") return SceneKind::rotating_spokes;
  if (name == "two_blobs") return SceneKind::two_blobs;
  if (name == "static_target") return SceneKind::static_target;
  fail(ErrorCode::invalid_argument, "unknown scene kind '" + std::string(name) + "'");
}

Cube rotate_nearest(const Cube& frame, double angle, double fill) {
  Cube out(frame.rows(), frame.cols(), 1, fill);
  const double cy = static_cast<double>(frame.rows()) / 2.0;
  const double cx = static_cast<double>(frame.cols()) / 2.0;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (std::size_t i = 0; i < frame.rows(); ++i)
    for (std::size_t j = 0; j < frame.cols(); ++j) {
      const double y = static_cast<double>(i) + 0.5 - cy;
      const double x = static_cast<double>(j) + 0.5 - cx;
      // Inverse rotation gives the source location of the output sample.
      const double sx = c * x + s * y + cx;
      const double sy = -s * x + c * y + cy;
      const double si = std::floor(sy);
      const double sj = std::floor(sx);
      if (si < 0 || sj < 0 || si >= static_cast<double>(frame.rows()) || sj >= static_cast<double>(frame.cols()))
        continue;
      out(i, j) = frame(static_cast<std::size_t>(si), static_cast<std::size_t>(sj));
    }
  return out;
}

GeneratedScene generate_scene(const SceneSpec& spec) {
  if (spec.rows == 0 || spec.cols == 0 || spec.frames == 0)
    fail(ErrorCode::invalid_argument, "scene dimensions must be >= 1");
  if (!std::isfinite(spec.velocity_row) || !std::isfinite(spec.velocity_col) || !std::isfinite(spec.angular_step))
    fail(ErrorCode::invalid_argument, "scene velocities must be finite");
  if (spec.intensity < 0.0 || spec.background < 0.0 || spec.texture < 0.0)
    fail(ErrorCode::invalid_argument, "scene intensities must be >= 0");

  GeneratedScene out;
  switch (spec.kind) {
    case SceneKind::moving_square: out = moving_square(spec); break;
    case SceneKind::rotating_spokes: out = rotating_spokes(spec); break;
    case SceneKind::two_blobs: out = two_blobs(spec); break;
    case SceneKind::static_target: out = static_target(spec); break;
  }
  for (double& v : out.cube.values()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

}  // namespace cacti
