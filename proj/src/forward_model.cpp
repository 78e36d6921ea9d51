#include "cacti/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cacti {

namespace {

// Shifts produced as k * d are snapped to the nearest integer when they are
// within this distance, so 13.000000000002 does not spill into a 14th row.
constexpr double kShiftSnap = 1e-9;

void check_fill(double fill) {
  if (!(fill > 0.0 && fill < 1.0)) {
    std::ostringstream os;
    os << "mask fill must lie in (0, 1), got " << fill;
    fail(ErrorCode::invalid_argument, os.str());
  }
}

}  // namespace

std::size_t Mask::ones() const noexcept {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

Cube Mask::to_cube() const {
  Cube out(rows, cols, 1);
  for (std::size_t n = 0; n < bits.size(); ++n) out.values()[n] = bits[n];
  return out;
}

Mask Mask::from_cube(const Cube& cube) {
  if (cube.frames() != 1) fail(ErrorCode::dimension_mismatch, "mask must have a single frame");
  Mask m;
  m.rows = cube.rows();
  m.cols = cube.cols();
  m.bits.resize(cube.size());
  for (std::size_t n = 0; n < cube.size(); ++n) {
    const double v = cube.values()[n];
    if (v != 0.0 && v != 1.0) fail(ErrorCode::invalid_argument, "mask entries must be 0 or 1");
    m.bits[n] = static_cast<std::uint8_t>(v);
  }
  m.fill = static_cast<double>(m.ones()) / static_cast<double>(m.bits.size());
  return m;
}

Mask generate_mask(std::size_t rows, std::size_t cols, double fill, std::uint64_t seed,
                   std::size_t upsample) {
  if (rows == 0 || cols == 0) fail(ErrorCode::invalid_argument, "mask dimensions must be >= 1");
  if (upsample == 0) fail(ErrorCode::invalid_argument, "mask upsample factor must be >= 1");
  check_fill(fill);

  const std::size_t elem_rows = (rows + upsample - 1) / upsample;
  const std::size_t elem_cols = (cols + upsample - 1) / upsample;
  Rng rng(seed);
  std::vector<std::uint8_t> elements(elem_rows * elem_cols);
  for (auto& e : elements) e = rng.bernoulli(fill) ? 1 : 0;

  Mask m;
  m.rows = rows;
  m.cols = cols;
  m.fill = fill;
  m.seed = seed;
  m.bits.resize(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m.bits[i * cols + j] = elements[(i / upsample) * elem_cols + j / upsample];
  return m;
}

MotionProfile triangle_positions(double compression, double step) {
  if (!(compression > 0.0) || !std::isfinite(compression))
    fail(ErrorCode::invalid_argument, "compression ratio C must be > 0");
  if (!(step > 0.0 && step <= compression))
    fail(ErrorCode::invalid_argument, "channel step d must satisfy 0 < d <= C");
  const double ratio = compression / step;
  const double frames = std::round(ratio);
  if (std::abs(ratio - frames) > 1e-6 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "C / d = " << ratio << " is not an integer channel count";
    fail(ErrorCode::invalid_argument, os.str());
  }
  MotionProfile p;
  p.compression = compression;
  p.step = step;
  p.positions.resize(static_cast<std::size_t>(frames));
  for (std::size_t k = 0; k < p.positions.size(); ++k) p.positions[k] = static_cast<double>(k) * step;
  return p;
}

Cube shift_mask(const Mask& mask, double shift, std::size_t active_rows, std::size_t active_cols) {
  if (!(shift >= 0.0) || !std::isfinite(shift)) fail(ErrorCode::infeasible_shift, "mask shift must be >= 0");
  const double nearest = std::round(shift);
  if (std::abs(shift - nearest) < kShiftSnap) shift = nearest;
  const auto whole = static_cast<std::size_t>(std::floor(shift));
  const double frac = shift - static_cast<double>(whole);
  const std::size_t extent = mask.rows + whole + (frac > 0.0 ? 1 : 0);
  if (mask.cols > active_cols || extent > active_rows) {
    std::ostringstream os;
    os << "mask " << mask.rows << "x" << mask.cols << " shifted by " << shift
       << " does not fit active area " << active_rows << "x" << active_cols;
    fail(ErrorCode::infeasible_shift, os.str());
  }

  Cube plane(active_rows, active_cols, 1);
  for (std::size_t i = 0; i < mask.rows; ++i) {
    for (std::size_t j = 0; j < mask.cols; ++j) {
      const double v = mask.at(i, j);
      if (v == 0.0) continue;
      plane(i + whole, j) += (1.0 - frac) * v;
      if (frac > 0.0) plane(i + whole + 1, j) += frac * v;
    }
  }
  return plane;
}

ForwardOperator::ForwardOperator(Cube planes) : planes_(std::move(planes)) {
  if (planes_.empty()) fail(ErrorCode::invalid_argument, "operator needs at least one plane");
  for (double v : planes_.values()) {
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::invalid_argument, "operator plane values must lie in [0, 1]");
  }
  normalizer_ = Cube(planes_.rows(), planes_.cols(), 1);
  auto& norm = normalizer_.values();
  for (std::size_t k = 0; k < planes_.frames(); ++k) {
    auto plane = planes_.frame(k);
    for (std::size_t p = 0; p < plane.size(); ++p) norm[p] += plane[p] * plane[p];
  }
  zero_code_pixels_ = static_cast<std::size_t>(std::count(norm.begin(), norm.end(), 0.0));
}

ForwardOperator build_operator(const Mask& mask, const MotionProfile& profile,
                               std::size_t active_rows, std::size_t active_cols) {
  if (profile.positions.empty()) fail(ErrorCode::invalid_argument, "motion profile is empty");
  Cube planes(active_rows, active_cols, profile.frames());
  for (std::size_t k = 0; k < profile.frames(); ++k) {
    const Cube plane = shift_mask(mask, profile.positions[k], active_rows, active_cols);
    std::copy(plane.values().begin(), plane.values().end(), planes.frame(k).begin());
  }
  return ForwardOperator(std::move(planes));
}

ForwardOperator build_rerandomized_operator(std::size_t rows, std::size_t cols, std::size_t frames,
                                            double fill, std::uint64_t seed) {
  if (rows == 0 || cols == 0 || frames == 0)
    fail(ErrorCode::invalid_argument, "operator dimensions must be >= 1");
  check_fill(fill);
  Rng rng(seed);
  Cube planes(rows, cols, frames);
  for (double& v : planes.values()) v = rng.bernoulli(fill) ? 1.0 : 0.0;
  return ForwardOperator(std::move(planes));
}

Snapshot forward(const ForwardOperator& op, const Cube& cube, const NoiseModel& noise) {
  require_same_shape(op.planes(), cube, "forward");
  Snapshot g(op.rows(), op.cols(), 1);
  auto out = g.frame(0);
  for (std::size_t k = 0; k < op.frames(); ++k) {
    auto t = op.planes().frame(k);
    auto f = cube.frame(k);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += t[p] * f[p];
  }
  if (noise.kind == NoiseModel::Kind::gaussian) {
    if (!(noise.sigma >= 0.0)) fail(ErrorCode::invalid_argument, "noise sigma must be >= 0");
    Rng rng(noise.seed);
    for (double& v : out) v += noise.sigma * rng.normal();
  }
  return g;
}

Cube adjoint(const ForwardOperator& op, const Snapshot& snapshot) {
  if (snapshot.rows() != op.rows() || snapshot.cols() != op.cols() || snapshot.frames() != 1)
    fail(ErrorCode::dimension_mismatch, "adjoint: snapshot does not match operator active area");
  Cube out(op.rows(), op.cols(), op.frames());
  auto g = snapshot.frame(0);
  for (std::size_t k = 0; k < op.frames(); ++k) {
    auto t = op.planes().frame(k);
    auto dst = out.frame(k);
    for (std::size_t p = 0; p < g.size(); ++p) dst[p] = t[p] * g[p];
  }
  return out;
}

SparseMatrix explicit_matrix(const ForwardOperator& op, std::size_t cap) {
  const std::size_t n = op.pixels();
  const std::size_t columns = n * op.frames();
  if (columns > cap) {
    std::ostringstream os;
    os << "explicit matrix with " << columns << " columns exceeds cap " << cap;
    fail(ErrorCode::cap_exceeded, os.str());
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(columns);
  for (std::size_t k = 0; k < op.frames(); ++k) {
    auto t = op.planes().frame(k);
    for (std::size_t p = 0; p < n; ++p) {
      if (t[p] != 0.0)
        entries.emplace_back(static_cast<int>(p), static_cast<int>(k * n + p), t[p]);
    }
  }
  SparseMatrix h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns));
  h.setFromTriplets(entries.begin(), entries.end());
  return h;
}

Eigen::VectorXd rasterize(const Cube& cube) {
  return Eigen::Map<const Eigen::VectorXd>(cube.data(), static_cast<Eigen::Index>(cube.size()));
}

}  // namespace cacti
