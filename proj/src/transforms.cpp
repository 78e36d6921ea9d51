#include "cacti/transforms.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cacti {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

Eigen::MatrixXd dct_matrix(std::size_t n) {
  Eigen::MatrixXd q(n, n);
  const double nd = static_cast<double>(n);
  for (std::size_t u = 0; u < n; ++u) {
    const double scale = u == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
    for (std::size_t x = 0; x < n; ++x)
      q(u, x) = scale * std::cos(std::numbers::pi * (2.0 * x + 1.0) * u / (2.0 * nd));
  }
  return q;
}

// H_1 = [1]; H_2m = [H_m (x) (1, 1) ; I_m (x) (1, -1)] / sqrt(2).
Eigen::MatrixXd haar_matrix(std::size_t n) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Ones(1, 1);
  const double s = std::numbers::sqrt2 / 2.0;
  for (std::size_t m = 1; m < n; m *= 2) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        next(r, 2 * c) = s * h(r, c);
        next(r, 2 * c + 1) = s * h(r, c);
      }
      next(m + r, 2 * r) = s;
      next(m + r, 2 * r + 1) = -s;
    }
    h = std::move(next);
  }
  return h;
}

}  // namespace

const char* to_string(AxisKind kind) noexcept {
  switch (kind) {
    case AxisKind::dct: return "dct";
    case AxisKind::haar: return "haar";
    case AxisKind::identity: return "identity";
  }
  return "unknown";
}

AxisKind parse_axis_kind(std::string_view name) {
  if (name == "dct") return AxisKind::dct;
  if (name == "haar" || name == "wavelet") return AxisKind::haar;
  if (name == "identity" || name == "none") return AxisKind::identity;
  fail(ErrorCode::invalid_argument, "unknown transform kind '" + std::string(name) + "'");
}

Eigen::MatrixXd build_axis_transform(AxisKind kind, std::size_t n) {
  if (n == 0) fail(ErrorCode::invalid_argument, "transform size must be >= 1");
  switch (kind) {
    case AxisKind::dct: return dct_matrix(n);
    case AxisKind::haar:
      if (!std::has_single_bit(n)) {
        std::ostringstream os;
        os << "haar transform requires a power-of-two length, got " << n;
        fail(ErrorCode::invalid_argument, os.str());
      }
      return haar_matrix(n);
    case AxisKind::identity: return Eigen::MatrixXd::Identity(n, n);
  }
  fail(ErrorCode::invalid_argument, "unknown transform kind");
}

std::size_t axis_level(AxisKind kind, std::size_t index) noexcept {
  if (kind == AxisKind::identity || index == 0) return 0;
  return static_cast<std::size_t>(std::bit_width(index));
}

TransformSpec::TransformSpec(std::array<AxisKind, 3> kinds, std::size_t rows, std::size_t cols,
                             std::size_t frames)
    : kinds_(kinds) {
  factors_[0] = build_axis_transform(kinds[0], rows);
  factors_[1] = build_axis_transform(kinds[1], cols);
  factors_[2] = build_axis_transform(kinds[2], frames);
}

TransformSpec TransformSpec::moving(std::size_t rows, std::size_t cols, std::size_t frames) {
  return TransformSpec({AxisKind::dct, AxisKind::dct, AxisKind::dct}, rows, cols, frames);
}

TransformSpec TransformSpec::mostly_static(std::size_t rows, std::size_t cols, std::size_t frames) {
  return TransformSpec({AxisKind::haar, AxisKind::haar, AxisKind::dct}, rows, cols, frames);
}

std::string TransformSpec::describe() const {
  return std::string(to_string(kinds_[0])) + "," + to_string(kinds_[1]) + "," + to_string(kinds_[2]);
}

namespace {

void check_dims(const TransformSpec& spec, const Cube& cube, const char* context) {
  if (spec.rows() == cube.rows() && spec.cols() == cube.cols() && spec.frames() == cube.frames()) return;
  std::ostringstream os;
  os << context << ": transform sized " << spec.rows() << "x" << spec.cols() << "x" << spec.frames()
     << " applied to cube " << cube.rows() << "x" << cube.cols() << "x" << cube.frames();
  fail(ErrorCode::dimension_mismatch, os.str());
}

// Spatial pass: every frame X_k (rows x cols) becomes A X_k B^T.
Cube spatial(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Cube& cube) {
  Cube out(cube.rows(), cube.cols(), cube.frames());
  const auto r = static_cast<Eigen::Index>(cube.rows());
  const auto c = static_cast<Eigen::Index>(cube.cols());
  RowMatrix tmp(r, c);
  for (std::size_t k = 0; k < cube.frames(); ++k) {
    ConstRowMap x(cube.frame(k).data(), r, c);
    RowMap y(out.frame(k).data(), r, c);
    tmp.noalias() = a * x;
    y.noalias() = tmp * b.transpose();
  }
  return out;
}

// Temporal pass: the frames x pixels matrix F becomes Q F.
Cube temporal(const Eigen::MatrixXd& q, const Cube& cube) {
  Cube out(cube.rows(), cube.cols(), cube.frames());
  const auto nf = static_cast<Eigen::Index>(cube.frames());
  const auto np = static_cast<Eigen::Index>(cube.pixels());
  ConstRowMap x(cube.data(), nf, np);
  RowMap y(out.data(), nf, np);
  y.noalias() = q * x;
  return out;
}

}  // namespace

Cube apply(const TransformSpec& spec, const Cube& cube) {
  check_dims(spec, cube, "transform");
  Cube s = spatial(spec.factor(Axis::rows), spec.factor(Axis::cols), cube);
  return temporal(spec.factor(Axis::frames), s);
}

Cube apply_inverse(const TransformSpec& spec, const Cube& coefficients) {
  check_dims(spec, coefficients, "inverse transform");
  Cube t = temporal(spec.factor(Axis::frames).transpose(), coefficients);
  return spatial(spec.factor(Axis::rows).transpose(), spec.factor(Axis::cols).transpose(), t);
}

Cube apply_axis(const TransformSpec& spec, const Cube& cube, Axis axis, bool inverse) {
  check_dims(spec, cube, "axis transform");
  Eigen::MatrixXd q = spec.factor(axis);
  if (inverse) q.transposeInPlace();
  switch (axis) {
    case Axis::rows: return spatial(q, Eigen::MatrixXd::Identity(cube.cols(), cube.cols()), cube);
    case Axis::cols: return spatial(Eigen::MatrixXd::Identity(cube.rows(), cube.rows()), q, cube);
    case Axis::frames: return temporal(q, cube);
  }
  return cube;
}

}  // namespace cacti
