#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "cacti/core.hpp"

namespace cacti {

enum class AxisKind { dct, haar, identity };

const char* to_string(AxisKind kind) noexcept;
AxisKind parse_axis_kind(std::string_view name);

/// Orthonormal n x n analysis matrix: DCT-II with orthonormal scaling
/// (row 0 scaled by 1/sqrt(n), others by sqrt(2/n)), full-depth Haar
/// (n must be a power of two), or the identity.
Eigen::MatrixXd build_axis_transform(AxisKind kind, std::size_t n);

/// Dyadic scale index of coefficient `index` along an axis: 0 for the
/// coarsest coefficient, floor(log2(index)) + 1 otherwise. Identity axes
/// have no scale structure and always report 0.
std::size_t axis_level(AxisKind kind, std::size_t index) noexcept;

enum class Axis { rows = 0, cols = 1, frames = 2 };

/// Separable transform Q = Q1 (rows) x Q2 (cols) x Q3 (frames).
class TransformSpec {
 public:
  TransformSpec() = default;
  TransformSpec(std::array<AxisKind, 3> kinds, std::size_t rows, std::size_t cols, std::size_t frames);

  /// dct x dct x dct
  static TransformSpec moving(std::size_t rows, std::size_t cols, std::size_t frames);
  /// haar x haar x dct
  static TransformSpec mostly_static(std::size_t rows, std::size_t cols, std::size_t frames);

  const std::array<AxisKind, 3>& kinds() const noexcept { return kinds_; }
  const Eigen::MatrixXd& factor(Axis axis) const noexcept { return factors_[static_cast<int>(axis)]; }
  std::size_t rows() const noexcept { return static_cast<std::size_t>(factors_[0].rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(factors_[1].rows()); }
  std::size_t frames() const noexcept { return static_cast<std::size_t>(factors_[2].rows()); }

  std::string describe() const;

 private:
  std::array<AxisKind, 3> kinds_{AxisKind::identity, AxisKind::identity, AxisKind::identity};
  std::array<Eigen::MatrixXd, 3> factors_;
};

/// w = Q(f).
Cube apply(const TransformSpec& spec, const Cube& cube);
/// f = Q^T(w).
Cube apply_inverse(const TransformSpec& spec, const Cube& coefficients);

/// Applies a single factor (or its transpose) along one axis.
Cube apply_axis(const TransformSpec& spec, const Cube& cube, Axis axis, bool inverse = false);

}  // namespace cacti
