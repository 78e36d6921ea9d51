#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/SparseCore>

#include "cacti/core.hpp"

namespace cacti {

/// Binary coded-aperture transmission pattern.
struct Mask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;  // row-major, each entry 0 or 1
  double fill = 0.5;
  std::uint64_t seed = 0;

  std::uint8_t at(std::size_t i, std::size_t j) const noexcept { return bits[i * cols + j]; }
  std::size_t ones() const noexcept;
  Cube to_cube() const;
  /// Rejects any entry that is not exactly 0 or 1.
  static Mask from_cube(const Cube& cube);
};

/// Each entry is independently 1 with probability `fill`, drawn row-major from
/// Rng(seed). With `upsample` > 1 one random element covers an upsample x
/// upsample block of detector pixels (cropped at the far edges).
Mask generate_mask(std::size_t rows, std::size_t cols, double fill, std::uint64_t seed,
                   std::size_t upsample = 1);

/// Discrete mask positions over one monotone sweep of a triangle wave.
struct MotionProfile {
  double compression = 0.0;  // C, pixels traversed per integration
  double step = 0.0;         // d, pixels between adjacent temporal channels
  std::vector<double> positions;

  std::size_t frames() const noexcept { return positions.size(); }
  double max_shift() const noexcept { return positions.empty() ? 0.0 : positions.back(); }
};

/// s_k = k * d for k = 0 .. round(C / d) - 1. C / d must be an integer to
/// within a relative 1e-6.
MotionProfile triangle_positions(double compression, double step);

/// Mask embedded in a zero-padded active area and translated `shift` pixels
/// down the row axis. Fractional shifts blend the two neighbouring integer
/// shifts linearly, giving grayscale values in [0, 1].
Cube shift_mask(const Mask& mask, double shift, std::size_t active_rows, std::size_t active_cols);

/// Factored form of H = [H_1 ... H_NF], H_k = diag(T_k).
class ForwardOperator {
 public:
  ForwardOperator() = default;
  /// Planes are rows x cols x N_F with every value in [0, 1].
  explicit ForwardOperator(Cube planes);

  std::size_t rows() const noexcept { return planes_.rows(); }
  std::size_t cols() const noexcept { return planes_.cols(); }
  std::size_t frames() const noexcept { return planes_.frames(); }
  std::size_t pixels() const noexcept { return planes_.pixels(); }

  const Cube& planes() const noexcept { return planes_; }
  /// Per-pixel sum over k of T_k^2.
  const Cube& normalizer() const noexcept { return normalizer_; }
  /// Pixels whose code column is identically zero.
  std::size_t zero_code_pixels() const noexcept { return zero_code_pixels_; }

 private:
  Cube planes_;
  Cube normalizer_;
  std::size_t zero_code_pixels_ = 0;
};

ForwardOperator build_operator(const Mask& mask, const MotionProfile& profile,
                               std::size_t active_rows, std::size_t active_cols);

/// Independent random planes (no shift structure), drawn consecutively from
/// one Rng(seed) stream, so plane 0 equals generate_mask(rows, cols, fill, seed).
ForwardOperator build_rerandomized_operator(std::size_t rows, std::size_t cols, std::size_t frames,
                                            double fill, std::uint64_t seed);

struct NoiseModel {
  enum class Kind { none, gaussian };
  Kind kind = Kind::none;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  static NoiseModel gaussian(double sigma, std::uint64_t seed) { return {Kind::gaussian, sigma, seed}; }
};

/// g_ij = sum_k T_ijk f_ijk + n_ij.
Snapshot forward(const ForwardOperator& op, const Cube& cube, const NoiseModel& noise = {});

/// (H^T g)_ijk = T_ijk g_ij.
Cube adjoint(const ForwardOperator& op, const Snapshot& snapshot);

inline constexpr std::size_t kExplicitMatrixCap = 1'000'000;

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Materialized N x (N * N_F) matrix. Column index is the Cube storage index
/// k * N + pixel, so H * rasterize(f) == forward(f). Requires N * N_F <= cap.
SparseMatrix explicit_matrix(const ForwardOperator& op, std::size_t cap = kExplicitMatrixCap);

Eigen::VectorXd rasterize(const Cube& cube);

}  // namespace cacti
