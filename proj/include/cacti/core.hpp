#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cacti {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  infeasible_shift,
  cap_exceeded,
  format_bad_magic,
  format_truncated,
  format_dim_overflow,
  format_trailing_data,
  io,
  config,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

/// Dense rows x cols x frames volume of doubles.
///
/// Storage is frame-major, row-major within a frame: voxel (i, j, k) lives at
/// k * rows * cols + i * cols + j. The same order is used by the CCV1 file
/// format and by the rasterization of the explicit forward matrix.
class Cube {
 public:
  Cube() = default;
  Cube(std::size_t rows, std::size_t cols, std::size_t frames, double fill = 0.0);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t frames() const noexcept { return frames_; }
  std::size_t pixels() const noexcept { return rows_ * cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j, std::size_t k = 0) noexcept {
    return data_[k * rows_ * cols_ + i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k = 0) const noexcept {
    return data_[k * rows_ * cols_ + i * cols_ + j];
  }

  std::span<double> frame(std::size_t k) noexcept { return {data_.data() + k * pixels(), pixels()}; }
  std::span<const double> frame(std::size_t k) const noexcept {
    return {data_.data() + k * pixels(), pixels()};
  }

  std::vector<double>& values() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  bool same_shape(const Cube& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_ && frames_ == other.frames_;
  }

  bool all_finite() const noexcept;
  double max_value() const noexcept;

  /// New cube holding the listed frames, in order.
  Cube frames_slice(std::span<const std::size_t> indices) const;

  friend bool operator==(const Cube&, const Cube&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t frames_ = 0;
  std::vector<double> data_;
};

/// Detector image: a Cube with a single frame.
using Snapshot = Cube;

void require_same_shape(const Cube& a, const Cube& b, const char* context);

double dot(const Cube& a, const Cube& b);
double norm2(const Cube& a);
double max_abs_diff(const Cube& a, const Cube& b);

/// Seeded generator with a pinned algorithm: std::mt19937_64 for the raw
/// stream, 53-bit uniforms from the top bits, Box-Muller for normals.
/// Standard-library distributions are implementation-defined and are not used,
/// so masks and noise are bit-reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent child seed from (seed, stream) via splitmix64.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace cacti
