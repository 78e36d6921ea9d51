#include "cacti/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace cacti {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::infeasible_shift: return "infeasible_shift";
    case ErrorCode::cap_exceeded: return "cap_exceeded";
    case ErrorCode::format_bad_magic: return "format_bad_magic";
    case ErrorCode::format_truncated: return "format_truncated";
    case ErrorCode::format_dim_overflow: return "format_dim_overflow";
    case ErrorCode::format_trailing_data: return "format_trailing_data";
    case ErrorCode::io: return "io";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

Cube::Cube(std::size_t rows, std::size_t cols, std::size_t frames, double fill)
    : rows_(rows), cols_(cols), frames_(frames) {
  if (rows == 0 || cols == 0 || frames == 0) {
    std::ostringstream os;
    os << "cube dimensions must be >= 1, got " << rows << "x" << cols << "x" << frames;
    fail(ErrorCode::invalid_argument, os.str());
  }
  data_.assign(rows * cols * frames, fill);
}

bool Cube::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Cube::max_value() const noexcept {
  if (data_.empty()) return 0.0;
  return *std::max_element(data_.begin(), data_.end());
}

Cube Cube::frames_slice(std::span<const std::size_t> indices) const {
  if (indices.empty()) fail(ErrorCode::invalid_argument, "frame selection is empty");
  Cube out(rows_, cols_, indices.size());
  for (std::size_t n = 0; n < indices.size(); ++n) {
    if (indices[n] >= frames_) fail(ErrorCode::invalid_argument, "frame index out of range");
    auto src = frame(indices[n]);
    std::copy(src.begin(), src.end(), out.frame(n).begin());
  }
  return out;
}

void require_same_shape(const Cube& a, const Cube& b, const char* context) {
  if (a.same_shape(b)) return;
  std::ostringstream os;
  os << context << ": shape " << a.rows() << "x" << a.cols() << "x" << a.frames() << " vs "
     << b.rows() << "x" << b.cols() << "x" << b.frames();
  fail(ErrorCode::dimension_mismatch, os.str());
}

double dot(const Cube& a, const Cube& b) {
  require_same_shape(a, b, "dot");
  double acc = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) acc += a.values()[n] * b.values()[n];
  return acc;
}

double norm2(const Cube& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += v * v;
  return std::sqrt(acc);
}

double max_abs_diff(const Cube& a, const Cube& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a.values()[n] - b.values()[n]));
  return m;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - uniform() lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace cacti
