#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cacti/core.hpp"
#include "cacti/forward_model.hpp"

namespace cacti {

inline constexpr std::size_t kCcv1HeaderBytes = 16;
/// Largest element count accepted in a header (4 GiB of payload).
inline constexpr std::uint64_t kCcv1MaxElements = std::uint64_t{1} << 30;

/// "CCV1", rows, cols, frames as u32 LE, then rows*cols*frames f32 LE,
/// frame-major and row-major within a frame. Values are narrowed to float.
std::vector<std::uint8_t> encode_ccv1(const Cube& cube);
/// Throws Error with a format_* code; messages name the byte offset.
Cube decode_ccv1(std::span<const std::uint8_t> bytes);

void write_ccv1(const std::filesystem::path& path, const Cube& cube);
Cube read_ccv1(const std::filesystem::path& path);
/// Reads a single-frame 0/1 file.
Mask read_mask(const std::filesystem::path& path);

/// Flat `section.key = value` text; '#' starts a comment.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  /// Copies every key of `other`, replacing existing values.
  void merge(const RunConfig& other);

  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;

  std::string to_string() const;
  void save(const std::filesystem::path& path) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Shortest text that parses back to the same double.
std::string format_double(double value);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Binary 8-bit PGM (P5) of one frame, linearly mapping [lo, hi] to [0, 255].
void write_pgm(const std::filesystem::path& path, const Cube& cube, std::size_t frame, double lo = 0.0,
               double hi = 1.0);
/// One PGM per frame named <prefix>_NNN.pgm; returns the written paths.
std::vector<std::filesystem::path> dump_pgm_frames(const std::filesystem::path& dir, const std::string& prefix,
                                                   const Cube& cube, double lo = 0.0, double hi = 1.0);

}  // namespace cacti
