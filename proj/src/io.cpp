#include "cacti/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace cacti {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out[at + b] = static_cast<std::uint8_t>(v >> (8 * b));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes[at + b]) << (8 * b);
  return v;
}

std::string offset_msg(std::size_t offset, const std::string& what) {
  std::ostringstream os;
  os << "CCV1 byte " << offset << ": " << what;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::uint8_t> encode_ccv1(const Cube& cube) {
  constexpr double kMax = std::numeric_limits<std::uint32_t>::max();
  if (cube.rows() > kMax || cube.cols() > kMax || cube.frames() > kMax)
    fail(ErrorCode::format_dim_overflow, "dimension does not fit in u32");
  if (cube.size() > kCcv1MaxElements) fail(ErrorCode::format_dim_overflow, "cube too large for CCV1");
  std::vector<std::uint8_t> out(kCcv1HeaderBytes + 4 * cube.size());
  std::memcpy(out.data(), "CCV1", 4);
  put_u32(out, 4, static_cast<std::uint32_t>(cube.rows()));
  put_u32(out, 8, static_cast<std::uint32_t>(cube.cols()));
  put_u32(out, 12, static_cast<std::uint32_t>(cube.frames()));
  for (std::size_t i = 0; i < cube.size(); ++i) {
    const auto f = static_cast<float>(cube.values()[i]);
    if (!std::isfinite(f)) fail(ErrorCode::invalid_argument, "CCV1 values must be finite as float32");
    put_u32(out, kCcv1HeaderBytes + 4 * i, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

Cube decode_ccv1(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "CCV1", 4) != 0)
    fail(ErrorCode::format_bad_magic, offset_msg(0, "bad magic, expected \"CCV1\""));
  if (bytes.size() < kCcv1HeaderBytes)
    fail(ErrorCode::format_truncated,
         offset_msg(bytes.size(), "header ends early, need " + std::to_string(kCcv1HeaderBytes) + " bytes"));
  const std::uint64_t rows = get_u32(bytes, 4);
  const std::uint64_t cols = get_u32(bytes, 8);
  const std::uint64_t frames = get_u32(bytes, 12);
  const std::size_t dim_offsets[3] = {4, 8, 12};
  const std::uint64_t dims[3] = {rows, cols, frames};
  for (int i = 0; i < 3; ++i)
    if (dims[i] == 0) fail(ErrorCode::format_dim_overflow, offset_msg(dim_offsets[i], "zero dimension"));
  // Short-circuit keeps the triple product from overflowing.
  if (rows * cols > kCcv1MaxElements || rows * cols * frames > kCcv1MaxElements)
    fail(ErrorCode::format_dim_overflow,
         offset_msg(4, "element count exceeds " + std::to_string(kCcv1MaxElements)));
  const std::uint64_t count = rows * cols * frames;
  const std::uint64_t expected = kCcv1HeaderBytes + 4 * count;
  if (bytes.size() < expected) {
    std::ostringstream os;
    os << "payload truncated, header promises " << count << " floats (" << expected << " bytes) but file has "
       << bytes.size() << " bytes";
    fail(ErrorCode::format_truncated, offset_msg(bytes.size(), os.str()));
  }
  if (bytes.size() > expected) {
    std::ostringstream os;
    os << bytes.size() - expected << " trailing bytes after payload";
    fail(ErrorCode::format_trailing_data, offset_msg(expected, os.str()));
  }
  Cube cube(rows, cols, frames);
  auto& values = cube.values();
  for (std::size_t i = 0; i < count; ++i)
    values[i] = std::bit_cast<float>(get_u32(bytes, kCcv1HeaderBytes + 4 * i));
  return cube;
}

void write_ccv1(const std::filesystem::path& path, const Cube& cube) {
  const auto bytes = encode_ccv1(cube);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::io, "write failed: " + path.string());
}

Cube read_ccv1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_ccv1(bytes);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

Mask read_mask(const std::filesystem::path& path) {
  const Cube cube = read_ccv1(path);
  if (cube.frames() != 1) fail(ErrorCode::dimension_mismatch, path.string() + ": mask must have one frame");
  return Mask::from_cube(cube);
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::config, "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(ErrorCode::config, "config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) != 0; }
void RunConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }
void RunConfig::set(const std::string& key, double value) { values_[key] = format_double(value); }

void RunConfig::merge(const RunConfig& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::string RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCode::config, "missing required setting " + key);
  return it->second;
}

std::string RunConfig::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string s = get(key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    fail(ErrorCode::config, "setting " + key + " = '" + s + "' is not a finite number");
  return v;
}

double RunConfig::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string s = get(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    fail(ErrorCode::config, "setting " + key + " = '" + s + "' is not a non-negative integer");
  return v;
}

std::uint64_t RunConfig::get_u64_or(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? get_u64(key) : fallback;
}

bool RunConfig::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string s = get(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  fail(ErrorCode::config, "setting " + key + " = '" + s + "' is not a boolean");
}

std::string RunConfig::to_string() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
  return os.str();
}

void RunConfig::save(const std::filesystem::path& path) const { write_text(path, to_string()); }

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) {
    if (r.size() != header.size()) fail(ErrorCode::invalid_argument, "CSV row width differs from header");
    line(r);
  }
  write_text(path, os.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) fail(ErrorCode::io, "write failed: " + path.string());
}

void write_pgm(const std::filesystem::path& path, const Cube& cube, std::size_t frame, double lo, double hi) {
  if (frame >= cube.frames()) fail(ErrorCode::invalid_argument, "PGM frame index out of range");
  if (!(hi > lo)) fail(ErrorCode::invalid_argument, "PGM range must satisfy hi > lo");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot open " + path.string() + " for writing");
  out << "P5\n" << cube.cols() << ' ' << cube.rows() << "\n255\n";
  std::vector<char> pixels;
  pixels.reserve(cube.rows() * cube.cols());
  for (double v : cube.frame(frame)) {
    const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    pixels.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(t * 255.0))));
  }
  out.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
  if (!out) fail(ErrorCode::io, "write failed: " + path.string());
}

std::vector<std::filesystem::path> dump_pgm_frames(const std::filesystem::path& dir, const std::string& prefix,
                                                   const Cube& cube, double lo, double hi) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> paths;
  for (std::size_t k = 0; k < cube.frames(); ++k) {
    std::ostringstream name;
    name << prefix << '_' << std::setw(3) << std::setfill('0') << k << ".pgm";
    paths.push_back(dir / name.str());
    write_pgm(paths.back(), cube, k, lo, hi);
  }
  return paths;
}

}  // namespace cacti
