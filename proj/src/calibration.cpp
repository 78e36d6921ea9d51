#include "cacti/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <string>

namespace cacti {

Cube blur_rows(const Cube& plane, double sigma) {
  if (sigma <= 0.0) return plane;
  const auto radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (long a = -radius; a <= radius; ++a) {
    const double v = std::exp(-0.5 * static_cast<double>(a * a) / (sigma * sigma));
    kernel[static_cast<std::size_t>(a + radius)] = v;
    total += v;
  }
  for (double& v : kernel) v /= total;

  Cube out(plane.rows(), plane.cols(), plane.frames());
  const auto rows = static_cast<long>(plane.rows());
  for (std::size_t k = 0; k < plane.frames(); ++k)
    for (long i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < plane.cols(); ++j) {
        double acc = 0.0;
        for (long a = -radius; a <= radius; ++a) {
          const long src = i - a;
          if (src < 0 || src >= rows) continue;
          acc += kernel[static_cast<std::size_t>(a + radius)] * plane(static_cast<std::size_t>(src), j, k);
        }
        out(static_cast<std::size_t>(i), j, k) = std::clamp(acc, 0.0, 1.0);
      }
  return out;
}

CalibrationStack simulate_calibration_stack(const Mask& mask, const MotionProfile& profile,
                                            std::size_t active_rows, std::size_t active_cols,
                                            double jitter_rms, double blur_width, std::uint64_t seed) {
  if (!(jitter_rms >= 0.0) || !(blur_width >= 0.0))
    fail(ErrorCode::invalid_argument, "jitter_rms and blur_width must be >= 0");
  if (profile.positions.empty()) fail(ErrorCode::invalid_argument, "motion profile is empty");
  if (mask.rows > active_rows || mask.cols > active_cols)
    fail(ErrorCode::infeasible_shift, "mask does not fit the calibration active area");

  CalibrationStack stack;
  stack.compression = profile.compression;
  stack.step = profile.step;
  stack.jitter_rms = jitter_rms;
  stack.blur_width = blur_width;
  stack.seed = seed;
  stack.nominal_positions = profile.positions;
  stack.planes = Cube(active_rows, active_cols, profile.frames());

  const double max_shift = static_cast<double>(active_rows - mask.rows);
  if (profile.max_shift() > max_shift) {
    std::ostringstream os;
    os << "calibration shift " << profile.max_shift() << " exceeds the " << max_shift
       << " rows of padding in the active area";
    fail(ErrorCode::infeasible_shift, os.str());
  }

  Rng rng(seed);
  for (std::size_t k = 0; k < profile.frames(); ++k) {
    const double e = jitter_rms * rng.normal();
    const double pos = std::clamp(profile.positions[k] + e, 0.0, max_shift);
    stack.jitter.push_back(e);
    stack.realized_positions.push_back(pos);
    Cube plane = blur_rows(shift_mask(mask, pos, active_rows, active_cols), blur_width);
    std::copy(plane.values().begin(), plane.values().end(), stack.planes.frame(k).begin());
  }
  return stack;
}

ForwardOperator subset_operator(const CalibrationStack& stack, const std::vector<std::size_t>& channels) {
  if (channels.empty()) fail(ErrorCode::invalid_argument, "channel selection is empty");
  for (std::size_t n = 0; n < channels.size(); ++n) {
    if (channels[n] >= stack.frames()) {
      std::ostringstream os;
      os << "channel " << channels[n] << " out of range for a " << stack.frames() << "-plane stack";
      fail(ErrorCode::invalid_argument, os.str());
    }
    if (n > 0 && channels[n] <= channels[n - 1])
      fail(ErrorCode::invalid_argument, "channel indices must be strictly increasing");
  }
  return ForwardOperator(stack.planes.frames_slice(channels));
}

std::vector<std::size_t> critical_channels(const CalibrationStack& stack) {
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / stack.step)));
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < stack.frames(); k += stride) out.push_back(k);
  return out;
}

std::vector<std::size_t> interior_channels(std::size_t frames, std::size_t drop) {
  if (2 * drop >= frames) fail(ErrorCode::invalid_argument, "dropping every channel leaves nothing");
  std::vector<std::size_t> out;
  for (std::size_t k = drop; k < frames - drop; ++k) out.push_back(k);
  return out;
}

namespace {

std::size_t parse_index(std::string_view text) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    fail(ErrorCode::invalid_argument, "bad channel index '" + std::string(text) + "'");
  return v;
}

}  // namespace

std::vector<std::size_t> parse_channel_selection(const std::string& text, const CalibrationStack& stack) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "all") {
      for (std::size_t k = 0; k < stack.frames(); ++k) out.push_back(k);
    } else if (item == "critical") {
      auto c = critical_channels(stack);
      out.insert(out.end(), c.begin(), c.end());
    } else if (item.rfind("interior:", 0) == 0) {
      auto c = interior_channels(stack.frames(), parse_index(std::string_view(item).substr(9)));
      out.insert(out.end(), c.begin(), c.end());
    } else if (item.rfind("every:", 0) == 0) {
      const std::size_t stride = parse_index(std::string_view(item).substr(6));
      if (stride == 0) fail(ErrorCode::invalid_argument, "every:N needs N >= 1");
      for (std::size_t k = 0; k < stack.frames(); k += stride) out.push_back(k);
    } else if (auto dash = item.find('-'); dash != std::string::npos) {
      const std::size_t a = parse_index(std::string_view(item).substr(0, dash));
      const std::size_t b = parse_index(std::string_view(item).substr(dash + 1));
      if (b < a) fail(ErrorCode::invalid_argument, "channel range '" + item + "' is reversed");
      for (std::size_t k = a; k <= b; ++k) out.push_back(k);
    } else {
      out.push_back(parse_index(item));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) fail(ErrorCode::invalid_argument, "channel selection '" + text + "' is empty");
  if (out.back() >= stack.frames())
    fail(ErrorCode::invalid_argument, "channel " + std::to_string(out.back()) + " is out of range");
  return out;
}

}  // namespace cacti
