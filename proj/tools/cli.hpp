#pragma once

#include <iosfwd>

#include "cacti/core.hpp"

namespace cacti::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kConfig = 4,
  kDimensionMismatch = 5,
  kBadMagic = 6,
  kTruncated = 7,
  kDimOverflow = 8,
  kTrailingData = 9,
  kInvalidArgument = 10,
  kInfeasibleShift = 11,
  kCapExceeded = 12,
};

int exit_code_for(ErrorCode code) noexcept;

/// Entry point of the `cacti` tool; returns the process exit status.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cacti::cli
