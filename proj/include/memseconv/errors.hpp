#pragma once

#include <stdexcept>
#include <string>

namespace memseconv {

// Process exit codes used by the CLI; library exceptions map onto them.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitIoError = 3,
  kExitInternalError = 4,
};

/// Bad user input: malformed config, incompatible model/kernel, out-of-range
/// parameters.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem-level failure (open/read/write), carrying the offending path in
/// the message.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A violated internal wiring contract, e.g. a non-positive denominator
/// reaching the divider even though the conversion stage upstream is supposed
/// to make that impossible. Indicates a bug, not bad input.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace memseconv
