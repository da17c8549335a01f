#pragma once

#include <stdexcept>
#include <string>

namespace macroeval {

// Process exit codes. The numeric values are part of the CLI contract.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kMissingFile = 2,
  kLineMismatch = 3,
  kUnsupportedTokenizer = 4,
  kTooFewSegments = 5,
  kMalformedTable = 6,
  kBadEncoding = 7,
  kUndefined = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

}  // namespace macroeval
