#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gencomp {

/// Every failure the library reports is a gencomp::Error carrying one of
/// these kinds. The harness maps kinds onto process exit codes.
enum class ErrorKind {
  kRange,                 // query beyond a hard length
  kUndefinedInput,        // e.g. density at n = 0
  kExcludedIndex,         // index outside a coding's domain
  kMalformedGap,          // gap exponent larger than the block index
  kInsufficientData,      // census horizon smaller than the query
  kCorruptDescription,    // description contradicts itself
  kCapacity,              // universal relation id/interval not representable
  kInternalConsistency,   // a construction guarantee failed
  kInsufficientOracle,    // operator premise beyond the oracle bound
  kFalsifiedPremise,      // harness scenario violates a premise
  kBudget,                // search or run exceeded its budget
  kUndefinedRegion,       // functional queried beyond its defined horizon
  kCap,                   // marker node longer than the stage allows
  kSelector,              // path selector broke its contract
  kParse,                 // malformed config / trace
  kInvariantViolation,    // a checked invariant failed
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gencomp
