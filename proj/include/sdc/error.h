#ifndef SDC_ERROR_H_
#define SDC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdc {

// Error kinds surfaced by the toolkit. Each names the first offending
// location in its message.
enum class ErrorCode {
  kInvalidArgument,
  kMalformedCsv,
  kMissingColumn,
  kDomainViolation,
  kInvalidSchema,
  kInvalidHierarchy,
  kUnknownValue,
  kLevelOutOfRange,
  kUnknownAttribute,
  kHierarchyMissing,
  kUnsatisfiable,
  kSearchSpaceTooLarge,
  kTooFewRows,
  kMisaligned,
  kGroupTooSmall,
  kNoSharedQIs,
  kEmptyClass,
  kSupportMismatch,
  kNonNumeric,
  kInvalidT,
  kInfeasible,
  kUnboundedDomain,
  kNonPositiveEpsilon,
  kInvalidAlpha,
  kInvalidDelta,
  kInvalidRho,
  kNotNeighbors,
  kMissingPartition,
  kNotMinimalMechanism,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Infeasibility errors map to CLI exit code 2; everything else to 1.
inline bool IsInfeasibility(ErrorCode code) {
  return code == ErrorCode::kUnsatisfiable || code == ErrorCode::kInfeasible ||
         code == ErrorCode::kTooFewRows;
}

}  // namespace sdc

#endif  // SDC_ERROR_H_
