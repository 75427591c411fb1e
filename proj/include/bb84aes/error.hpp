#pragma once

#include <stdexcept>
#include <string>

namespace bb84aes {

enum class ErrorCode {
  WrongLength,
  ZeroHashKey,
  BudgetExhausted,
  CounterExhausted,
  InsufficientPhotons,
  InvalidArgument,
  AmbiguousLookupTable,
  IncompleteRound,
  EmptyKey,
  DomainError,
  InsufficientKey,
  ParseError,
  RangeError,
  IOError,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers can branch on the kind (e.g. rekey on BudgetExhausted).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bb84aes
