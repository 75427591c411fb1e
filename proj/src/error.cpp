#include "bb84aes/error.hpp"

namespace bb84aes {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::WrongLength: return "WrongLength";
    case ErrorCode::ZeroHashKey: return "ZeroHashKey";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::CounterExhausted: return "CounterExhausted";
    case ErrorCode::InsufficientPhotons: return "InsufficientPhotons";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AmbiguousLookupTable: return "AmbiguousLookupTable";
    case ErrorCode::IncompleteRound: return "IncompleteRound";
    case ErrorCode::EmptyKey: return "EmptyKey";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InsufficientKey: return "InsufficientKey";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::IOError: return "IOError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace bb84aes
