#pragma once

#include <stdexcept>
#include <string>

namespace pvlc {

// Every failure the library can signal, one code per contract violation.
enum class Errc {
  NegativeMass,
  MassNotOne,
  EmptyAlphabet,
  DomainError,
  DegenerateJoint,
  EpsOutOfRange,
  DegenerateX,
  ZeroMassPair,
  EmptySupport,
  UnknownSymbol,
  TruncatedStream,
  IndexOutOfRange,
  ThresholdNotMet,
  BadSeparation,
  NotFunctional,
  BudgetExceeded,
  EmptyFeasibleSet,
  KeyOutOfRange,
  MalformedCodeword,
  ParseError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NegativeMass: return "NegativeMass";
    case Errc::MassNotOne: return "MassNotOne";
    case Errc::EmptyAlphabet: return "EmptyAlphabet";
    case Errc::DomainError: return "DomainError";
    case Errc::DegenerateJoint: return "DegenerateJoint";
    case Errc::EpsOutOfRange: return "EpsOutOfRange";
    case Errc::DegenerateX: return "DegenerateX";
    case Errc::ZeroMassPair: return "ZeroMassPair";
    case Errc::EmptySupport: return "EmptySupport";
    case Errc::UnknownSymbol: return "UnknownSymbol";
    case Errc::TruncatedStream: return "TruncatedStream";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::ThresholdNotMet: return "ThresholdNotMet";
    case Errc::BadSeparation: return "BadSeparation";
    case Errc::NotFunctional: return "NotFunctional";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::EmptyFeasibleSet: return "EmptyFeasibleSet";
    case Errc::KeyOutOfRange: return "KeyOutOfRange";
    case Errc::MalformedCodeword: return "MalformedCodeword";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace pvlc
