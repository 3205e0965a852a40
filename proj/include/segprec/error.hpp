#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace segprec {

enum class ErrorKind {
  // validation: bad arguments or configuration
  InvalidConfig,
  InvalidTarget,
  InvalidGridAxis,
  QOutOfRange,
  EmptyLabelSet,
  BackgroundInLabelSet,
  // data: problems with the supplied samples or volumes
  EmptySample,
  EmptyList,
  DegenerateSpread,
  SizeExceedsPopulation,
  TooLargeForEnumeration,
  ParseError,
  DuplicateSubject,
  InvalidSubject,
  NonFiniteValue,
  OutOfBounds,
  DimMismatch,
  UndefinedDice,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidTarget: return "InvalidTarget";
    case ErrorKind::InvalidGridAxis: return "InvalidGridAxis";
    case ErrorKind::QOutOfRange: return "QOutOfRange";
    case ErrorKind::EmptyLabelSet: return "EmptyLabelSet";
    case ErrorKind::BackgroundInLabelSet: return "BackgroundInLabelSet";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::EmptyList: return "EmptyList";
    case ErrorKind::DegenerateSpread: return "DegenerateSpread";
    case ErrorKind::SizeExceedsPopulation: return "SizeExceedsPopulation";
    case ErrorKind::TooLargeForEnumeration: return "TooLargeForEnumeration";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateSubject: return "DuplicateSubject";
    case ErrorKind::InvalidSubject: return "InvalidSubject";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::UndefinedDice: return "UndefinedDice";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// True for errors caused by arguments rather than by the data being analysed.
constexpr bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidTarget:
    case ErrorKind::InvalidGridAxis:
    case ErrorKind::QOutOfRange:
    case ErrorKind::EmptyLabelSet:
    case ErrorKind::BackgroundInLabelSet:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace segprec
