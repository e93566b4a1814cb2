#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hardbody {

enum class ErrorCode {
  InvalidConfig,
  NonUnitDirection,
  IterationLimit,
  NonPositiveT,
  StartNotInterior,
  ChordDegenerate,
  ContainmentViolated,
  EtaZero,
  DomainError,
  RootNotBracketed,
  EtaTooLarge,
  NotInBody,
  HOutOfRange,
  OriginNotInterior,
  DimensionTooLarge,
  CenterNotInterior,
};

constexpr std::string_view to_string(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonUnitDirection: return "NonUnitDirection";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::NonPositiveT: return "NonPositiveT";
    case ErrorCode::StartNotInterior: return "StartNotInterior";
    case ErrorCode::ChordDegenerate: return "ChordDegenerate";
    case ErrorCode::ContainmentViolated: return "ContainmentViolated";
    case ErrorCode::EtaZero: return "EtaZero";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::RootNotBracketed: return "RootNotBracketed";
    case ErrorCode::EtaTooLarge: return "EtaTooLarge";
    case ErrorCode::NotInBody: return "NotInBody";
    case ErrorCode::HOutOfRange: return "HOutOfRange";
    case ErrorCode::OriginNotInterior: return "OriginNotInterior";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::CenterNotInterior: return "CenterNotInterior";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hardbody
