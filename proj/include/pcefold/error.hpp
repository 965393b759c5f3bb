// Copyright 2026 The pcefold Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace pcefold {

enum class Errc {
  EmptyInput,
  IllegalCharacter,
  MissingEnergyEntry,
  NonPositivePenalty,
  InvalidCoefficient,
  LengthMismatch,
  InfeasibleInput,
  NonPositiveM,
  CapacityExceeded,
  EncodingMismatch,
  SubsetNotInDevice,
  InvalidPair,
  ParamLengthMismatch,
  RegisterTooLarge,
  QubitMismatch,
  ZeroShots,
  ZeroOptimum,
  BelowOptimum,
  InvalidCounts,
  InvalidArgument,
  Io,
  Parse,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::IllegalCharacter: return "IllegalCharacter";
    case Errc::MissingEnergyEntry: return "MissingEnergyEntry";
    case Errc::NonPositivePenalty: return "NonPositivePenalty";
    case Errc::InvalidCoefficient: return "InvalidCoefficient";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::InfeasibleInput: return "InfeasibleInput";
    case Errc::NonPositiveM: return "NonPositiveM";
    case Errc::CapacityExceeded: return "CapacityExceeded";
    case Errc::EncodingMismatch: return "EncodingMismatch";
    case Errc::SubsetNotInDevice: return "SubsetNotInDevice";
    case Errc::InvalidPair: return "InvalidPair";
    case Errc::ParamLengthMismatch: return "ParamLengthMismatch";
    case Errc::RegisterTooLarge: return "RegisterTooLarge";
    case Errc::QubitMismatch: return "QubitMismatch";
    case Errc::ZeroShots: return "ZeroShots";
    case Errc::ZeroOptimum: return "ZeroOptimum";
    case Errc::BelowOptimum: return "BelowOptimum";
    case Errc::InvalidCounts: return "InvalidCounts";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    case Errc::Parse: return "Parse";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what,
        std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code),
        position_(position) {}

  Errc code() const noexcept { return code_; }
  /// 1-based character position for IllegalCharacter.
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  Errc code_;
  std::optional<std::size_t> position_;
};

}  // namespace pcefold
