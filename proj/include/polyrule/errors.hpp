// Copyright 2026 The Polyrule Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace polyrule {

enum class Errc {
  RevisitedCell,
  NotClosed,
  ChordViolation,
  NotAPath,
  DuplicateCell,
  AlphabetViolation,
  Disconnected,
  PathNotContained,
  NotMaximal,
  BudgetExhausted,
  DomainTooSmall,
  InvalidArm,
  ParseError,
  CacheCorrupt,
  FrameOverflow,
  InvalidSpec,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::RevisitedCell: return "RevisitedCell";
    case Errc::NotClosed: return "NotClosed";
    case Errc::ChordViolation: return "ChordViolation";
    case Errc::NotAPath: return "NotAPath";
    case Errc::DuplicateCell: return "DuplicateCell";
    case Errc::AlphabetViolation: return "AlphabetViolation";
    case Errc::Disconnected: return "Disconnected";
    case Errc::PathNotContained: return "PathNotContained";
    case Errc::NotMaximal: return "NotMaximal";
    case Errc::BudgetExhausted: return "BudgetExhausted";
    case Errc::DomainTooSmall: return "DomainTooSmall";
    case Errc::InvalidArm: return "InvalidArm";
    case Errc::ParseError: return "ParseError";
    case Errc::CacheCorrupt: return "CacheCorrupt";
    case Errc::FrameOverflow: return "FrameOverflow";
    case Errc::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace polyrule
