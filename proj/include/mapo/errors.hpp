// SPDX-FileCopyrightText: (c) 2026 The mapo authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mapo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MAPO_DEFINE_ERROR(Name)      \
  class Name : public Error {        \
   public:                           \
    using Error::Error;              \
  }

MAPO_DEFINE_ERROR(InvalidStateError);
MAPO_DEFINE_ERROR(ConfigError);
MAPO_DEFINE_ERROR(GroupError);
MAPO_DEFINE_ERROR(BatchError);
MAPO_DEFINE_ERROR(ShapeError);
MAPO_DEFINE_ERROR(DomainError);
MAPO_DEFINE_ERROR(PolicyError);
MAPO_DEFINE_ERROR(TrainingError);
MAPO_DEFINE_ERROR(EvaluationError);
MAPO_DEFINE_ERROR(IoError);
MAPO_DEFINE_ERROR(ValidationError);

#undef MAPO_DEFINE_ERROR

// Malformed input text; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mapo
