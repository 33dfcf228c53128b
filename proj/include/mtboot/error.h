//
// Copyright 2026 The mtboot Authors
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
//

#ifndef MTBOOT_ERROR_H_
#define MTBOOT_ERROR_H_

#include <stdexcept>
#include <string>

namespace mtboot {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line()` is 1-based, or 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// File contents violate a format rule (bad number, negative weight, ...).
class FormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Inconsistent or incomplete configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A value violates a data-model invariant.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace mtboot

#endif  // MTBOOT_ERROR_H_
