// Copyright 2026 The Palmland Authors.
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

namespace palmland {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can map the whole family onto one exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& reason)
      : Error(field + ": " + reason), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

class StateMachineError : public Error {
 public:
  using Error::Error;
};

class SimulationDiverged : public Error {
 public:
  using Error::Error;
};

// Malformed content in an input file. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& reason)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + reason
                       : reason),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// Well-formed rows that violate a structural rule (ordering, sampling).
class FormatError : public Error {
 public:
  using Error::Error;
};

class UndefinedDelay : public Error {
 public:
  using Error::Error;
};

}  // namespace palmland
