// Copyright 2026 The Teleop Authors
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

namespace teleop {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes that do not agree with the kinematic chain.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Violated structural invariant of a robot description or a config file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Rotation angle too close to pi for the principal logarithm.
class NearSingularRotation : public Error {
 public:
  explicit NearSingularRotation(double angle)
      : Error("near-singular rotation: angle " + std::to_string(angle) + " rad"), angle_(angle) {}
  double angle() const { return angle_; }

 private:
  double angle_;
};

/// Parse failure with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace teleop
