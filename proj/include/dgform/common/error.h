// Copyright 2026 The DGform Authors
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

#ifndef DGFORM_COMMON_ERROR_H_
#define DGFORM_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace dgform {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes or container sizes disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a function (e.g. log of a non-positive).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Caller violated a precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. line() is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")"
                       : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Versioned file written by an incompatible release.
class VersionError : public Error {
 public:
  VersionError(const std::string& found, const std::string& expected)
      : Error("version mismatch: file has '" + found + "', expected '" +
              expected + "'"),
        found_(found),
        expected_(expected) {}
  const std::string& found() const { return found_; }
  const std::string& expected() const { return expected_; }

 private:
  std::string found_;
  std::string expected_;
};

class LinAlgError : public Error {
 public:
  using Error::Error;
};

// Ill-conditioned or non-finite numerical result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// NaN or Inf inside the action vector handed to the environment.
class ActionError : public Error {
 public:
  using Error::Error;
};

class EmptySegmentation : public Error {
 public:
  using Error::Error;
};

// A loss component went non-finite; component() names it.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& component, const std::string& what)
      : Error(component + ": " + what), component_(component) {}
  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

}  // namespace dgform

#endif  // DGFORM_COMMON_ERROR_H_
