// Copyright 2026 The crowdqf Authors
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

namespace crowdqf {

/// Error categories; the CLI maps them onto its exit codes.
enum class ErrorKind {
  kMalformedInput,
  kInvalidArgument,
  kInsufficientData,
  kConfiguration,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class MalformedInput : public Error {
 public:
  explicit MalformedInput(const std::string& what) : Error(ErrorKind::kMalformedInput, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::kInvalidArgument, what) {}
};

class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& what) : Error(ErrorKind::kInsufficientData, what) {}
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& what) : Error(ErrorKind::kConfiguration, what) {}
};

}  // namespace crowdqf
