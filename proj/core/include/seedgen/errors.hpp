// Copyright 2026 The seedgen Authors.
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

namespace seedgen {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { kConfig = 2, kData = 3, kNumeric = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Invalid configuration, arguments or shapes supplied by the caller.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

// Malformed or inconsistent files and datasets.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

// Non-finite values during training or sampling. `step` is -1 when the
// failure is not tied to a solver or optimizer step.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, long step = -1)
      : Error(ErrorKind::kNumeric, what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace seedgen
