// Copyright 2026 The LooseIMU Authors
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

#ifndef LOOSEIMU_ERRORS_H_
#define LOOSEIMU_ERRORS_H_

#include <stdexcept>
#include <string>

namespace looseimu {

// Every library failure derives from Error; `kind()` is the stable,
// machine-readable tag the CLI reports on stderr.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("shape_error", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};

class StepError : public Error {
 public:
  explicit StepError(const std::string& what) : Error("step_error", what) {}
};

class SequenceLengthError : public Error {
 public:
  explicit SequenceLengthError(const std::string& what)
      : Error("sequence_length_error", what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error("validation_error", what) {}
};

class TrainingDivergedError : public Error {
 public:
  explicit TrainingDivergedError(const std::string& what)
      : Error("training_diverged", what) {}
};

enum class IoCode {
  kNotFound,
  kParse,
  kVersionMismatch,
  kTruncated,
  kShapeMismatch,
  kIncompatible,
  kWrite,
};

inline const char* IoCodeName(IoCode code) {
  switch (code) {
    case IoCode::kNotFound: return "io_not_found";
    case IoCode::kParse: return "io_parse";
    case IoCode::kVersionMismatch: return "io_version_mismatch";
    case IoCode::kTruncated: return "io_truncated";
    case IoCode::kShapeMismatch: return "io_shape_mismatch";
    case IoCode::kIncompatible: return "io_incompatible";
    case IoCode::kWrite: return "io_write";
  }
  return "io_error";
}

// File and format failures. `kind()` carries the code name.
class IoError : public Error {
 public:
  IoError(IoCode code, const std::string& what)
      : Error(IoCodeName(code), what), code_(code) {}
  IoCode code() const { return code_; }

 private:
  IoCode code_;
};

}  // namespace looseimu

#endif  // LOOSEIMU_ERRORS_H_
