// Copyright 2026 The tfnfraud Authors.
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

namespace tfn {

// Exit-code families used by the command-line front end.
enum class ErrorKind {
  kValidation = 1,
  kRuntime = 2,
  kIo = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define TFN_DEFINE_ERROR(Name, Kind)                              \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(Kind, what) {} \
  }

TFN_DEFINE_ERROR(DimensionError, ErrorKind::kValidation);
TFN_DEFINE_ERROR(ParameterError, ErrorKind::kValidation);
TFN_DEFINE_ERROR(ConfigurationError, ErrorKind::kValidation);
TFN_DEFINE_ERROR(InputError, ErrorKind::kValidation);
TFN_DEFINE_ERROR(SplitError, ErrorKind::kValidation);
TFN_DEFINE_ERROR(NumericError, ErrorKind::kRuntime);
TFN_DEFINE_ERROR(GenerationError, ErrorKind::kRuntime);
TFN_DEFINE_ERROR(FormatError, ErrorKind::kIo);
TFN_DEFINE_ERROR(IoError, ErrorKind::kIo);

// A format error raised specifically for an unknown version byte.
class UnsupportedVersionError : public FormatError {
 public:
  explicit UnsupportedVersionError(const std::string& what)
      : FormatError(what) {}
};

#undef TFN_DEFINE_ERROR

}  // namespace tfn
