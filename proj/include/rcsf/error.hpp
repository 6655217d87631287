// Copyright 2026 The rcsf Authors. All Rights Reserved.
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

namespace rcsf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported audio input (bad RIFF layout, codec, empty data).
class AudioError : public Error {
 public:
  using Error::Error;
};

/// A precondition on a function argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed manifest, feature file, or model file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// The feature configuration a vector was extracted with does not match the
/// one a model was trained on.
class FingerprintMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace rcsf
