// Copyright 2026 The WordCNN Authors
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

#ifndef WORDCNN_ERRORS_HPP_
#define WORDCNN_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wordcnn {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad hyperparameters, impossible split plans,
/// unknown config keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller passed a value outside an operation's input domain.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Tensor or layer-chain shapes are inconsistent.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed vector or vocabulary file. `location()` is the 1-based line
/// (text formats) or entry index (binary format) where parsing stopped, or
/// 0 when the error is not tied to a position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t location = 0)
      : Error(what), location_(location) {}
  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

/// Bad checkpoint bytes (magic, version, truncation, parameter mismatch).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Non-finite loss or activations during training or gradient checking.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace wordcnn

#endif  // WORDCNN_ERRORS_HPP_
