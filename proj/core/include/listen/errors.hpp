/*
 * Copyright 2026 The LISTEN Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LISTEN_ERRORS_HPP_
#define LISTEN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace listen {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (non-finite values, empty
/// corpora, duplicate ids, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Shape or arity mismatch between two inputs.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Invalid or incomplete configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File access or parse failure. Messages for line-oriented formats
/// include the offending line number.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace listen

#endif  // LISTEN_ERRORS_HPP_
