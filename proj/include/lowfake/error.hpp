/*
 * Copyright 2026 The lowfake Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace lowfake {

/// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or parameter shapes that do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf produced or consumed where only finite values are allowed.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unsupported file content (images, archives, CSV, JSONL).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value or precondition violated by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lowfake
