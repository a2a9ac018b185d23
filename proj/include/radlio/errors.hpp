// Copyright 2026 The radlio Authors
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

namespace radlio {

/// Invalid argument to a numerical routine (non-finite input, bad dt, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Geometry too poor to solve (collinear plane fit, < 3 radar points, ...).
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// IMU buffer handed to static initialization was not stationary.
class NotStationary : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or missing configuration. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or malformed dataset content. The CLI maps this to exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace radlio
