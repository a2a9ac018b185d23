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

#include <map>
#include <string>
#include <vector>

#include "radlio/manifold.hpp"

namespace radlio {

/// Flat `key = value` text file, '#' starts a comment. Doubles are written
/// in shortest round-trip form, so write/read is lossless.
class KeyValueFile {
 public:
  static KeyValueFile read(const std::string& path);  // throws ConfigError
  static KeyValueFile parse(const std::string& text);
  void write(const std::string& path) const;           // throws ConfigError
  std::string str() const;

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, int value);
  void set(const std::string& key, bool value);
  void set(const std::string& key, const Vec3& value);
  void set(const std::string& key, const Mat3& value);  // row-major

  /// Typed lookups fill `out` when the key is present and leave it untouched
  /// otherwise. Malformed values throw ConfigError.
  void get(const std::string& key, std::string& out) const;
  void get(const std::string& key, double& out) const;
  void get(const std::string& key, int& out) const;
  void get(const std::string& key, std::uint64_t& out) const;
  void get(const std::string& key, bool& out) const;
  void get(const std::string& key, Vec3& out) const;
  void get(const std::string& key, Mat3& out) const;

  /// Keys not in `known` (for catching typos).
  std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

 private:
  std::map<std::string, std::string> values_;
};

std::string format_double(double v);

}  // namespace radlio
