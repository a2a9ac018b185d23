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


#include "radlio/keyvalue.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "radlio/errors.hpp"

namespace radlio {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_doubles(const std::string& key, const std::string& v,
                                  std::size_t expected) {
  std::vector<double> out;
  std::istringstream is(v);
  std::string tok;
  while (is >> tok) {
    double d = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
      throw ConfigError("config key '" + key + "': not a number: " + tok);
    }
    out.push_back(d);
  }
  if (out.size() != expected) {
    throw ConfigError("config key '" + key + "': expected " +
                      std::to_string(expected) + " numbers");
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

KeyValueFile KeyValueFile::parse(const std::string& text) {
  KeyValueFile kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": missing '='");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    }
    kv.values_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValueFile KeyValueFile::read(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string KeyValueFile::str() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

void KeyValueFile::write(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write config file: " + path);
  f << str();
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}
void KeyValueFile::set(const std::string& key, double value) {
  values_[key] = format_double(value);
}
void KeyValueFile::set(const std::string& key, int value) {
  values_[key] = std::to_string(value);
}
void KeyValueFile::set(const std::string& key, bool value) {
  values_[key] = value ? "true" : "false";
}
void KeyValueFile::set(const std::string& key, const Vec3& value) {
  values_[key] = format_double(value.x()) + " " + format_double(value.y()) + " " +
                 format_double(value.z());
}
void KeyValueFile::set(const std::string& key, const Mat3& value) {
  std::string s;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) s += (s.empty() ? "" : " ") + format_double(value(r, c));
  }
  values_[key] = s;
}

void KeyValueFile::get(const std::string& key, std::string& out) const {
  if (auto it = values_.find(key); it != values_.end()) out = it->second;
}
void KeyValueFile::get(const std::string& key, double& out) const {
  if (auto it = values_.find(key); it != values_.end()) {
    out = parse_doubles(key, it->second, 1)[0];
  }
}
void KeyValueFile::get(const std::string& key, int& out) const {
  if (auto it = values_.find(key); it != values_.end()) {
    const std::string& v = it->second;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
      throw ConfigError("config key '" + key + "': not an integer: " + v);
    }
  }
}
void KeyValueFile::get(const std::string& key, std::uint64_t& out) const {
  if (auto it = values_.find(key); it != values_.end()) {
    const std::string& v = it->second;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
      throw ConfigError("config key '" + key + "': not an unsigned integer: " + v);
    }
  }
}
void KeyValueFile::get(const std::string& key, bool& out) const {
  if (auto it = values_.find(key); it != values_.end()) {
    if (it->second == "true" || it->second == "1") {
      out = true;
    } else if (it->second == "false" || it->second == "0") {
      out = false;
    } else {
      throw ConfigError("config key '" + key + "': not a boolean: " + it->second);
    }
  }
}
void KeyValueFile::get(const std::string& key, Vec3& out) const {
  if (auto it = values_.find(key); it != values_.end()) {
    const auto d = parse_doubles(key, it->second, 3);
    out = Vec3(d[0], d[1], d[2]);
  }
}
void KeyValueFile::get(const std::string& key, Mat3& out) const {
  if (auto it = values_.find(key); it != values_.end()) {
    const auto d = parse_doubles(key, it->second, 9);
    for (int i = 0; i < 9; ++i) out(i / 3, i % 3) = d[i];
  }
}

std::vector<std::string> KeyValueFile::unknown_keys(
    const std::vector<std::string>& known) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (std::find(known.begin(), known.end(), k) == known.end()) out.push_back(k);
  }
  return out;
}

}  // namespace radlio
