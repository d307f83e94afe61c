// core/include/rtflab/config.hpp

// Copyright 2026  rtflab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RTFLAB_CONFIG_HPP_
#define RTFLAB_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rtflab {

// Flat key-value configuration with dotted section names:
//   scene.duration = 30
//   geometry.lma = -0.075,0,0; -0.068,0,0
// '#' starts a comment; whitespace around keys and values is ignored.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Keys in lexicographic order, one "key = value" line each.
  std::string serialize() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// "a,b,c" -> trimmed tokens; empty input -> empty list.
std::vector<std::string> split_list(const std::string& text, char sep = ',');

}  // namespace rtflab

#endif  // RTFLAB_CONFIG_HPP_
