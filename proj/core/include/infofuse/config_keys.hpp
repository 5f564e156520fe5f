// Copyright 2026 The infofuse Authors
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

// Helpers for strict parsing of structured configuration.

#ifndef INFOFUSE_CONFIG_KEYS_HPP_
#define INFOFUSE_CONFIG_KEYS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace infofuse {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::size_t edit_distance(std::string_view a, std::string_view b);

// Closest candidate, or empty if nothing is within a plausible typo distance.
std::string nearest_key(std::string_view key, const std::vector<std::string>& candidates);

// Throws ConfigError naming the key, its context and a suggestion.
[[noreturn]] void reject_unknown_key(std::string_view key, std::string_view context,
                                     const std::vector<std::string>& allowed);

}  // namespace infofuse

#endif  // INFOFUSE_CONFIG_KEYS_HPP_
