// Copyright 2026 The alovc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// key=value configuration shared by the command-line tool. Every key has a
// documented default; unknown keys are rejected.

#ifndef ALOVC_CONFIG_H_
#define ALOVC_CONFIG_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace alovc {

struct ConfigKey {
  std::string_view name;
  std::string_view default_value;
  std::string_view doc;
};

std::span<const ConfigKey> config_keys();

class CliConfig {
 public:
  CliConfig();

  // Lines "key=value"; blank lines and lines starting with '#' are skipped.
  // Throws UsageError on syntax errors, unknown keys or duplicates.
  static CliConfig parse(std::string_view text);
  static CliConfig load(const std::filesystem::path& path);

  // Throws UsageError for unknown keys.
  void set(std::string_view key, std::string value);
  const std::string& get(std::string_view key) const;
  double get_double(std::string_view key) const;
  long get_int(std::string_view key) const;

  // All keys in documentation order, one "key=value" per line.
  std::string to_text() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace alovc

#endif  // ALOVC_CONFIG_H_
