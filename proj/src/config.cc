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

#include "alovc/config.h"

#include <array>
#include <set>
#include <stdexcept>

#include "alovc/audio_io.h"
#include "alovc/errors.h"

namespace alovc {
namespace {

constexpr std::array<ConfigKey, 13> kKeys = {{
    {"weights", "", "weight bundle path"},
    {"chunk_size", "160", "samples per streaming chunk; 0 feeds the whole file at once"},
    {"vuf_mode", "strict", "strict: source voicing passes through; predicted: network decides"},
    {"source_stats", "", "fixed source pitch statistics file; empty accumulates them causally"},
    {"vocoder_lookahead_ms", "0", "declared vocoder lookahead used in latency reports"},
    {"vocoder_seed", "24301", "noise generator seed"},
    {"period_encoding", "samples", "feature export period field: samples or normalized"},
    {"f0_min", "40", "lowest detectable F0 (Hz)"},
    {"f0_max", "500", "highest detectable F0 (Hz)"},
    {"voicing_threshold", "0.3", "normalized autocorrelation needed to call a frame voiced"},
    {"bench_seconds", "5", "benchmark input duration (s)"},
    {"bench_reps", "5", "benchmark repetitions"},
    {"threads", "1", "kernel threads for convert (bench always uses 1)"},
}};

bool known(std::string_view key) {
  for (const auto& k : kKeys) {
    if (k.name == key) return true;
  }
  return false;
}

}  // namespace

std::span<const ConfigKey> config_keys() { return kKeys; }

CliConfig::CliConfig() {
  for (const auto& k : kKeys) values_.emplace(std::string(k.name), std::string(k.default_value));
}

CliConfig CliConfig::parse(std::string_view text) {
  CliConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(line.substr(0, eq));
    if (!seen.insert(key).second) {
      throw UsageError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    cfg.set(key, std::string(line.substr(eq + 1)));
  }
  return cfg;
}

CliConfig CliConfig::load(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

void CliConfig::set(std::string_view key, std::string value) {
  if (!known(key)) throw UsageError("unknown config key '" + std::string(key) + "'");
  values_.find(key)->second = std::move(value);
}

const std::string& CliConfig::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

double CliConfig::get_double(std::string_view key) const {
  const std::string& v = get(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::logic_error&) {
  }
  throw UsageError("config key '" + std::string(key) + "' needs a number, got '" + v + "'");
}

long CliConfig::get_int(std::string_view key) const {
  const std::string& v = get(key);
  try {
    std::size_t used = 0;
    const long n = std::stol(v, &used);
    if (used == v.size()) return n;
  } catch (const std::logic_error&) {
  }
  throw UsageError("config key '" + std::string(key) + "' needs an integer, got '" + v + "'");
}

std::string CliConfig::to_text() const {
  std::string out;
  for (const auto& k : kKeys) out += std::string(k.name) + "=" + get(k.name) + "\n";
  return out;
}

}  // namespace alovc
