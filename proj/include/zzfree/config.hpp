// Copyright 2026 The zzfree Authors
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

#ifndef ZZFREE_CONFIG_HPP
#define ZZFREE_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zzfree/chain.hpp"
#include "zzfree/circuit_model.hpp"
#include "zzfree/dynamics.hpp"
#include "zzfree/errors.hpp"
#include "zzfree/gates.hpp"

namespace zzfree {

// Malformed or schema-violating config, with a 1-based source location.
class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string &source, int line, int column, const std::string &message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

struct ConfigValue {
  std::variant<double, bool, std::string, std::vector<double>> data;
  int line = 0, column = 0;
};

// Subset of TOML: [dotted.tables], bare keys, numbers, booleans, basic
// strings, flat numeric arrays, # comments. Keys are checked against the
// schema of their table while parsing.
class ConfigDocument {
 public:
  static ConfigDocument parse(const std::string &text, const std::string &source = "<config>");
  static ConfigDocument load(const std::string &path);

  bool has_table(const std::string &table) const { return tables_.count(table) > 0; }
  bool has(const std::string &table, const std::string &key) const;
  std::vector<std::string> tables_with_prefix(const std::string &prefix) const;

  double number(const std::string &table, const std::string &key) const;
  double number(const std::string &table, const std::string &key, double fallback) const;
  int integer(const std::string &table, const std::string &key, int fallback) const;
  bool boolean(const std::string &table, const std::string &key, bool fallback) const;
  std::string string(const std::string &table, const std::string &key, const std::string &fallback) const;
  std::vector<double> array(const std::string &table, const std::string &key) const;

  // Throws ConfigError pointing at the offending value.
  [[noreturn]] void fail(const std::string &table, const std::string &key, const std::string &message) const;
  const std::string &source() const { return source_; }

 private:
  const ConfigValue &get(const std::string &table, const std::string &key) const;
  std::string source_;
  std::map<std::string, std::map<std::string, ConfigValue>> tables_;
  std::map<std::string, std::pair<int, int>> table_pos_;
};

CircuitSpec circuit_from_config(const ConfigDocument &doc);
int drive_levels_from_config(const ConfigDocument &doc);
SimConfig sim_from_config(const ConfigDocument &doc);
// [drive]: detuning (default 0.1 GHz); amplitude when given.
double drive_detuning_from_config(const ConfigDocument &doc);
std::optional<double> drive_amplitude_from_config(const ConfigDocument &doc);
PulseEnvelope pulse_from_config(const ConfigDocument &doc, const std::string &table);
std::optional<NoiseSpec> noise_from_config(const ConfigDocument &doc);
ChainSpec chain_from_config(const ConfigDocument &doc);

// CR gate settings; tone amplitudes come from [pulse.cr] and [pulse.cancel]
// when present.
struct CRConfig {
  CRFlavor flavor = CRFlavor::ZeroControlled;
  double duration = 40.0;
  std::optional<double> drive_freq;
  std::optional<double> cr_peak, cancel_peak;
  double cancel_phase = 0.0;
  DragPlacement drag = DragPlacement::Cancel;
  bool optimize = false;
  int restarts = 3;
  int max_evals = 400;
};
CRConfig cr_from_config(const ConfigDocument &doc);

struct CZConfig {
  int exponent = 2;
  std::optional<double> duration;  // unset: search the shortest full-phase duration
};
CZConfig cz_from_config(const ConfigDocument &doc);

struct ScanConfig {
  double dmax = 0.4;
  int points = 81;
  bool exact_oracle = false;
};
ScanConfig scan_from_config(const ConfigDocument &doc);

struct GridConfig {
  std::vector<double> d1, d2;
};
GridConfig grid_from_config(const ConfigDocument &doc);

// Built-in presets compiled from presets/*.toml.
std::optional<std::string> preset_text(const std::string &name);
std::vector<std::string> preset_names();

}  // namespace zzfree

#endif
