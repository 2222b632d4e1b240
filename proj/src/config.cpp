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

#include "zzfree/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace zzfree {

namespace {

std::string located(const std::string &source, int line, int column, const std::string &message) {
  std::ostringstream s;
  s << source << ":" << line << ":" << column << ": " << message;
  return s.str();
}

const std::set<std::string> kPulseKeys = {"kind",  "amplitude", "sigma",  "duration", "exponent",
                                          "ramp_time", "order", "hold", "lifted",   "phase",
                                          "carrier", "derivative_weight"};

const std::map<std::string, std::set<std::string>> kSchema = {
    {"transmon.left", {"ec", "ej", "charge_cutoff", "kept_levels"}},
    {"transmon.right", {"ec", "ej", "charge_cutoff", "kept_levels"}},
    {"resonator", {"bare_freq", "fock_dim"}},
    {"coupling", {"g_left", "g_right"}},
    {"model", {"drive_levels", "max_dim"}},
    {"drive", {"detuning", "amplitude"}},
    {"sim", {"dt", "integrator", "levels_left", "levels_right", "res_dim", "sample_every"}},
    {"noise", {"t1", "t2", "t1_left", "t1_right", "t2_left", "t2_right", "kappa", "photons"}},
    {"cr", {"flavor", "drag", "optimize", "restarts", "max_evals"}},
    {"cz", {"exponent", "duration"}},
    {"scan", {"dmax", "points", "exact_oracle"}},
    {"chain", {"omega", "eta", "resonators", "detunings", "amplitudes", "res_dim"}},
    {"grid", {"d1_min", "d1_max", "d1_points", "d2_min", "d2_max", "d2_points"}},
};

bool key_allowed(const std::string &table, const std::string &key) {
  if (table.rfind("pulse.", 0) == 0) return kPulseKeys.count(key) > 0;
  if (table == "chain") {
    // chi<j> rows (resonator j) and zz<ij> static couplings.
    auto digits = [&](size_t from) {
      return key.size() > from && std::all_of(key.begin() + from, key.end(), [](char c) { return std::isdigit(c); });
    };
    if (key.rfind("chi", 0) == 0 && digits(3)) return true;
    if (key.rfind("zz", 0) == 0 && key.size() == 4 && digits(2)) return true;
  }
  auto it = kSchema.find(table);
  return it != kSchema.end() && it->second.count(key) > 0;
}

bool table_allowed(const std::string &table) {
  return kSchema.count(table) > 0 || (table.rfind("pulse.", 0) == 0 && table.size() > 6);
}

class Parser {
 public:
  Parser(const std::string &text, const std::string &source) : text_(text), source_(source) {}

  template <class Fn>
  void run(Fn &&emit) {
    std::string table;
    while (pos_ < text_.size()) {
      skip_blank();
      if (at_end_of_line()) {
        next_line();
        continue;
      }
      if (peek() == '[') {
        const int col = column(), ln = line_;
        ++pos_;
        table = name();
        expect(']');
        end_line();
        emit.table(table, ln, col);
        continue;
      }
      const int col = column(), ln = line_;
      std::string key = name();
      if (key.find('.') != std::string::npos) fail(col, "dotted keys are not supported");
      skip_blank();
      expect('=');
      skip_blank();
      ConfigValue v;
      v.line = line_;
      v.column = column();
      v.data = value();
      end_line();
      emit.key(table, key, std::move(v), ln, col);
    }
  }

  [[noreturn]] void fail(int col, const std::string &message) const {
    throw ConfigError(source_, line_, col, message);
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\n'; }
  int column() const { return static_cast<int>(pos_ - line_start_) + 1; }
  void skip_blank() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool at_end_of_line() const {
    const char c = peek();
    return c == '\n' || c == '\r' || c == '#';
  }
  void next_line() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    if (pos_ < text_.size()) ++pos_;
    ++line_;
    line_start_ = pos_;
  }
  void end_line() {
    skip_blank();
    if (!at_end_of_line()) fail(column(), std::string("unexpected '") + peek() + "'");
    next_line();
  }
  void expect(char c) {
    if (peek() != c) fail(column(), std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string name() {
    skip_blank();
    const size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '-' ||
            text_[pos_] == '.'))
      ++pos_;
    if (pos_ == start) fail(column(), "expected a name");
    std::string out = text_.substr(start, pos_ - start);
    if (out.front() == '.' || out.back() == '.' || out.find("..") != std::string::npos)
      throw ConfigError(source_, line_, static_cast<int>(start - line_start_) + 1, "malformed dotted name");
    skip_blank();
    return out;
  }
  double number() {
    const int col = column();
    const size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                   text_[pos_] == '+' || text_[pos_] == '-' || text_[pos_] == '_'))
      ++pos_;
    std::string tok = text_.substr(start, pos_ - start);
    tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
    if (!tok.empty() && tok[0] == '+') tok.erase(0, 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
      fail(col, "invalid number '" + text_.substr(start, pos_ - start) + "'");
    return v;
  }
  std::variant<double, bool, std::string, std::vector<double>> value() {
    const char c = peek();
    if (c == '"') {
      const int col = column();
      ++pos_;
      std::string out;
      while (true) {
        if (pos_ >= text_.size() || text_[pos_] == '\n') fail(col, "unterminated string");
        const char ch = text_[pos_++];
        if (ch == '"') break;
        if (ch == '\\') {
          const char esc = peek();
          ++pos_;
          if (esc == '"' || esc == '\\') out += esc;
          else if (esc == 'n') out += '\n';
          else if (esc == 't') out += '\t';
          else fail(column() - 1, "unsupported escape");
          continue;
        }
        out += ch;
      }
      return out;
    }
    if (c == '[') {
      ++pos_;
      std::vector<double> out;
      skip_blank();
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      while (true) {
        skip_blank();
        out.push_back(number());
        skip_blank();
        if (peek() == ',') {
          ++pos_;
          skip_blank();
          if (peek() == ']') {
            ++pos_;
            return out;
          }
          continue;
        }
        expect(']');
        return out;
      }
    }
    if (text_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      return true;
    }
    if (text_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      return false;
    }
    if (at_end_of_line()) fail(column(), "missing value");
    return number();
  }

  const std::string &text_;
  const std::string &source_;
  size_t pos_ = 0, line_start_ = 0;
  int line_ = 1;
};

}  // namespace

ConfigError::ConfigError(const std::string &source, int line, int column, const std::string &message)
    : ValidationError(located(source, line, column, message)), line_(line), column_(column) {}

ConfigDocument ConfigDocument::parse(const std::string &text, const std::string &source) {
  ConfigDocument doc;
  doc.source_ = source;
  Parser parser(text, source);
  struct Emit {
    ConfigDocument &doc;
    void table(const std::string &t, int line, int col) {
      if (!table_allowed(t)) throw ConfigError(doc.source_, line, col, "unknown table [" + t + "]");
      if (doc.table_pos_.count(t)) throw ConfigError(doc.source_, line, col, "duplicate table [" + t + "]");
      doc.table_pos_[t] = {line, col};
      doc.tables_[t];
    }
    void key(const std::string &t, const std::string &k, ConfigValue v, int line, int col) {
      if (t.empty()) throw ConfigError(doc.source_, line, col, "key '" + k + "' outside any table");
      if (!key_allowed(t, k)) throw ConfigError(doc.source_, line, col, "unknown key '" + k + "' in [" + t + "]");
      if (doc.tables_[t].count(k)) throw ConfigError(doc.source_, line, col, "duplicate key '" + k + "'");
      doc.tables_[t][k] = std::move(v);
    }
  } emit{doc};
  parser.run(emit);
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

bool ConfigDocument::has(const std::string &table, const std::string &key) const {
  auto t = tables_.find(table);
  return t != tables_.end() && t->second.count(key) > 0;
}

std::vector<std::string> ConfigDocument::tables_with_prefix(const std::string &prefix) const {
  std::vector<std::string> out;
  for (const auto &[name, _] : tables_)
    if (name.rfind(prefix, 0) == 0) out.push_back(name);
  return out;
}

const ConfigValue &ConfigDocument::get(const std::string &table, const std::string &key) const {
  auto t = tables_.find(table);
  if (t == tables_.end()) throw ConfigError(source_, 1, 1, "missing table [" + table + "]");
  auto k = t->second.find(key);
  if (k == t->second.end()) {
    auto [line, col] = table_pos_.at(table);
    throw ConfigError(source_, line, col, "missing key '" + key + "' in [" + table + "]");
  }
  return k->second;
}

void ConfigDocument::fail(const std::string &table, const std::string &key, const std::string &message) const {
  const ConfigValue &v = get(table, key);
  throw ConfigError(source_, v.line, v.column, key + ": " + message);
}

double ConfigDocument::number(const std::string &table, const std::string &key) const {
  const ConfigValue &v = get(table, key);
  if (auto *d = std::get_if<double>(&v.data)) return *d;
  fail(table, key, "expected a number");
}

double ConfigDocument::number(const std::string &table, const std::string &key, double fallback) const {
  return has(table, key) ? number(table, key) : fallback;
}

int ConfigDocument::integer(const std::string &table, const std::string &key, int fallback) const {
  if (!has(table, key)) return fallback;
  const double d = number(table, key);
  if (d != std::floor(d) || std::abs(d) > 1e9) fail(table, key, "expected an integer");
  return static_cast<int>(d);
}

bool ConfigDocument::boolean(const std::string &table, const std::string &key, bool fallback) const {
  if (!has(table, key)) return fallback;
  const ConfigValue &v = get(table, key);
  if (auto *b = std::get_if<bool>(&v.data)) return *b;
  fail(table, key, "expected true or false");
}

std::string ConfigDocument::string(const std::string &table, const std::string &key,
                                   const std::string &fallback) const {
  if (!has(table, key)) return fallback;
  const ConfigValue &v = get(table, key);
  if (auto *s = std::get_if<std::string>(&v.data)) return *s;
  fail(table, key, "expected a string");
}

std::vector<double> ConfigDocument::array(const std::string &table, const std::string &key) const {
  const ConfigValue &v = get(table, key);
  if (auto *a = std::get_if<std::vector<double>>(&v.data)) return *a;
  fail(table, key, "expected an array of numbers");
}

namespace {

// Runs a validate() call and re-throws its message at the table location.
template <class Fn>
void checked(const ConfigDocument &doc, const std::string &table, const std::string &key, Fn &&fn) {
  try {
    fn();
  } catch (const ConfigError &) {
    throw;
  } catch (const ValidationError &e) {
    if (doc.has(table, key)) doc.fail(table, key, e.what());
    throw;
  }
}

TransmonSpec transmon_from(const ConfigDocument &doc, const std::string &table) {
  TransmonSpec t;
  t.ec = doc.number(table, "ec");
  t.ej = doc.number(table, "ej");
  t.charge_cutoff = doc.integer(table, "charge_cutoff", t.charge_cutoff);
  t.kept_levels = doc.integer(table, "kept_levels", t.kept_levels);
  checked(doc, table, "ec", [&] { t.validate(); });
  return t;
}

}  // namespace

CircuitSpec circuit_from_config(const ConfigDocument &doc) {
  CircuitSpec c;
  c.left = transmon_from(doc, "transmon.left");
  c.right = transmon_from(doc, "transmon.right");
  c.resonator.bare_freq = doc.number("resonator", "bare_freq");
  c.resonator.fock_dim = doc.integer("resonator", "fock_dim", c.resonator.fock_dim);
  checked(doc, "resonator", "bare_freq", [&] { c.resonator.validate(); });
  c.coupling.g_left = doc.number("coupling", "g_left");
  c.coupling.g_right = doc.number("coupling", "g_right");
  checked(doc, "coupling", "g_left", [&] { c.coupling.validate(); });
  c.max_dim = static_cast<size_t>(doc.integer("model", "max_dim", static_cast<int>(c.max_dim)));
  return c;
}

int drive_levels_from_config(const ConfigDocument &doc) {
  const int n = doc.integer("model", "drive_levels", 3);
  if (n < 2 || n > 5) doc.fail("model", "drive_levels", "must be between 2 and 5");
  return n;
}

SimConfig sim_from_config(const ConfigDocument &doc) {
  SimConfig s;
  s.integrator = Integrator::Magnus4;
  s.dt = 0.05;
  s.dt = doc.number("sim", "dt", s.dt);
  if (!(s.dt > 0)) doc.fail("sim", "dt", "must be positive");
  const std::string integ = doc.string("sim", "integrator", "magnus4");
  if (integ == "magnus2") s.integrator = Integrator::Magnus2;
  else if (integ == "magnus4") s.integrator = Integrator::Magnus4;
  else if (integ == "rk45") s.integrator = Integrator::AdaptiveRK;
  else doc.fail("sim", "integrator", "must be magnus2, magnus4 or rk45");
  s.levels_left = doc.integer("sim", "levels_left", s.levels_left);
  s.levels_right = doc.integer("sim", "levels_right", s.levels_right);
  s.res_dim = doc.integer("sim", "res_dim", s.res_dim);
  s.sample_every = doc.integer("sim", "sample_every", s.sample_every);
  if (s.levels_left < 2) doc.fail("sim", "levels_left", "must be at least 2");
  if (s.levels_right < 2) doc.fail("sim", "levels_right", "must be at least 2");
  if (s.res_dim < 2) doc.fail("sim", "res_dim", "must be at least 2");
  if (s.sample_every < 0) doc.fail("sim", "sample_every", "must be non-negative");
  return s;
}

double drive_detuning_from_config(const ConfigDocument &doc) {
  const double d = doc.number("drive", "detuning", 0.1);
  if (d == 0.0) doc.fail("drive", "detuning", "must be nonzero");
  return d;
}

std::optional<double> drive_amplitude_from_config(const ConfigDocument &doc) {
  if (!doc.has("drive", "amplitude")) return std::nullopt;
  return doc.number("drive", "amplitude");
}

PulseEnvelope pulse_from_config(const ConfigDocument &doc, const std::string &table) {
  const std::string kind = doc.string(table, "kind", "");
  PulseEnvelope p;
  if (kind == "truncated_gaussian") {
    const double duration = doc.number(table, "duration");
    p = PulseEnvelope::truncated_gaussian(doc.number(table, "amplitude"),
                                          doc.number(table, "sigma", duration / 4.0), duration);
    p.lifted = doc.boolean(table, "lifted", p.lifted);
  } else if (kind == "adiabatic_poly") {
    p = PulseEnvelope::adiabatic_poly(doc.number(table, "amplitude"), doc.integer(table, "exponent", 2),
                                      doc.number(table, "duration"));
  } else if (kind == "constant") {
    p = PulseEnvelope::constant(doc.number(table, "amplitude"));
  } else if (kind == "ramp_up") {
    p = PulseEnvelope::ramp_up(doc.number(table, "amplitude"), doc.number(table, "ramp_time"),
                               doc.integer(table, "order", 5),
                               doc.number(table, "hold", std::numeric_limits<double>::infinity()));
  } else if (doc.has(table, "kind")) {
    doc.fail(table, "kind", "must be truncated_gaussian, adiabatic_poly, constant or ramp_up");
  } else {
    throw ConfigError(doc.source(), 1, 1, "missing key 'kind' in [" + table + "]");
  }
  p.phase = doc.number(table, "phase", 0.0);
  p.carrier = doc.number(table, "carrier", 0.0);
  p.derivative_weight = doc.number(table, "derivative_weight", 0.0);
  checked(doc, table, "kind", [&] { p.validate(); });
  return p;
}

std::optional<NoiseSpec> noise_from_config(const ConfigDocument &doc) {
  if (!doc.has_table("noise")) return std::nullopt;
  NoiseSpec n;
  const double t1 = doc.number("noise", "t1", 0.0), t2 = doc.number("noise", "t2", 0.0);
  n.t1_left = doc.number("noise", "t1_left", t1);
  n.t1_right = doc.number("noise", "t1_right", t1);
  n.t2_left = doc.number("noise", "t2_left", t2);
  n.t2_right = doc.number("noise", "t2_right", t2);
  n.kappa = doc.number("noise", "kappa", 0.0);
  n.photons = doc.number("noise", "photons", 0.0);
  checked(doc, "noise", doc.has("noise", "t1") ? "t1" : "t1_left", [&] { n.validate(); });
  return n;
}

ChainSpec chain_from_config(const ConfigDocument &doc) {
  ChainSpec c;
  const auto omega = doc.array("chain", "omega");
  const auto eta = doc.array("chain", "eta");
  if (eta.size() != omega.size()) doc.fail("chain", "eta", "needs one entry per qubit");
  const size_t n = omega.size();
  if (n < 2 || n > 9) doc.fail("chain", "omega", "chain needs 2 to 9 qubits");
  for (size_t k = 0; k < n; ++k) c.qubits.push_back({omega[k], eta[k]});
  c.resonators = doc.array("chain", "resonators");
  if (c.resonators.size() != n - 1) doc.fail("chain", "resonators", "needs N - 1 entries");
  for (size_t j = 1; j < n; ++j) {
    const std::string key = "chi" + std::to_string(j);
    auto row = doc.array("chain", key);
    if (row.size() != n) doc.fail("chain", key, "needs one entry per qubit");
    c.chi.push_back(row);
  }
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = i + 1; j <= n; ++j) {
      const std::string key = "zz" + std::to_string(i) + std::to_string(j);
      const std::string alt = "zz" + std::to_string(j) + std::to_string(i);
      if (doc.has("chain", key) && doc.has("chain", alt)) doc.fail("chain", alt, "duplicates " + key);
      if (doc.has("chain", key)) c.zz_static[{int(i) - 1, int(j) - 1}] = doc.number("chain", key);
      if (doc.has("chain", alt)) c.zz_static[{int(i) - 1, int(j) - 1}] = doc.number("chain", alt);
    }
  std::vector<double> det(n - 1, 0.1), amp(n - 1, 0.0);
  if (doc.has("chain", "detunings")) det = doc.array("chain", "detunings");
  if (doc.has("chain", "amplitudes")) amp = doc.array("chain", "amplitudes");
  if (det.size() != n - 1) doc.fail("chain", "detunings", "needs N - 1 entries");
  if (amp.size() != n - 1) doc.fail("chain", "amplitudes", "needs N - 1 entries");
  for (size_t j = 0; j + 1 < n; ++j) c.drives.push_back({amp[j], det[j]});
  c.res_dim = doc.integer("chain", "res_dim", c.res_dim);
  checked(doc, "chain", "omega", [&] { c.validate(); });
  return c;
}

CRConfig cr_from_config(const ConfigDocument &doc) {
  CRConfig c;
  c.flavor = parse_flavor(doc.string("cr", "flavor", "zero"));
  const std::string drag = doc.string("cr", "drag", "cancel");
  if (drag == "none") c.drag = DragPlacement::None;
  else if (drag == "cancel") c.drag = DragPlacement::Cancel;
  else if (drag == "both") c.drag = DragPlacement::Both;
  else doc.fail("cr", "drag", "must be none, cancel or both");
  c.optimize = doc.boolean("cr", "optimize", false);
  c.restarts = doc.integer("cr", "restarts", c.restarts);
  c.max_evals = doc.integer("cr", "max_evals", c.max_evals);
  if (c.restarts < 1) doc.fail("cr", "restarts", "must be at least 1");
  if (c.max_evals < 1) doc.fail("cr", "max_evals", "must be at least 1");
  if (doc.has_table("pulse.cr")) {
    if (doc.string("pulse.cr", "kind", "truncated_gaussian") != "truncated_gaussian")
      doc.fail("pulse.cr", "kind", "CR tones are truncated Gaussians");
    if (doc.has("pulse.cr", "duration")) c.duration = doc.number("pulse.cr", "duration");
    if (doc.has("pulse.cr", "amplitude")) c.cr_peak = doc.number("pulse.cr", "amplitude");
    if (doc.has("pulse.cr", "carrier")) c.drive_freq = doc.number("pulse.cr", "carrier");
  }
  if (doc.has_table("pulse.cancel")) {
    if (doc.string("pulse.cancel", "kind", "truncated_gaussian") != "truncated_gaussian")
      doc.fail("pulse.cancel", "kind", "CR tones are truncated Gaussians");
    if (doc.has("pulse.cancel", "amplitude")) c.cancel_peak = doc.number("pulse.cancel", "amplitude");
    c.cancel_phase = doc.number("pulse.cancel", "phase", 0.0);
  }
  if (!(c.duration > 0)) doc.fail("pulse.cr", "duration", "must be positive");
  return c;
}

CZConfig cz_from_config(const ConfigDocument &doc) {
  CZConfig c;
  c.exponent = doc.integer("cz", "exponent", c.exponent);
  if (c.exponent < 2 || c.exponent % 2) doc.fail("cz", "exponent", "must be a positive even integer");
  if (doc.has("cz", "duration")) {
    c.duration = doc.number("cz", "duration");
    if (!(*c.duration > 0)) doc.fail("cz", "duration", "must be positive");
  }
  return c;
}

ScanConfig scan_from_config(const ConfigDocument &doc) {
  ScanConfig s;
  s.dmax = doc.number("scan", "dmax", s.dmax);
  s.points = doc.integer("scan", "points", s.points);
  s.exact_oracle = doc.boolean("scan", "exact_oracle", s.exact_oracle);
  if (!(s.dmax > 0)) doc.fail("scan", "dmax", "must be positive");
  if (s.points < 2) doc.fail("scan", "points", "must be at least 2");
  return s;
}

GridConfig grid_from_config(const ConfigDocument &doc) {
  auto axis = [&](const std::string &p, double lo_def, double hi_def) {
    const double lo = doc.number("grid", p + "_min", lo_def), hi = doc.number("grid", p + "_max", hi_def);
    const int n = doc.integer("grid", p + "_points", 21);
    if (n < 2) doc.fail("grid", p + "_points", "must be at least 2");
    if (!(hi > lo)) doc.fail("grid", p + "_max", "must exceed the minimum");
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = lo + (hi - lo) * k / (n - 1);
    return out;
  };
  return {axis("d1", 0.0, 0.4), axis("d2", 0.0, 0.4)};
}

}  // namespace zzfree
