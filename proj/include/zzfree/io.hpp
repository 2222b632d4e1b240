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

#ifndef ZZFREE_IO_HPP
#define ZZFREE_IO_HPP

#include <string>
#include <vector>

#include "json.hpp"

namespace zzfree {

// nlohmann::json keeps object keys in a std::map, so dumps are key-sorted.
using Json = nlohmann::json;

// Writes to a sibling temporary file, then renames it over `path`.
void write_atomic(const std::string &path, const std::string &content);

// Two-space indented JSON with a trailing newline; non-finite numbers
// become null.
std::string dump_json(const Json &j);

// 12 significant digits, no locale.
std::string format_number(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double> &row);
  size_t rows() const { return rows_.size(); }
  // Comma separated, header row first, LF line endings.
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace zzfree

#endif
