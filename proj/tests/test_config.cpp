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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zzfree/config.hpp"
#include "zzfree/io.hpp"

using namespace zzfree;
namespace fs = std::filesystem;

namespace {

ConfigError parse_error(const std::string &text) {
  try {
    ConfigDocument::parse(text, "t.toml");
  } catch (const ConfigError &e) {
    return e;
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ConfigError("", 0, 0, "");
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Parser, ValuesAndComments) {
  const auto doc = ConfigDocument::parse(
      "# header\n[drive]\ndetuning = 0.12  # GHz\n\n[cr]\nflavor = \"one\"\noptimize = true\n"
      "[chain]\nomega = [4.0, 5.0, 6.0]\n");
  EXPECT_EQ(doc.number("drive", "detuning"), 0.12);
  EXPECT_EQ(doc.string("cr", "flavor", "zero"), "one");
  EXPECT_TRUE(doc.boolean("cr", "optimize", false));
  EXPECT_EQ(doc.array("chain", "omega"), (std::vector<double>{4.0, 5.0, 6.0}));
  EXPECT_EQ(doc.number("drive", "amplitude", 0.3), 0.3);
  EXPECT_FALSE(doc.has("drive", "amplitude"));
}

TEST(Parser, MalformedNumberReportsLineAndColumn) {
  const ConfigError e = parse_error("[drive]\n\ndetuning = 0.1x\n");
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.column(), 12);
  EXPECT_NE(std::string(e.what()).find("t.toml:3:12"), std::string::npos);
}

TEST(Parser, UnknownKeyAndTable) {
  const ConfigError k = parse_error("[drive]\ndetuning = 0.1\nstrength = 2\n");
  EXPECT_EQ(k.line(), 3);
  EXPECT_EQ(k.column(), 1);
  const ConfigError t = parse_error("[drive]\n[bogus]\n");
  EXPECT_EQ(t.line(), 2);
}

TEST(Parser, StructuralErrors) {
  EXPECT_EQ(parse_error("[drive\n").line(), 1);
  EXPECT_EQ(parse_error("[drive]\ndetuning = 0.1\ndetuning = 0.2\n").line(), 3);
  EXPECT_EQ(parse_error("[cr]\nflavor = \"zero\n").line(), 2);
  EXPECT_EQ(parse_error("[chain]\nomega = [1.0, 2.0\n").line(), 2);
}

TEST(Parser, TypeMismatchPointsAtTheValue) {
  const auto doc = ConfigDocument::parse("[drive]\ndetuning = \"fast\"\n", "t.toml");
  try {
    doc.number("drive", "detuning");
    FAIL();
  } catch (const ConfigError &e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Schema, BuildersValidateRanges) {
  const auto bad_dt = ConfigDocument::parse("[sim]\ndt = -0.1\n", "t.toml");
  EXPECT_THROW(sim_from_config(bad_dt), ValidationError);
  const auto bad_integ = ConfigDocument::parse("[sim]\nintegrator = \"euler\"\n", "t.toml");
  EXPECT_THROW(sim_from_config(bad_integ), ConfigError);
  const auto bad_flavor = ConfigDocument::parse("[cr]\nflavor = \"two\"\n", "t.toml");
  EXPECT_THROW(cr_from_config(bad_flavor), ValidationError);
}

TEST(Presets, AllParseAndBuild) {
  const auto names = preset_names();
  for (const char *want : {"fig2", "fig3", "fig4", "appendix-a"})
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
  for (const auto &n : names) {
    const auto text = preset_text(n);
    ASSERT_TRUE(text) << n;
    const auto doc = ConfigDocument::parse(*text, n);
    if (doc.has_table("chain")) {
      EXPECT_EQ(chain_from_config(doc).size(), 3);
    } else {
      EXPECT_NO_THROW(circuit_from_config(doc)) << n;
      EXPECT_NO_THROW(sim_from_config(doc)) << n;
    }
  }
  EXPECT_FALSE(preset_text("fig9"));
}

TEST(Output, NumbersUseTwelveSignificantDigits) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(6.02214076e23), "6.02214076e+23");
}

TEST(Output, CsvHeaderAndLineEndings) {
  CsvTable t({"D_GHz", "zz_GHz"});
  t.add_row({0.1, -5.7e-3});
  t.add_row({0.2, 2.0 / 3.0});
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.str(), "D_GHz,zz_GHz\n0.1,-0.0057\n0.2,0.666666666667\n");
  EXPECT_THROW(t.add_row({1.0}), ValidationError);
}

TEST(Output, JsonKeysAreSorted) {
  Json j;
  j["zeta"] = 1;
  j["alpha"] = 2.5;
  j["mid"] = std::nan("");
  const std::string s = dump_json(j);
  EXPECT_LT(s.find("alpha"), s.find("mid"));
  EXPECT_LT(s.find("mid"), s.find("zeta"));
  EXPECT_NE(s.find("null"), std::string::npos);
  EXPECT_EQ(s.back(), '\n');
}

TEST(Output, AtomicWriteReplacesWholeFile) {
  const fs::path dir = fs::temp_directory_path() / "zzfree_io_test" / "nested";
  fs::remove_all(dir.parent_path());
  const fs::path f = dir / "out.json";
  write_atomic(f.string(), "first version\n");
  write_atomic(f.string(), "second\n");
  EXPECT_EQ(slurp(f), "second\n");
  for (const auto &e : fs::directory_iterator(dir)) EXPECT_EQ(e.path().filename(), "out.json");
  fs::remove_all(dir.parent_path());
}
