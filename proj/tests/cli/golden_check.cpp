// Copyright 2026 The sivsim Authors
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

// golden_check: compare a run directory against a golden file.
//
//   golden_check <run_dir> <golden.json>           compare
//   golden_check --update <run_dir> <golden.json>  rewrite the golden
//
// Golden layout:
//   { "tolerance": {"rel": r, "abs": a}, "experiment": ..., "csv": name,
//     "csv_header": ..., "csv_rows": n, "flagged": b, "results": {...} }
// Every number in "results" must match within abs + rel * |expected|;
// keys absent from the golden are ignored so summaries may grow.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using Json = nlohmann::ordered_json;

namespace {

struct Tolerance {
  double rel = 1e-6;
  double abs = 1e-9;
};

int g_mismatches = 0;

void mismatch(const std::string& path, const std::string& what) {
  std::fprintf(stderr, "golden mismatch at %s: %s\n", path.c_str(), what.c_str());
  ++g_mismatches;
}

std::string show(const Json& j) { return j.dump(); }

void compare(const Json& expected, const Json& actual, const std::string& path, const Tolerance& tol) {
  if (expected.is_number()) {
    if (!actual.is_number()) return mismatch(path, "expected number " + show(expected) + ", got " + show(actual));
    const double e = expected.get<double>(), a = actual.get<double>();
    if (!(std::abs(a - e) <= tol.abs + tol.rel * std::abs(e)))
      mismatch(path, "expected " + show(expected) + ", got " + show(actual));
    return;
  }
  if (expected.is_object()) {
    if (!actual.is_object()) return mismatch(path, "expected an object");
    for (const auto& [k, v] : expected.items()) {
      if (!actual.contains(k)) {
        mismatch(path + "." + k, "missing");
        continue;
      }
      compare(v, actual[k], path + "." + k, tol);
    }
    return;
  }
  if (expected.is_array()) {
    if (!actual.is_array() || actual.size() != expected.size())
      return mismatch(path, "array length differs");
    for (std::size_t i = 0; i < expected.size(); ++i) compare(expected[i], actual[i], path + "[" + std::to_string(i) + "]", tol);
    return;
  }
  if (expected != actual) mismatch(path, "expected " + show(expected) + ", got " + show(actual));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Csv {
  std::string header;
  std::size_t rows = 0;
};

Csv read_csv(const std::string& path) {
  std::istringstream in(slurp(path));
  Csv c;
  std::getline(in, c.header);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++c.rows;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const bool update = argc == 4 && std::string(argv[1]) == "--update";
  if (argc != 3 && !update) {
    std::fprintf(stderr, "usage: golden_check [--update] <run_dir> <golden.json>\n");
    return 2;
  }
  const std::string run_dir = argv[update ? 2 : 1];
  const std::string golden_path = argv[update ? 3 : 2];
  try {
    const Json summary = Json::parse(slurp(run_dir + "/summary.json"));
    if (update) {
      Json g = Json::object();
      Json old = Json::object();
      if (std::ifstream(golden_path)) old = Json::parse(slurp(golden_path));
      g["tolerance"] = old.contains("tolerance") ? old["tolerance"] : Json{{"rel", 1e-6}, {"abs", 1e-9}};
      g["experiment"] = summary["experiment"];
      const std::string csv = summary["experiment"] == "sweep" ? "sweep.csv"
                                                               : summary["experiment"].get<std::string>() + ".csv";
      const Csv c = read_csv(run_dir + "/" + csv);
      g["csv"] = csv;
      g["csv_header"] = c.header;
      g["csv_rows"] = c.rows;
      g["flagged"] = summary["flagged"];
      g["results"] = summary["results"];
      std::ofstream(golden_path) << g.dump(2) << "\n";
      std::printf("updated %s\n", golden_path.c_str());
      return 0;
    }

    const Json golden = Json::parse(slurp(golden_path));
    Tolerance tol;
    if (golden.contains("tolerance")) {
      tol.rel = golden["tolerance"].value("rel", tol.rel);
      tol.abs = golden["tolerance"].value("abs", tol.abs);
    }
    if (summary["schema"] != "sivsim.summary/1") mismatch("schema", "unexpected summary schema " + show(summary["schema"]));
    compare(golden["experiment"], summary["experiment"], "experiment", tol);
    compare(golden["flagged"], summary["flagged"], "flagged", tol);
    const Csv c = read_csv(run_dir + "/" + golden["csv"].get<std::string>());
    if (c.header != golden["csv_header"].get<std::string>()) mismatch("csv_header", c.header);
    if (c.rows != golden["csv_rows"].get<std::size_t>()) mismatch("csv_rows", std::to_string(c.rows));
    compare(golden["results"], summary["results"], "results", tol);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "golden_check: %s\n", e.what());
    return 2;
  }
  if (g_mismatches) {
    std::fprintf(stderr, "%d golden mismatch(es)\n", g_mismatches);
    return 1;
  }
  std::printf("golden ok: %s\n", golden_path.c_str());
  return 0;
}
