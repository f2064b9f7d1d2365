// Copyright 2026 The qtopo Authors
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

// Runs the qtopo binary named by $QTOPO_BIN.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtopo/error.hpp"
#include "qtopo/experiments.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() /
             ("qtopo_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run_qtopo(const std::string& args, const std::string& env = "") {
  const char* bin = std::getenv("QTOPO_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "QTOPO_BIN is not set");
  const auto out = scratch() / "stdout.txt";
  const auto err = scratch() / "stderr.txt";
  const std::string cmd = env + " '" + bin + "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("exit codes and machine-readable errors") {
  const auto bad_flag = run_qtopo("quantum grover --bogus 1");
  CHECK(bad_flag.code == 2);
  const auto e = json::parse(bad_flag.err);
  CHECK(e["error"] == "ConfigError");
  CHECK(e["exit_code"] == 2);

  CHECK(run_qtopo("quantum grover --theta0 0.1").code == 2);
  CHECK(run_qtopo("poly fit --mu 2").code == 2);
  CHECK(run_qtopo("").code == 2);

  const auto guard = run_qtopo("mbb enumerate --nx 5 --ny 5");
  CHECK(guard.code == 3);
  CHECK(json::parse(guard.err)["error"] == "GuardViolation");

  const auto budget = run_qtopo("quantum minimize --theta0 0.25");
  CHECK(budget.code == 4);
  CHECK(json::parse(budget.err)["error"] == "BudgetExhausted");

  const auto missing = run_qtopo("quantum grover --config /nonexistent/cfg.json");
  CHECK(missing.code == 2);
}

TEST_CASE("unknown config keys are rejected") {
  const auto path = scratch() / "bad.json";
  std::ofstream(path) << R"({"search": {"theta_zero": 0.3}})";
  CHECK(run_qtopo("quantum grover --config '" + path.string() + "'").code == 2);
}

TEST_CASE("config files override flags") {
  const auto path = scratch() / "override.json";
  std::ofstream(path) << R"({"search": {"theta0": 0.255}})";
  const auto r =
      run_qtopo("quantum grover --theta0 0.3 --config '" + path.string() + "'");
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["config"]["search"]["theta0"] == 0.255);
  CHECK(j["marked_set"].size() == 2);
}

TEST_CASE("config JSON round trip") {
  for (const auto& name : qtopo::cli::experiment_names()) {
    const auto c = qtopo::cli::default_config(name);
    const auto j = qtopo::cli::to_json(c);
    CHECK(qtopo::cli::to_json(qtopo::cli::config_from_json(j)) == j);
  }
  CHECK_THROWS_AS(qtopo::cli::default_config("fig99"), qtopo::ConfigError);
}

TEST_CASE("fig11 report") {
  const auto dir = scratch() / "fig11";
  const auto r = run_qtopo("quantum grover --preset fig11 --out '" + dir.string() + "'");
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(slurp(dir / "data.csv"));
  REQUIRE(rows.size() == 17);
  CHECK(rows[0] == std::vector<std::string>{"rank", "config", "probability",
                                            "theta", "marked", "feasible"});
  std::set<std::string> top3;
  for (int i = 1; i <= 3; ++i) {
    top3.insert(rows[i][1]);
    CHECK(rows[i][5] == "1");
  }
  CHECK(top3 == std::set<std::string>{"1011", "1101", "1111"});

  const auto j = json::parse(slurp(dir / "report.json"));
  CHECK(j["config"]["qae"]["n_p"] == 8);
  CHECK(j["r_used"] == 1);
  CHECK(std::abs(j["success_probability"].get<double>() - 0.9494) <= 1e-3);
  for (const char* k : {"delta", "beta", "gamma", "alpha_eff"})
    CHECK(j["scaling"][k].get<double>() > 0.0);
}

TEST_CASE("fig12 report") {
  const auto r = run_qtopo("quantum grover --preset fig12");
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["config"]["domain"]["n_x"] == 3);
  CHECK(j["config"]["qae"]["n_p"] == 9);
  CHECK(j["distribution"].size() == 126);
  for (int i = 0; i < 8; ++i) CHECK(j["distribution"][i]["feasible"] == true);
  for (int i = 8; i < 126; ++i) CHECK(j["distribution"][i]["feasible"] == false);
  CHECK(std::abs(j["success_probability"].get<double>() - 0.9144) <= 1e-3);
}

TEST_CASE("fig15 scan") {
  const auto dir = scratch() / "fig15";
  const auto r = run_qtopo("poly scan --preset fig15 --out '" + dir.string() + "'");
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(slurp(dir / "data.csv"));
  CHECK(rows.size() == 13);
  CHECK(rows[0][0] == "mu");
  const auto j = json::parse(slurp(dir / "report.json"));
  for (const auto& s : j["summary"]["degree_times_mu"])
    CHECK(s["max_over_min"].get<double>() <= 1.3);
  for (const auto& s : j["summary"]["degree_vs_eps"])
    CHECK(s["monotone_in_log_inv_eps"] == true);
}

TEST_CASE("resources") {
  const auto a = json::parse(run_qtopo("resources registers --np 5").out);
  const auto& r2 = a["resources"]["registers"];
  CHECK(r2["c"] == 4);
  CHECK(r2["l"] == 2);
  CHECK(r2["d"] == 5);
  CHECK(r2["p"] == 5);
  CHECK(a["resources"]["singles_count"] == 6);

  const auto b =
      json::parse(run_qtopo("resources registers --nx 3 --ny 3 --np 9").out);
  const auto& r3 = b["resources"]["registers"];
  CHECK(r3["c"] == 9);
  CHECK(r3["l"] == 4);
  CHECK(r3["d"] == 5);
  CHECK(b["resources"]["n_dof"] == 32);
  CHECK(b["resources"]["singles_count"] == 6);
}

TEST_CASE("reports are byte-stable") {
  for (const std::string cmd :
       {"quantum grover --preset fig11", "quantum minimize --seed 7",
        "mbb fig9b", "quantum compliance --np 5"}) {
    const auto dir = scratch() / "stable";
    REQUIRE(run_qtopo(cmd + " --out '" + dir.string() + "'").code == 0);
    const auto report = slurp(dir / "report.json");
    const auto csv = slurp(dir / "data.csv");
    REQUIRE(run_qtopo(cmd + " --out '" + dir.string() + "'").code == 0);
    CHECK_MESSAGE(slurp(dir / "report.json") == report, cmd);
    CHECK_MESSAGE(slurp(dir / "data.csv") == csv, cmd);
  }
}

TEST_CASE("every report embeds the resolved config") {
  const auto j = json::parse(run_qtopo("mbb enumerate").out);
  CHECK(j["config"]["experiment"] == "mbb");
  CHECK(j.contains("scaling"));
  const auto p = json::parse(run_qtopo("poly fit").out);
  CHECK(p["config"]["experiment"] == "poly");
}

TEST_CASE("statevector dump is gated by the environment") {
  const auto path = scratch() / "sv.csv";
  fs::remove(path);
  CHECK(run_qtopo("quantum grover --emit-statevector '" + path.string() + "'").code ==
        2);
  CHECK_FALSE(fs::exists(path));
  const auto r = run_qtopo("quantum grover --emit-statevector '" + path.string() + "'",
                       "QTOPO_ALLOW_STATEVECTOR_DUMP=1");
  CHECK(r.code == 0);
  const auto rows = csv_rows(slurp(path));
  CHECK(rows.size() == 17);
  CHECK(rows[0] == std::vector<std::string>{"index", "real", "imag"});
}

TEST_CASE("minimize matches brute force") {
  const auto j = json::parse(run_qtopo("quantum minimize").out);
  CHECK(j["matches_bruteforce"] == true);
  CHECK(j["best"]["bits"] == "1111");
}

TEST_CASE("cleanup") { fs::remove_all(scratch()); }
