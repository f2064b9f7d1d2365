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

// qtopo <group> <command> [--flag value]
//
// Exit codes: 0 success, 2 config error, 3 guard violation, 4 budget
// exhaustion, 1 anything else. Errors are reported as one JSON object on
// stderr.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtopo/error.hpp"
#include "qtopo/experiments.hpp"

namespace {

using nlohmann::json;

constexpr const char* kDumpEnv = "QTOPO_ALLOW_STATEVECTOR_DUMP";

struct Flags {
  std::string config_path;
  std::string out_dir;
  std::string statevector;
  std::string preset;
  std::uint64_t seed = 0;
  int n_x = 0, n_y = 0, n_p = 0, volume_k = 0, r = 0;
  double young = 0, nu = 0, mu = 0, y0 = 0, eps = 0, theta0 = 0;
  std::string mode, backend, bits, oracle;
};

struct Command {
  CLI::App* app = nullptr;
  std::string experiment;
};

void add_domain(CLI::App* c, Flags& f) {
  c->add_option("--nx", f.n_x, "Elements along x");
  c->add_option("--ny", f.n_y, "Elements along y");
  c->add_option("--young", f.young, "Young's modulus");
  c->add_option("--nu", f.nu, "Poisson ratio");
}

void add_poly(CLI::App* c, Flags& f) {
  c->add_option("--mu", f.mu, "Smallest accurately inverted singular value");
  c->add_option("--y0", f.y0, "Filter value at mu");
  c->add_option("--eps", f.eps, "Approximation tolerance");
  c->add_option("--mode", f.mode, "exact | polynomial | polynomial-chop");
}

void add_search(CLI::App* c, Flags& f) {
  c->add_option("--theta0", f.theta0, "Phase threshold");
  c->add_option("--volume-k", f.volume_k, "Dicke Hamming weight");
  c->add_option("--r", f.r, "Grover iterations (default: optimal)");
  c->add_option("--np", f.n_p, "Phase register qubits");
  c->add_option("--oracle", f.oracle, "exact_phase | coherent_qae");
}

void add_common(CLI::App* c, Flags& f) {
  c->add_option("--config", f.config_path,
                "JSON experiment config; overrides flags");
  c->add_option("--seed", f.seed, "Random seed")->default_val(0);
  c->add_option("--out", f.out_dir, "Directory for report.json and data.csv");
}

// Patch built from the flags that were given explicitly.
json flag_patch(const CLI::App* c, const Flags& f) {
  json p = json::object();
  auto given = [c](const char* name) {
    try {
      return c->get_option(name)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  if (given("--nx")) p["domain"]["n_x"] = f.n_x;
  if (given("--ny")) p["domain"]["n_y"] = f.n_y;
  if (given("--young")) p["domain"]["young_modulus"] = f.young;
  if (given("--nu")) p["domain"]["poisson_ratio"] = f.nu;
  if (given("--mu")) p["poly"]["mu"] = f.mu;
  if (given("--y0")) p["poly"]["y0"] = f.y0;
  if (given("--eps")) p["poly"]["eps"] = f.eps;
  if (given("--mode")) p["poly"]["mode"] = f.mode;
  if (given("--np")) p["qae"]["n_p"] = f.n_p;
  if (given("--backend")) p["qae"]["backend"] = f.backend;
  if (given("--bits")) p["qae"]["config"] = f.bits;
  if (given("--theta0")) p["search"]["theta0"] = f.theta0;
  if (given("--volume-k")) p["search"]["volume_k"] = f.volume_k;
  if (given("--r")) p["search"]["r"] = f.r;
  if (given("--oracle")) p["search"]["oracle"] = f.oracle;
  if (given("--seed")) p["search"]["seed"] = f.seed;
  return p;
}

int fail(int code, const char* kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}
                   .dump()
            << '\n';
  return code;
}

int run(const Command& cmd, const Flags& f) {
  std::string experiment = cmd.experiment;
  if (!f.preset.empty()) experiment = f.preset;

  json patch = flag_patch(cmd.app, f);
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    QTOPO_REQUIRE(in.good(), qtopo::ConfigError,
                  "cannot read config '" + f.config_path + "'");
    json file;
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw qtopo::ConfigError(std::string("config is not valid JSON: ") +
                               e.what());
    }
    patch.merge_patch(file);
  }
  auto cfg = qtopo::cli::config_from_json(patch, experiment);
  if (!f.out_dir.empty()) {
    std::filesystem::create_directories(f.out_dir);
    const std::filesystem::path dir(f.out_dir);
    cfg.output.report = (dir / "report.json").string();
    cfg.output.csv = (dir / "data.csv").string();
  }

  qtopo::cli::RunHooks hooks;
  if (!f.statevector.empty()) {
    const char* allow = std::getenv(kDumpEnv);
    QTOPO_REQUIRE(allow && std::string(allow) == "1", qtopo::ConfigError,
                  std::string("--emit-statevector needs ") + kDumpEnv + "=1");
    hooks.statevector_path = f.statevector;
  }

  const auto report = qtopo::cli::run_experiment(cfg, hooks);
  if (cfg.output.report.empty())
    std::cout << report.json.dump(2) << '\n';
  qtopo::cli::write_report(report, cfg.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical simulation of quantum topology optimization"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<Command> commands;

  auto command = [&](CLI::App* group, const char* name, const char* help,
                     const char* experiment) {
    CLI::App* c = group->add_subcommand(name, help);
    add_common(c, flags);
    commands.push_back({c, experiment});
    return c;
  };

  auto* mbb = app.add_subcommand("mbb", "Classical FEM oracles");
  mbb->require_subcommand(1);
  add_domain(command(mbb, "enumerate", "Compliance of every configuration",
                     "mbb"),
             flags);
  {
    auto* c = command(mbb, "fig9b", "SIMP vs odd/even QSVT compliance", "fig9b");
    add_domain(c, flags);
    add_poly(c, flags);
  }

  auto* quantum = app.add_subcommand("quantum", "QAE and Grover runs");
  quantum->require_subcommand(1);
  {
    auto* c = command(quantum, "compliance", "QAE phase distribution", "fig10");
    add_domain(c, flags);
    add_poly(c, flags);
    c->add_option("--np", flags.n_p, "Phase register qubits");
    c->add_option("--backend", flags.backend, "emulated | coherent");
    c->add_option("--bits", flags.bits, "Configuration, x_1 first");
  }
  {
    auto* c = command(quantum, "grover", "Grover search over configurations",
                      "fig11");
    add_domain(c, flags);
    add_poly(c, flags);
    add_search(c, flags);
    c->add_option("--preset", flags.preset, "fig11 | fig12")
        ->check(CLI::IsMember({"fig11", "fig12"}));
    c->add_option("--emit-statevector", flags.statevector,
                  std::string("Dump the final state as CSV (needs ") +
                      kDumpEnv + "=1)");
  }
  {
    auto* c = command(quantum, "minimize", "Threshold-descent minimization",
                      "minimize");
    add_domain(c, flags);
    add_poly(c, flags);
    add_search(c, flags);
  }

  auto* poly = app.add_subcommand("poly", "Filter polynomial fits");
  poly->require_subcommand(1);
  add_poly(command(poly, "fit", "Fit one even filter polynomial", "poly"),
           flags);
  {
    auto* c = command(poly, "scan", "Degree scaling scans", "fig15");
    add_poly(c, flags);
    c->add_option("--preset", flags.preset, "fig15 | fig16 | fig17")
        ->check(CLI::IsMember({"fig15", "fig16", "fig17"}));
  }

  auto* verify = app.add_subcommand("verify", "Equivalence suites");
  verify->require_subcommand(1);
  {
    auto* c = command(verify, "all",
                      "Block-encoding equality and oracle equivalence",
                      "verify");
    add_domain(c, flags);
    c->add_option("--np", flags.n_p, "Phase register qubits");
    c->add_option("--theta0", flags.theta0, "Phase threshold");
  }

  auto* res = app.add_subcommand("resources", "Register-size accounting");
  res->require_subcommand(1);
  {
    auto* c = command(res, "registers", "Qubits per register", "resources");
    add_domain(c, flags);
    c->add_option("--np", flags.n_p, "Phase register qubits");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "ConfigError", e.what());
  }

  try {
    for (const auto& cmd : commands)
      if (cmd.app->parsed()) return run(cmd, flags);
    return fail(2, "ConfigError", "no command given");
  } catch (const qtopo::ConfigError& e) {
    return fail(2, "ConfigError", e.what());
  } catch (const qtopo::GuardViolation& e) {
    return fail(3, "GuardViolation", e.what());
  } catch (const qtopo::BudgetExhausted& e) {
    return fail(4, "BudgetExhausted", e.what());
  } catch (const std::exception& e) {
    return fail(1, "InternalError", e.what());
  }
}
