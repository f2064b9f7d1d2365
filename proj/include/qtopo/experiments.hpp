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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtopo/fem.hpp"
#include "qtopo/grover.hpp"
#include "qtopo/qae.hpp"
#include "qtopo/qsvt.hpp"

namespace qtopo::cli {

struct DomainSpec {
  int n_x = 2;
  int n_y = 2;
  double young_modulus = 1.0;
  double poisson_ratio = 0.3;
  std::string boundary = "mbb";
};

struct PolyConfig {
  double mu = 1e-3;
  double y0 = 0.3;
  double eps = 1e-3;
  /// exact | polynomial | polynomial-chop
  std::string mode = "exact";
};

struct QaeConfig {
  int n_p = 5;
  /// emulated | coherent
  std::string backend = "emulated";
  /// Configuration analyzed by single-config experiments, x_1 first.
  std::string config = "1111";
};

struct SearchConfig {
  double theta0 = 0.263;
  std::optional<int> volume_k;
  std::optional<int> r;
  std::uint64_t seed = 0;
  /// exact_phase | coherent_qae
  std::string oracle = "exact_phase";
};

struct ScanConfig {
  std::vector<double> mu;
  std::vector<double> eps;
  std::vector<double> y0;
};

struct OutputConfig {
  /// Empty paths are not written.
  std::string report;
  std::string csv;
};

struct ExperimentConfig {
  std::string experiment;
  DomainSpec domain;
  PolyConfig poly;
  QaeConfig qae;
  SearchConfig search;
  ScanConfig scan;
  OutputConfig output;

  void validate() const;
};

/// Names accepted by run_experiment.
const std::vector<std::string>& experiment_names();

/// Preset parameters for an experiment; ConfigError for unknown names.
ExperimentConfig default_config(const std::string& experiment);

nlohmann::json to_json(const ExperimentConfig& config);
/// Overlays `j` on the preset named by j["experiment"] (or `fallback`).
/// Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::string& fallback = "");

fem::MbbDomain make_domain(const DomainSpec& spec);
qsvt::PolySpec make_spec(const PolyConfig& poly);
qsvt::Filter make_filter(const PolyConfig& poly);

/// {"bits": "1011", "grid": ["#.", "##"]}.
nlohmann::json config_json(const fem::StructureConfig& config, int n_y);

struct Report {
  nlohmann::json json;
  std::string csv;
};

struct RunHooks {
  /// Final Grover state is dumped here as CSV (fig11/fig12 only).
  std::string statevector_path;
};

Report run_experiment(const ExperimentConfig& config,
                      const RunHooks& hooks = {});

/// Writes report.json (sorted keys, 2-space indent) and the CSV if the paths
/// are set.
void write_report(const Report& report, const OutputConfig& output);

/// Register sizes for the domain and totals per simulation mode.
nlohmann::json resources(const fem::MbbDomain& domain, int n_p);

}  // namespace qtopo::cli
