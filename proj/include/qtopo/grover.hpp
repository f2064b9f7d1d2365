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
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "qtopo/fem.hpp"
#include "qtopo/qae.hpp"
#include "qtopo/qsim.hpp"
#include "qtopo/qsvt.hpp"

namespace qtopo::grover {

enum class OracleBackend { kExactPhase, kCoherentQae };

struct SearchParams {
  double theta0 = 0.263;
  std::optional<int> volume_k;
  std::optional<int> r;
  OracleBackend oracle_backend = OracleBackend::kExactPhase;
  int n_p = 5;

  void validate(int n_el) const;
};

/// theta per configuration index.
using ThetaTable = std::map<qsim::Index, double>;

ThetaTable theta_table(const std::vector<fem::ThetaRow>& rows);

struct SearchResult {
  /// Probability per configuration index (length 2^n_el).
  std::vector<double> distribution;
  std::vector<fem::StructureConfig> marked_set;
  int r_used = 0;
  double success_probability = 0.0;
};

/// floor(pi / (4 arcsin sqrt(M/N)) - 1/2).
int iteration_count(std::uint64_t n, std::uint64_t m);

/// Configuration indices of the search support (all, or weight k).
std::vector<qsim::Index> search_support(int n_el, std::optional<int> volume_k);

/// -1 on c = x iff theta(x) < theta0.
qsim::Operator exact_phase_oracle(const ThetaTable& thetas, double theta0,
                                  const qsim::Register& c,
                                  const std::vector<qsim::Index>& support);

/// U_< rule: marked iff min(p, 2^n_p - p) / 2^n_p < theta0.
bool comparator_marks(qsim::Index p, int n_p, double theta0);

/// Everything the coherent oracle needs besides the search parameters.
struct CoherentSetup {
  qsvt::Filter filter;
  double beta = 0.0;
};

/// C, U_<, Z on g, U_<^+, C^+ on the coherent layout (g, p, h, a, d, c).
qsim::Circuit coherent_oracle(const fem::MbbDomain& domain,
                              const SearchParams& params,
                              const CoherentSetup& setup,
                              const qsim::RegisterLayout& layout,
                              const std::vector<qsim::Index>& support);

/// Same composition for an arbitrary preparation A on (h, a, d) that may be
/// controlled by c. Registers g, p, h, a, d must exist in the layout.
qsim::Circuit oracle_from_preparation(const qsim::Circuit& a,
                                      const qsim::RegisterLayout& layout,
                                      double theta0);

/// Preparation with P(h = 0 | c = x) = sin^2(pi theta_x), one rotation on h
/// per configuration value. Used to probe the oracle with chosen phases.
qsim::Circuit rotation_preparation(const ThetaTable& thetas,
                                   const qsim::RegisterLayout& layout);

Eigen::VectorXcd initial_state(int n_el, std::optional<int> volume_k);

/// 2|psi_init><psi_init| - 1 on register c.
qsim::Operator diffusion(std::optional<int> volume_k, const qsim::Register& c);

/// Exact distribution after r rounds of (oracle, diffusion).
/// `on_final`, if set, sees the final state before measurement.
SearchResult run_grover(
    const fem::MbbDomain& domain, const SearchParams& params,
    const ThetaTable& thetas, const CoherentSetup& setup = {},
    const std::function<void(const qsim::QuantumState&)>& on_final = {});

struct DescentStep {
  double threshold = 0.0;
  int samples = 0;
  int iterations = 0;
  std::optional<fem::StructureConfig> found;
  std::optional<double> found_theta;
};

struct MinimizeResult {
  std::optional<fem::StructureConfig> best;
  std::optional<double> best_theta;
  std::vector<DescentStep> trace;
  int total_iterations = 0;
  bool budget_exhausted = false;
};

/// Threshold descent: search below the current threshold with randomly
/// growing iteration counts, move the threshold one phase-grid step below
/// each hit, stop when a level finds nothing.
MinimizeResult minimize_compliance(const fem::MbbDomain& domain,
                                   const SearchParams& params,
                                   std::uint64_t seed,
                                   const ThetaTable& thetas,
                                   const CoherentSetup& setup = {});

}  // namespace qtopo::grover
