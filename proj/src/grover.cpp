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

#include "qtopo/grover.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "qtopo/error.hpp"

namespace qtopo::grover {

namespace {

constexpr double kGrowth = 6.0 / 5.0;

bool is_marked(const ThetaTable& thetas, qsim::Index x, double theta0) {
  const auto it = thetas.find(x);
  QTOPO_REQUIRE(it != thetas.end(), ContractViolation,
                "no phase recorded for configuration " + std::to_string(x));
  return it->second < theta0;
}

}  // namespace

void SearchParams::validate(int n_el) const {
  QTOPO_REQUIRE(theta0 >= 0.25 && theta0 <= 0.5, ConfigError,
                "theta0 must lie in [0.25, 0.5]");
  QTOPO_REQUIRE(!volume_k || (*volume_k >= 0 && *volume_k <= n_el),
                ConfigError, "volume_k must lie in [0, n_el]");
  QTOPO_REQUIRE(!r || *r >= 0, ConfigError, "r must be non-negative");
  QTOPO_REQUIRE(n_p >= 2 && n_p <= 20, ConfigError, "n_p must lie in [2, 20]");
}

ThetaTable theta_table(const std::vector<fem::ThetaRow>& rows) {
  ThetaTable t;
  for (const auto& r : rows) t.emplace(r.config.index(), r.theta);
  return t;
}

int iteration_count(std::uint64_t n, std::uint64_t m) {
  QTOPO_REQUIRE(n > 0 && m > 0 && m <= n, ConfigError,
                "iteration_count needs 0 < M <= N");
  const double a = std::asin(std::sqrt(static_cast<double>(m) / n));
  return static_cast<int>(std::floor(std::numbers::pi / (4.0 * a) - 0.5));
}

std::vector<qsim::Index> search_support(int n_el,
                                        std::optional<int> volume_k) {
  QTOPO_REQUIRE(n_el >= 1 && n_el <= 24, GuardViolation,
                "search register limited to 24 qubits");
  std::vector<qsim::Index> out;
  const qsim::Index n = qsim::Index{1} << n_el;
  for (qsim::Index x = 0; x < n; ++x)
    if (!volume_k || std::popcount(x) == *volume_k) out.push_back(x);
  return out;
}

qsim::Operator exact_phase_oracle(const ThetaTable& thetas, double theta0,
                                  const qsim::Register& c,
                                  const std::vector<qsim::Index>& support) {
  std::vector<qsim::Amplitude> phases(std::size_t{1} << c.width, 1.0);
  for (qsim::Index x : support)
    if (is_marked(thetas, x, theta0)) phases[x] = -1.0;
  return qsim::Operator::diagonal(c.qubits(), std::move(phases));
}

bool comparator_marks(qsim::Index p, int n_p, double theta0) {
  const qsim::Index n = qsim::Index{1} << n_p;
  QTOPO_REQUIRE(p < n, ContractViolation, "phase index out of range");
  const double folded = static_cast<double>(std::min(p, n - p));
  return folded / static_cast<double>(n) < theta0;
}

qsim::Circuit coherent_oracle(const fem::MbbDomain& domain,
                              const SearchParams& params,
                              const CoherentSetup& setup,
                              const qsim::RegisterLayout& layout,
                              const std::vector<qsim::Index>& support) {
  QTOPO_REQUIRE(setup.beta > 0.0, ConfigError,
                "coherent oracle needs the scaling constant beta");
  std::vector<fem::StructureConfig> configs;
  configs.reserve(support.size());
  for (qsim::Index x : support)
    configs.push_back(fem::StructureConfig::from_index(x, domain.n_el()));

  const auto u_sel = qae::selected_inverse(domain, configs, setup.beta,
                                           setup.filter, layout);
  const auto a = qae::hadamard_test_operator(
      u_sel, layout, qae::force_state(domain, layout["d"].width));
  return oracle_from_preparation(a, layout, params.theta0);
}

qsim::Circuit oracle_from_preparation(const qsim::Circuit& a,
                                      const qsim::RegisterLayout& layout,
                                      double theta0) {
  const qsim::Circuit c = qae::qae_circuit(a, layout);

  // U_<: g ^= [p is marked] on targets (p..., g).
  const auto& p = layout["p"];
  auto targets = p.qubits();
  targets.push_back(layout["g"].qubit(0));
  const qsim::Index np = qsim::Index{1} << p.width;
  std::vector<qsim::Index> table(2 * np);
  for (qsim::Index g = 0; g < 2; ++g)
    for (qsim::Index v = 0; v < np; ++v) {
      const qsim::Index flip = comparator_marks(v, p.width, theta0) ? 1 : 0;
      table[v + g * np] = v + ((g ^ flip) * np);
    }
  const auto u_less = qsim::Operator::permutation(targets, std::move(table));

  qsim::Circuit oracle;
  oracle.append(c);
  oracle.append(u_less);
  oracle.append(qsim::pauli_z(layout["g"].qubit(0)));
  oracle.append(u_less.adjoint());
  oracle.append(c.adjoint());
  return oracle;
}

qsim::Circuit rotation_preparation(const ThetaTable& thetas,
                                   const qsim::RegisterLayout& layout) {
  std::map<qsim::Index, Eigen::MatrixXcd> blocks;
  for (const auto& [x, theta] : thetas) {
    const double a = std::numbers::pi * theta;
    Eigen::MatrixXcd r(2, 2);
    r << std::sin(a), -std::cos(a), std::cos(a), std::sin(a);
    blocks.emplace(x, r);
  }
  qsim::Circuit out;
  out.append(qsim::Operator::select(layout["c"].qubits(),
                                    {layout["h"].qubit(0)}, std::move(blocks)));
  return out;
}

Eigen::VectorXcd initial_state(int n_el, std::optional<int> volume_k) {
  if (volume_k) return qsim::dicke_vector(n_el, *volume_k);
  const Eigen::Index n = Eigen::Index{1} << n_el;
  return Eigen::VectorXcd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
}

qsim::Operator diffusion(std::optional<int> volume_k, const qsim::Register& c) {
  return qsim::Operator::reflection(c.qubits(),
                                    initial_state(c.width, volume_k));
}

SearchResult run_grover(
    const fem::MbbDomain& domain, const SearchParams& params,
    const ThetaTable& thetas, const CoherentSetup& setup,
    const std::function<void(const qsim::QuantumState&)>& on_final) {
  const int n_el = domain.n_el();
  params.validate(n_el);
  const auto support = search_support(n_el, params.volume_k);

  SearchResult res;
  for (qsim::Index x : support)
    if (is_marked(thetas, x, params.theta0))
      res.marked_set.push_back(fem::StructureConfig::from_index(x, n_el));

  if (params.r) {
    res.r_used = *params.r;
  } else {
    res.r_used = res.marked_set.empty()
                     ? 0
                     : iteration_count(support.size(), res.marked_set.size());
  }

  const bool coherent = params.oracle_backend == OracleBackend::kCoherentQae;
  const qsim::RegisterLayout layout =
      coherent ? qae::coherent_layout(domain, params.n_p, true)
               : qsim::RegisterLayout{{"c", n_el}};
  const auto& c = layout["c"];

  qsim::Circuit round;
  if (coherent)
    round.append(coherent_oracle(domain, params, setup, layout, support));
  else
    round.append(exact_phase_oracle(thetas, params.theta0, c, support));
  round.append(diffusion(params.volume_k, c));

  qsim::QuantumState state(layout);
  if (params.volume_k) {
    qsim::prepare_dicke(state, "c", *params.volume_k);
  } else {
    for (int q : c.qubits()) qsim::apply(state, qsim::hadamard(q));
  }
  for (int i = 0; i < res.r_used; ++i) qsim::apply(state, round);
  if (on_final) on_final(state);

  res.distribution = qsim::measure_distribution(state, "c");
  for (const auto& m : res.marked_set)
    res.success_probability += res.distribution[m.index()];
  return res;
}

MinimizeResult minimize_compliance(const fem::MbbDomain& domain,
                                   const SearchParams& params,
                                   std::uint64_t seed,
                                   const ThetaTable& thetas,
                                   const CoherentSetup& setup) {
  const int n_el = domain.n_el();
  params.validate(n_el);
  const auto support = search_support(n_el, params.volume_k);
  QTOPO_REQUIRE(!support.empty(), ConfigError, "empty search support");
  const double sqrt_n = std::sqrt(static_cast<double>(support.size()));
  const int level_samples = 10 * static_cast<int>(std::ceil(sqrt_n)) + 20;
  const double step = std::ldexp(1.0, -params.n_p);

  std::mt19937_64 rng(seed);
  MinimizeResult out;
  double threshold = params.theta0;

  // Distributions depend only on (threshold, r); cache them per level.
  std::map<int, std::vector<double>> cache;
  auto distribution = [&](int r) -> const std::vector<double>& {
    auto it = cache.find(r);
    if (it != cache.end()) return it->second;
    SearchParams p = params;
    p.theta0 = threshold;
    p.r = r;
    return cache.emplace(r, run_grover(domain, p, thetas, setup).distribution)
        .first->second;
  };

  while (true) {
    cache.clear();
    DescentStep level;
    level.threshold = threshold;
    double m = 1.0;
    for (int s = 0; s < level_samples; ++s) {
      std::uniform_int_distribution<int> pick(
          0, std::max(0, static_cast<int>(std::ceil(m)) - 1));
      const int r = pick(rng);
      const auto& probs = distribution(r);
      const qsim::Index x = qsim::sample(probs, 1, rng).front();
      ++level.samples;
      level.iterations += r;
      m = std::min(kGrowth * m, sqrt_n);
      const auto it = thetas.find(x);
      if (it != thetas.end() && it->second < threshold) {
        level.found = fem::StructureConfig::from_index(x, n_el);
        level.found_theta = it->second;
        break;
      }
    }
    out.total_iterations += level.iterations;
    out.trace.push_back(level);
    if (!level.found) break;
    out.best = level.found;
    out.best_theta = level.found_theta;
    threshold = *level.found_theta - step;
    if (threshold < 0.25) break;  // no phase of a PSD filter lies below 1/4
  }
  out.budget_exhausted = !out.best.has_value();
  return out;
}

}  // namespace qtopo::grover
