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

#include "qtopo/qae.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qtopo/blockenc.hpp"
#include "qtopo/error.hpp"

namespace qtopo::qae {

namespace {

double filter_mu(const qsvt::Filter& filter) {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, qsvt::ExactOdd>)
          return f.mu;
        else
          return f.spec.mu;
      },
      filter);
}

}  // namespace

ScalingConstants compute_scaling(const fem::MbbDomain& domain,
                                 const qsvt::PolySpec& spec) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      fem::element_stiffness(domain.material()).dense());
  ScalingConstants c;
  c.delta = eig.eigenvalues().cwiseAbs().maxCoeff();
  c.beta = domain.n_el() * c.delta;
  c.gamma = spec.y0 * spec.mu;
  return c;
}

double theta_of_t(double t) {
  QTOPO_REQUIRE(t >= -1.0 - 1e-12 && t <= 1.0 + 1e-12, ContractViolation,
                "theta_of_t needs t in [-1, 1], got " + std::to_string(t));
  const double a = std::clamp(0.5 + 0.5 * t, 0.0, 1.0);
  return std::asin(std::sqrt(a)) / std::numbers::pi;
}

FilteredSystem filter_system(const fem::MbbDomain& domain,
                             const fem::StructureConfig& config, double beta,
                             const qsvt::Filter& filter) {
  const fem::SymMatrix kf = fem::reduce_free(
      fem::assemble_global(domain, config), domain.fixed_dofs());
  FilteredSystem out;
  const Eigen::VectorXd f = domain.free_force();
  QTOPO_REQUIRE(f.norm() > 0.0, ConfigError, "load vector is zero on free DoFs");
  out.f_hat = f / f.norm();
  out.filtered = qsvt::apply_qsvt_matrix(kf, beta, filter).dense();
  out.t = out.f_hat.dot(out.filtered * out.f_hat);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kf.dense() / beta);
  const Eigen::VectorXd w = eig.eigenvectors().transpose() * out.f_hat;
  const double mu = filter_mu(filter);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double s = eig.eigenvalues()(i);
    if (std::abs(s) < mu) out.plateau_t += w(i) * w(i) * qsvt::eval_filter(filter, s);
  }
  return out;
}

PhaseRecord phase_of_config(const fem::MbbDomain& domain,
                            const fem::StructureConfig& config,
                            const ScalingConstants& constants,
                            const qsvt::Filter& filter) {
  const FilteredSystem sys =
      filter_system(domain, config, constants.beta, filter);
  PhaseRecord r;
  r.config = config;
  r.t_value = sys.t;
  r.theta = theta_of_t(sys.t);
  r.plateau_share = sys.t != 0.0 ? sys.plateau_t / sys.t : 0.0;
  if (r.plateau_share <= 0.5 && constants.alpha_eff > 0.0)
    r.compliance_estimate = sys.t / constants.alpha_eff;
  return r;
}

double calibrate_alpha(const fem::MbbDomain& domain,
                       const ScalingConstants& constants,
                       const qsvt::Filter& filter) {
  const auto solid = fem::StructureConfig::uniform(domain.n_el(), true);
  const auto c = fem::compliance_direct(domain, solid);
  QTOPO_REQUIRE(c.has_value() && *c > 0.0, ConfigError,
                "calibration needs a feasible all-solid design");
  const double t = filter_system(domain, solid, constants.beta, filter).t;
  QTOPO_REQUIRE(t > 0.0, ConfigError, "calibration produced t <= 0");
  return t / *c;
}

Eigen::MatrixXcd filtered_block(const fem::MbbDomain& domain,
                                const fem::StructureConfig& config,
                                double beta, const qsvt::Filter& filter,
                                int d_width) {
  const auto sys = filter_system(domain, config, beta, filter);
  const auto free = domain.free_dofs();
  const Eigen::Index dim = Eigen::Index{1} << d_width;
  QTOPO_REQUIRE(domain.n_dof() <= dim, ContractViolation,
                "data register too small");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < free.size(); ++i)
    for (std::size_t j = 0; j < free.size(); ++j)
      m(free[i], free[j]) = sys.filtered(i, j);
  return m;
}

Eigen::VectorXcd force_state(const fem::MbbDomain& domain, int d_width) {
  const auto free = domain.free_dofs();
  const Eigen::VectorXd f = domain.free_force();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << d_width);
  for (std::size_t i = 0; i < free.size(); ++i) v(free[i]) = f(i) / f.norm();
  return v;
}

qsim::Circuit hadamard_test_operator(const qsim::Operator& u_sel,
                                     const qsim::RegisterLayout& layout,
                                     const Eigen::VectorXcd& force,
                                     const std::string& h,
                                     const std::string& d) {
  const int hq = layout[h].qubit(0);
  const auto dq = layout[d].qubits();
  QTOPO_REQUIRE(force.size() == (Eigen::Index{1} << dq.size()),
                ContractViolation, "force state size mismatch");
  QTOPO_REQUIRE(std::abs(force.norm() - 1.0) < 1e-10, ContractViolation,
                "force state must be normalized");
  QTOPO_REQUIRE(std::abs(force(0).imag()) < 1e-14, ContractViolation,
                "force state needs a real first entry");

  // Householder reflection taking |0> to the force state.
  const Eigen::Index dim = force.size();
  Eigen::VectorXcd u = -force;
  u(0) += 1.0;
  Eigen::MatrixXcd vf = Eigen::MatrixXcd::Identity(dim, dim);
  if (u.norm() > 1e-14) {
    u.normalize();
    vf -= 2.0 * u * u.adjoint();
  }

  qsim::Circuit a;
  a.append(qsim::hadamard(hq));
  a.append(qsim::Operator::dense(dq, vf));
  a.append(u_sel.controlled(qsim::Control{hq, true}));
  a.append(qsim::hadamard(hq));
  return a;
}

qsim::Circuit grover_operator(const qsim::Circuit& a,
                              const qsim::RegisterLayout& layout) {
  std::vector<int> zero_targets;
  for (const char* name : {"h", "a", "d"})
    for (int q : layout[name].qubits()) zero_targets.push_back(q);
  Eigen::VectorXcd e0 =
      Eigen::VectorXcd::Zero(Eigen::Index{1} << zero_targets.size());
  e0(0) = 1.0;

  qsim::Circuit g;
  g.append(qsim::Operator::diagonal({layout["h"].qubit(0)}, {-1.0, 1.0}));
  g.append(a.adjoint());
  g.append(qsim::Operator::reflection(zero_targets, e0));
  g.append(a);
  return g;
}

qsim::Circuit qae_circuit(const qsim::Circuit& a,
                          const qsim::RegisterLayout& layout,
                          const std::string& p) {
  const auto& reg = layout[p];
  const qsim::Circuit g = grover_operator(a, layout);
  qsim::Circuit c = a;
  for (int q : reg.qubits()) c.append(qsim::hadamard(q));
  for (int j = 0; j < reg.width; ++j) {
    const qsim::Circuit cg = g.controlled(qsim::Control{reg.qubit(j), true});
    for (int rep = 0; rep < (1 << j); ++rep) c.append(cg);
  }
  c.append(qsim::qft(reg).adjoint());
  return c;
}

void QaeParams::validate() const {
  QTOPO_REQUIRE(n_p >= 2 && n_p <= 20, ConfigError,
                "n_p must lie in [2, 20]");
  QTOPO_REQUIRE(constants.beta > 0.0, ConfigError,
                "scaling constants are not set");
}

QaeDistribution emulated_distribution(double theta, int n_p) {
  QTOPO_REQUIRE(n_p >= 1 && n_p <= 30, ConfigError, "bad phase register size");
  const std::size_t n = std::size_t{1} << n_p;
  const double nd = static_cast<double>(n);
  auto fejer = [nd](double delta) {
    const double x = std::numbers::pi * delta;
    const double den = nd * std::sin(x);
    if (std::abs(den) < 1e-13) return 1.0;
    const double r = std::sin(nd * x) / den;
    return r * r;
  };
  QaeDistribution out;
  out.n_p = n_p;
  out.probabilities.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double f = static_cast<double>(p) / nd;
    out.probabilities[p] = 0.5 * (fejer(f - theta) + fejer(f + theta));
  }
  return out;
}

qsim::RegisterLayout coherent_layout(const fem::MbbDomain& domain, int n_p,
                                     bool with_flag) {
  qsim::RegisterLayout layout;
  if (with_flag) layout.add("g", 1);
  layout.add("p", n_p);
  layout.add("h", 1);
  layout.add("a", 1);
  layout.add("d", blockenc::d_width(domain.n_dof()));
  layout.add("c", domain.n_el());
  return layout;
}

qsim::Operator selected_inverse(
    const fem::MbbDomain& domain,
    const std::vector<fem::StructureConfig>& configs, double beta,
    const qsvt::Filter& filter, const qsim::RegisterLayout& layout) {
  const auto& d = layout["d"];
  std::map<qsim::Index, Eigen::MatrixXcd> blocks;
  for (const auto& x : configs)
    blocks.emplace(x.index(), filtered_block(domain, x, beta, filter, d.width));
  auto targets = d.qubits();
  targets.push_back(layout["a"].qubit(0));
  return blockenc::config_selected_dilation(blocks, layout["c"],
                                            std::move(targets));
}

QaeDistribution qae_distribution(const fem::MbbDomain& domain,
                                 const fem::StructureConfig& config,
                                 const QaeParams& params) {
  params.validate();
  if (params.backend == Backend::kEmulated) {
    const auto rec =
        phase_of_config(domain, config, params.constants, params.filter);
    return emulated_distribution(rec.theta, params.n_p);
  }
  const auto layout = coherent_layout(domain, params.n_p);
  const auto u_sel = selected_inverse(domain, {config}, params.constants.beta,
                                      params.filter, layout);
  const auto a = hadamard_test_operator(
      u_sel, layout, force_state(domain, layout["d"].width));
  auto state = qsim::QuantumState::basis(
      layout, layout.encode({{"c", config.index()}}));
  qsim::apply(state, qae_circuit(a, layout));
  QaeDistribution out;
  out.n_p = params.n_p;
  out.probabilities = qsim::measure_distribution(state, "p");
  return out;
}

}  // namespace qtopo::qae
