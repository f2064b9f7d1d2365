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

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qtopo/fem.hpp"
#include "qtopo/qsim.hpp"
#include "qtopo/qsvt.hpp"

namespace qtopo::qae {

struct ScalingConstants {
  double delta = 0.0;      // ||K^el||_2
  double beta = 0.0;       // n_el * delta
  double gamma = 0.0;      // y0 * mu
  double alpha_eff = 0.0;  // t / compliance, set by calibrate_alpha
};

ScalingConstants compute_scaling(const fem::MbbDomain& domain,
                                 const qsvt::PolySpec& spec);

/// (1/pi) arcsin(sqrt(1/2 + t/2)).
double theta_of_t(double t);

struct PhaseRecord {
  fem::StructureConfig config;
  double t_value = 0.0;
  double theta = 0.0;
  /// Share of t carried by eigen-directions below the filter knee.
  double plateau_share = 0.0;
  /// nullopt when the plateau dominates (reported as saturated).
  std::optional<double> compliance_estimate;
};

/// Filtered reduced system for one configuration.
struct FilteredSystem {
  Eigen::MatrixXd filtered;  // free x free
  Eigen::VectorXd f_hat;     // normalized reduced force
  double t = 0.0;
  double plateau_t = 0.0;
};

FilteredSystem filter_system(const fem::MbbDomain& domain,
                             const fem::StructureConfig& config, double beta,
                             const qsvt::Filter& filter);

PhaseRecord phase_of_config(const fem::MbbDomain& domain,
                            const fem::StructureConfig& config,
                            const ScalingConstants& constants,
                            const qsvt::Filter& filter);

/// t(all-solid) / compliance_direct(all-solid).
double calibrate_alpha(const fem::MbbDomain& domain,
                       const ScalingConstants& constants,
                       const qsvt::Filter& filter);

/// Filtered matrix embedded in the full data register (zeros on fixed and
/// padding indices).
Eigen::MatrixXcd filtered_block(const fem::MbbDomain& domain,
                                const fem::StructureConfig& config,
                                double beta, const qsvt::Filter& filter,
                                int d_width);

/// Normalized reduced force embedded in the data register.
Eigen::VectorXcd force_state(const fem::MbbDomain& domain, int d_width);

/// A = H_h . c-U_sel . V_f . H_h with V_f|0> = |force>; U_sel acts on the
/// data register and its dilation ancilla (controls are kept).
qsim::Circuit hadamard_test_operator(const qsim::Operator& u_sel,
                                     const qsim::RegisterLayout& layout,
                                     const Eigen::VectorXcd& force,
                                     const std::string& h = "h",
                                     const std::string& d = "d");

/// G = A (2|0><0| - 1)_{h,a,d} A^+ S_h, with S_h = -1 on h = 0.
qsim::Circuit grover_operator(const qsim::Circuit& a,
                              const qsim::RegisterLayout& layout);

/// A, H on p, G^{2^j} controlled by p_j, inverse QFT on p.
qsim::Circuit qae_circuit(const qsim::Circuit& a,
                          const qsim::RegisterLayout& layout,
                          const std::string& p = "p");

enum class Backend { kCoherent, kEmulated };

struct QaeParams {
  int n_p = 5;
  qsvt::Filter filter = qsvt::ExactEven{};
  Backend backend = Backend::kEmulated;
  ScalingConstants constants;

  void validate() const;
};

struct QaeDistribution {
  int n_p = 0;
  std::vector<double> probabilities;
};

/// Exact QPE outcome distribution for phase theta (Fejer kernel, two branches).
QaeDistribution emulated_distribution(double theta, int n_p);

/// Layout p, h, a, d, c used by the coherent backend.
qsim::RegisterLayout coherent_layout(const fem::MbbDomain& domain, int n_p,
                                     bool with_flag = false);

/// U_sel for the given configurations on layout registers c, d, a.
qsim::Operator selected_inverse(const fem::MbbDomain& domain,
                                const std::vector<fem::StructureConfig>& configs,
                                double beta, const qsvt::Filter& filter,
                                const qsim::RegisterLayout& layout);

QaeDistribution qae_distribution(const fem::MbbDomain& domain,
                                 const fem::StructureConfig& config,
                                 const QaeParams& params);

}  // namespace qtopo::qae

namespace qtopo::fem {

struct ThetaRow {
  StructureConfig config;
  std::optional<double> compliance;
  double t = 0.0;
  double theta = 0.0;
};

/// Every configuration (or every one of weight k) with its dense-solve
/// compliance and emulated phase, in configuration index order.
std::vector<ThetaRow> enumerate_thetas(const MbbDomain& domain,
                                       const qsvt::Filter& filter,
                                       std::optional<int> volume_k = {});

}  // namespace qtopo::fem
