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

#include <string>
#include <variant>
#include <vector>

#include "qtopo/blockenc.hpp"
#include "qtopo/fem.hpp"
#include "qtopo/qsim.hpp"

namespace qtopo::qsvt {

struct PolySpec {
  double mu = 1e-3;
  double y0 = 0.3;
  double eps = 1e-3;

  void validate() const;
};

enum class FitMode {
  /// Adaptive Chebyshev construction with plateau-based chopping. Its degree
  /// tracks the kink resolution, not the sup error.
  kChop,
  /// Keeps doubling until the grid sup error is at most eps.
  kCertified,
};

/// Q(x) = sum_k c_k T_{2k}(x) = P(2x^2 - 1), P(s) = sum_k c_k T_k(s).
struct FilterPoly {
  PolySpec spec;
  FitMode mode = FitMode::kChop;
  std::vector<double> coefficients;
  int degree = 0;
  /// Sup error against target_even on the certification grid.
  double achieved_error = 0.0;
  /// Applied to the raw fit when its magnitude exceeded 1 on the grid.
  double scale = 1.0;
};

double target_even(double x, const PolySpec& spec);
double target_odd(double x, double mu);

FilterPoly fit_even_poly(const PolySpec& spec, FitMode mode = FitMode::kChop);
double eval_poly(const FilterPoly& poly, double x);

/// Chebyshev coefficients of the interpolant through n+1 Chebyshev points.
std::vector<double> chebyshev_coefficients(const std::vector<double>& values);
/// Number of leading coefficients to keep (plateau detection, tolerance tol).
std::size_t standard_chop(const std::vector<double>& coeffs, double tol);
/// Points in [0, 1] used to certify a fit; Q is even so x >= 0 suffices.
std::vector<double> certification_grid(const PolySpec& spec);
/// max |Q - target_even| and max |Q| over the certification grid.
std::pair<double, double> grid_error(const std::vector<double>& coeffs,
                                     const PolySpec& spec);

struct ExactEven {
  PolySpec spec;
};
struct ExactOdd {
  double mu = 1e-3;
};
using Filter = std::variant<FilterPoly, ExactEven, ExactOdd>;

double eval_filter(const Filter& filter, double x);
std::string filter_name(const Filter& filter);

/// V filter(Sigma) V^T for K_free/beta = V Sigma V^T.
fem::SymMatrix apply_qsvt_matrix(const fem::SymMatrix& k_free, double beta,
                                 const Filter& filter);

/// e^{i phi (2 Pi - 1)} with Pi = (ancillas at 0) x (data not excluded),
/// built from a flag on q, a Z rotation and the unflag.
qsim::Circuit projector_phase(const qsim::RegisterLayout& layout,
                              const blockenc::ProjectorSpec& projector,
                              const std::string& q, double phi);

enum class PhaseConvention {
  /// Pi_phi = e^{i phi (2 Pi - 1)}; phases all pi/2 give (-1)^{d/2} T_d.
  kProjector,
  /// Pi_phi = (2 Pi - 1) e^{i phi (2 Pi - 1)}; phases all 0 give T_d.
  kReflection,
};

/// Alternating sequence of U, U^+ and projector phases, phases[0] outermost.
qsim::Circuit circuit_qsvt(const blockenc::BlockEncoding& be,
                           const std::vector<double>& phases,
                           const std::string& q,
                           PhaseConvention convention =
                               PhaseConvention::kProjector);

}  // namespace qtopo::qsvt
