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

#include "qtopo/qsvt.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "qtopo/error.hpp"

namespace qtopo::qsvt {

namespace {

constexpr std::size_t kMaxDegree = 1000000;
constexpr int kGridPoints = 10000;

double clenshaw(const std::vector<double>& c, double s) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = c[k] + 2.0 * s * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c.empty() ? 0.0 : c[0] + s * b1 - b2;
}

std::vector<double> sample_auxiliary(const PolySpec& spec, std::size_t n) {
  std::vector<double> v(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double s = std::cos(std::numbers::pi * static_cast<double>(j) /
                              static_cast<double>(n));
    v[j] = target_even(std::sqrt(std::clamp((s + 1.0) / 2.0, 0.0, 1.0)), spec);
  }
  return v;
}

FilterPoly finish(const PolySpec& spec, FitMode mode, std::vector<double> c) {
  FilterPoly p;
  p.spec = spec;
  p.mode = mode;
  auto [err, peak] = grid_error(c, spec);
  if (peak > 1.0) {
    p.scale = 1.0 / peak;
    for (auto& ck : c) ck *= p.scale;
    err = grid_error(c, spec).first;
  }
  p.degree = 2 * static_cast<int>(c.size() - 1);
  p.coefficients = std::move(c);
  p.achieved_error = err;
  return p;
}

// Error over every stride-th grid point plus the breakpoints. A subset, so a
// failure here implies a failure on the full grid.
std::pair<double, double> strided_grid_error(const std::vector<double>& coeffs,
                                             const PolySpec& spec,
                                             std::size_t stride) {
  const auto full = certification_grid(spec);
  std::vector<double> grid;
  for (std::size_t i = 0; i < full.size(); ++i)
    if (i % stride == 0 || i >= static_cast<std::size_t>(kGridPoints))
      grid.push_back(full[i]);
  double err = 0.0;
  double peak = 0.0;
  const auto n = static_cast<std::int64_t>(grid.size());
#pragma omp parallel for reduction(max : err, peak) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = grid[i];
    const double q = clenshaw(coeffs, 2.0 * x * x - 1.0);
    err = std::max(err, std::abs(q - target_even(x, spec)));
    peak = std::max(peak, std::abs(q));
  }
  return {err, peak};
}

FilterPoly fit_uncached(const PolySpec& spec, FitMode mode) {
  std::vector<double> last;
  for (std::size_t n = 16; 2 * n <= kMaxDegree; n *= 2) {
    std::vector<double> c = chebyshev_coefficients(sample_auxiliary(spec, n));
    if (mode == FitMode::kChop) {
      const std::size_t cut = standard_chop(c, spec.eps);
      if (cut < c.size()) {
        c.resize(cut);
        return finish(spec, mode, std::move(c));
      }
    } else if (strided_grid_error(c, spec, 16).first <= spec.eps) {
      FilterPoly p = finish(spec, mode, c);
      if (p.achieved_error <= spec.eps) return p;
    }
    last = std::move(c);
  }
  const double last_err = grid_error(last, spec).first;
  throw GuardViolation("polynomial degree cap of 1e6 exceeded; achieved error " +
                       std::to_string(last_err));
}

}  // namespace

void PolySpec::validate() const {
  QTOPO_REQUIRE(mu > 0.0 && mu < 1.0, ConfigError, "mu must lie in (0, 1)");
  QTOPO_REQUIRE(y0 > 0.0 && y0 <= 1.0, ConfigError, "y0 must lie in (0, 1]");
  QTOPO_REQUIRE(eps > 0.0 && eps < y0, ConfigError,
                "eps must lie in (0, y0)");
}

double target_even(double x, const PolySpec& spec) {
  const double a = std::abs(x);
  if (a < spec.mu) return std::cos(std::acos(spec.y0) / spec.mu * a);
  return spec.y0 * spec.mu / a;
}

double target_odd(double x, double mu) {
  const double a = std::abs(x);
  const double sign = x < 0 ? -1.0 : 1.0;
  if (a >= mu) return mu / (2.0 * x);
  if (a <= mu / 2) return 0.0;
  const double s = std::sin(std::numbers::pi * (a - mu / 2) / mu);
  return sign * 0.5 * s * s;
}

std::vector<double> chebyshev_coefficients(const std::vector<double>& values) {
  QTOPO_REQUIRE(values.size() >= 2, ContractViolation,
                "need at least two samples");
  const std::size_t m = values.size();
  const double n = static_cast<double>(m - 1);
  std::vector<double> in(values);
  std::vector<double> out(m);
  static std::mutex plan_mutex;  // FFTW planning is not thread-safe
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_r2r_1d(static_cast<int>(m), in.data(), out.data(),
                            FFTW_REDFT00, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
  for (auto& o : out) o /= n;
  out.front() /= 2.0;
  out.back() /= 2.0;
  return out;
}

std::size_t standard_chop(const std::vector<double>& coeffs, double tol) {
  const std::size_t n = coeffs.size();
  if (tol >= 1.0) return 1;
  if (n < 17) return n;
  std::vector<double> env(n);
  env[n - 1] = std::abs(coeffs[n - 1]);
  for (std::size_t j = n - 1; j-- > 0;)
    env[j] = std::max(std::abs(coeffs[j]), env[j + 1]);
  if (env[0] == 0.0) return 1;
  const double top = env[0];
  for (auto& e : env) e /= top;

  // 1-based indices below, as in the published description.
  std::size_t plateau = 0;
  std::size_t j2 = 0;
  for (std::size_t j = 2; j <= n; ++j) {
    j2 = static_cast<std::size_t>(std::lround(1.25 * static_cast<double>(j) + 5));
    if (j2 > n) return n;
    const double e1 = env[j - 1];
    const double e2 = env[j2 - 1];
    const double r = 3.0 * (1.0 - std::log(e1) / std::log(tol));
    if (e1 == 0.0 || e2 / e1 > r) {
      plateau = j - 1;
      break;
    }
  }
  if (plateau == 0) return n;
  if (env[plateau - 1] == 0.0) return plateau;

  const double floor = std::pow(tol, 7.0 / 6.0);
  std::size_t j3 = 0;
  for (double e : env)
    if (e >= floor) ++j3;
  if (j3 < j2) {
    j2 = j3 + 1;
    env[j2 - 1] = floor;
  }
  std::size_t best = 0;
  double best_v = 0.0;
  for (std::size_t i = 0; i < j2; ++i) {
    const double ramp = j2 > 1 ? static_cast<double>(i) /
                                     static_cast<double>(j2 - 1) *
                                     (-1.0 / 3.0) * std::log10(tol)
                               : 0.0;
    const double v = std::log10(env[i]) + ramp;
    if (i == 0 || v < best_v) {
      best_v = v;
      best = i;
    }
  }
  return std::max<std::size_t>(best, 1);
}

std::vector<double> certification_grid(const PolySpec& spec) {
  std::vector<double> x;
  x.reserve(kGridPoints + 4);
  for (int i = 0; i < kGridPoints; ++i) {
    const double s = std::cos(std::numbers::pi * (i + 0.5) / kGridPoints);
    x.push_back(std::sqrt((s + 1.0) / 2.0));
  }
  for (double b : {0.0, spec.mu / 2, spec.mu, 1.0}) x.push_back(b);
  return x;
}

std::pair<double, double> grid_error(const std::vector<double>& coeffs,
                                     const PolySpec& spec) {
  return strided_grid_error(coeffs, spec, 1);
}

FilterPoly fit_even_poly(const PolySpec& spec, FitMode mode) {
  spec.validate();
  static std::mutex cache_mutex;
  static std::map<std::tuple<double, double, double, int>, FilterPoly> cache;
  const auto key = std::make_tuple(spec.mu, spec.y0, spec.eps,
                                   static_cast<int>(mode));
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  FilterPoly p = fit_uncached(spec, mode);
  std::lock_guard<std::mutex> lock(cache_mutex);
  cache.emplace(key, p);
  return p;
}

double eval_poly(const FilterPoly& poly, double x) {
  QTOPO_REQUIRE(std::abs(x) <= 1.0 + 1e-12, ContractViolation,
                "eval_poly needs |x| <= 1");
  const double x2 = std::min(x * x, 1.0);
  return clenshaw(poly.coefficients, 2.0 * x2 - 1.0);
}

double eval_filter(const Filter& filter, double x) {
  return std::visit(
      [x](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FilterPoly>)
          return eval_poly(f, std::clamp(x, -1.0, 1.0));
        else if constexpr (std::is_same_v<T, ExactEven>)
          return target_even(x, f.spec);
        else
          return target_odd(x, f.mu);
      },
      filter);
}

std::string filter_name(const Filter& filter) {
  switch (filter.index()) {
    case 0:
      return std::get<FilterPoly>(filter).mode == FitMode::kChop
                 ? "polynomial-chop"
                 : "polynomial";
    case 1:
      return "exact-even";
    default:
      return "exact-odd";
  }
}

fem::SymMatrix apply_qsvt_matrix(const fem::SymMatrix& k_free, double beta,
                                 const Filter& filter) {
  QTOPO_REQUIRE(beta > 0.0, ContractViolation, "beta must be positive");
  const Eigen::MatrixXd a = k_free.dense() / beta;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  QTOPO_REQUIRE(lam.size() == 0 || lam.cwiseAbs().maxCoeff() <= 1.0 + 1e-12,
                ContractViolation, "apply_qsvt_matrix needs ||K/beta|| <= 1");
  Eigen::VectorXd f(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    f(i) = eval_filter(filter, lam(i));
  const Eigen::MatrixXd& v = eig.eigenvectors();
  return fem::SymMatrix(v * f.asDiagonal() * v.transpose());
}

namespace {

qsim::Circuit phase_circuit(const qsim::RegisterLayout& layout,
                            const blockenc::ProjectorSpec& projector,
                            const std::string& q, qsim::Amplitude inside,
                            qsim::Amplitude outside) {
  const int flag = layout[q].qubit(0);
  std::vector<qsim::Control> anc;
  for (const auto& name : projector.ancillas)
    for (int qb : layout[name].qubits()) anc.push_back({qb, false});
  const auto& d = layout[projector.data];

  qsim::Circuit mark;
  mark.append(qsim::pauli_x(flag).controlled(anc));
  for (qsim::Index i : projector.excluded) {
    auto cs = anc;
    const auto dv = qsim::value_controls(d, i);
    cs.insert(cs.end(), dv.begin(), dv.end());
    mark.append(qsim::pauli_x(flag).controlled(cs));
  }
  qsim::Circuit c = mark;
  c.append(qsim::Operator::diagonal({flag}, {outside, inside}));
  c.append(mark.adjoint());
  return c;
}

}  // namespace

qsim::Circuit projector_phase(const qsim::RegisterLayout& layout,
                              const blockenc::ProjectorSpec& projector,
                              const std::string& q, double phi) {
  return phase_circuit(layout, projector, q, std::polar(1.0, phi),
                       std::polar(1.0, -phi));
}

qsim::Circuit circuit_qsvt(const blockenc::BlockEncoding& be,
                           const std::vector<double>& phases,
                           const std::string& q, PhaseConvention convention) {
  QTOPO_REQUIRE(!phases.empty(), ConfigError, "empty phase list");
  QTOPO_REQUIRE(be.layout.has(q), ContractViolation,
                "layout lacks the phase flag register " + q);
  const qsim::Circuit u_dag = be.circuit.adjoint();
  const std::size_t d = phases.size();
  qsim::Circuit c;
  // Factor j (1-based) is Pi_{phi_j} followed on its right by U or U^+;
  // the rightmost factor acts first.
  for (std::size_t j = d; j >= 1; --j) {
    c.append((d - j) % 2 == 0 ? be.circuit : u_dag);
    const double phi = phases[j - 1];
    const qsim::Amplitude in = std::polar(1.0, phi);
    const qsim::Amplitude out = std::polar(1.0, -phi);
    if (convention == PhaseConvention::kProjector)
      c.append(phase_circuit(be.layout, be.projector, q, in, out));
    else
      c.append(phase_circuit(be.layout, be.projector, q, in, -out));
  }
  return c;
}

}  // namespace qtopo::qsvt
