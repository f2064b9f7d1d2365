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

#include "qtopo/fem.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>

#include "qtopo/error.hpp"

namespace qtopo::fem {

void Material::validate() const {
  QTOPO_REQUIRE(young_modulus > 0.0, ConfigError,
                "young_modulus must be positive");
  QTOPO_REQUIRE(poisson_ratio >= 0.0 && poisson_ratio < 0.5, ConfigError,
                "poisson_ratio must lie in [0, 0.5)");
}

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  QTOPO_REQUIRE(m.rows() == m.cols(), ContractViolation,
                "SymMatrix needs a square matrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  QTOPO_REQUIRE((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale,
                ContractViolation, "matrix is not symmetric");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zero(int order) {
  return SymMatrix(Eigen::MatrixXd::Zero(order, order));
}

StructureConfig::StructureConfig(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {
  for (auto b : bits_)
    QTOPO_REQUIRE(b <= 1, ConfigError, "config bits must be 0 or 1");
}

StructureConfig StructureConfig::from_string(std::string_view s) {
  std::vector<std::uint8_t> bits;
  bits.reserve(s.size());
  for (char ch : s) {
    QTOPO_REQUIRE(ch == '0' || ch == '1', ConfigError,
                  "config string must contain only 0 and 1: " + std::string(s));
    bits.push_back(ch == '1');
  }
  QTOPO_REQUIRE(!bits.empty(), ConfigError, "empty config string");
  return StructureConfig(std::move(bits));
}

StructureConfig StructureConfig::uniform(int n_el, bool solid) {
  return StructureConfig(std::vector<std::uint8_t>(n_el, solid ? 1 : 0));
}

StructureConfig StructureConfig::from_index(std::uint64_t index, int n_el) {
  QTOPO_REQUIRE(n_el >= 1 && n_el <= 63, ConfigError, "bad element count");
  QTOPO_REQUIRE(index < (std::uint64_t{1} << n_el), ConfigError,
                "config index out of range");
  std::vector<std::uint8_t> bits(n_el);
  for (int e = 0; e < n_el; ++e) bits[e] = (index >> (n_el - 1 - e)) & 1U;
  return StructureConfig(std::move(bits));
}

std::uint64_t StructureConfig::index() const {
  std::uint64_t v = 0;
  for (auto b : bits_) v = (v << 1) | b;
  return v;
}

int StructureConfig::hamming_weight() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1));
}

std::string StructureConfig::to_string() const {
  std::string s;
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::string StructureConfig::glyph_grid(int n_y) const {
  QTOPO_REQUIRE(n_y >= 1 && size() % n_y == 0, ConfigError,
                "glyph grid needs n_y dividing the element count");
  const int n_x = size() / n_y;
  std::string out;
  for (int row = 0; row < n_y; ++row) {
    if (row) out.push_back('\n');
    for (int col = 0; col < n_x; ++col)
      out.push_back(bits_[col * n_y + row] ? '#' : '.');
  }
  return out;
}

MbbDomain MbbDomain::mbb(int n_x, int n_y, Material material) {
  QTOPO_REQUIRE(n_x >= 1 && n_y >= 1, ConfigError,
                "mesh dimensions must be positive");
  const int n_dof = 2 * (n_x + 1) * (n_y + 1);
  std::vector<int> fixed;
  for (int j = 0; j <= n_y; ++j) fixed.push_back(2 * j);
  fixed.push_back(n_dof - 1);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n_dof);
  f(1) = -1.0;
  return MbbDomain(n_x, n_y, material, std::move(fixed), std::move(f));
}

MbbDomain::MbbDomain(int n_x, int n_y, Material material,
                     std::vector<int> fixed_dofs, Eigen::VectorXd force)
    : n_x_(n_x),
      n_y_(n_y),
      material_(material),
      fixed_(std::move(fixed_dofs)),
      force_(std::move(force)) {
  QTOPO_REQUIRE(n_x_ >= 1 && n_y_ >= 1, ConfigError,
                "mesh dimensions must be positive");
  material_.validate();
  QTOPO_REQUIRE(force_.size() == n_dof(), ConfigError,
                "force length must equal n_dof");
  std::sort(fixed_.begin(), fixed_.end());
  QTOPO_REQUIRE(std::adjacent_find(fixed_.begin(), fixed_.end()) ==
                    fixed_.end(),
                ConfigError, "duplicate fixed DoF");
  for (int i : fixed_)
    QTOPO_REQUIRE(i >= 0 && i < n_dof(), ConfigError,
                  "fixed DoF out of range");
}

std::vector<int> MbbDomain::free_dofs() const {
  std::vector<int> out;
  std::size_t k = 0;
  for (int i = 0; i < n_dof(); ++i) {
    if (k < fixed_.size() && fixed_[k] == i) {
      ++k;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

Eigen::VectorXd MbbDomain::free_force() const {
  const auto free = free_dofs();
  Eigen::VectorXd f(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) f(i) = force_(free[i]);
  return f;
}

SymMatrix element_stiffness(const Material& material) {
  material.validate();
  const double nu = material.poisson_ratio;
  const double k[8] = {0.5 - nu / 6,       -0.125 - nu / 8,
                       nu / 6,             -0.125 + 3 * nu / 8,
                       -0.25 - nu / 12,    0.125 - 3 * nu / 8,
                       -0.25 + nu / 12,    0.125 + nu / 8};
  static constexpr int kPattern[8][8] = {
      {1, 2, 3, 4, 5, 6, 7, 8}, {2, 1, 6, 5, 4, 3, 8, 7},
      {3, 6, 1, 8, 7, 2, 5, 4}, {4, 5, 8, 1, 2, 7, 6, 3},
      {5, 4, 7, 2, 1, 8, 3, 6}, {6, 3, 2, 7, 8, 1, 4, 5},
      {7, 8, 5, 6, 3, 4, 1, 2}, {8, 7, 4, 3, 6, 5, 2, 1}};
  const double pre = material.young_modulus / (1.0 - nu * nu);
  Eigen::MatrixXd ke(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) ke(i, j) = pre * k[kPattern[i][j] - 1];
  return SymMatrix(ke);
}

int offset_delta(int e, int n_y) {
  QTOPO_REQUIRE(e >= 1 && n_y >= 1, ContractViolation,
                "element index must be >= 1");
  return 2 * (e - 1 + (e - 1) / n_y);
}

std::array<int, 8> element_dofs(int e, int n_y) {
  const int d = offset_delta(e, n_y);
  const int hi = d + 4 + 2 * (n_y - 1);
  return {d, d + 1, d + 2, d + 3, hi, hi + 1, hi + 2, hi + 3};
}

SymMatrix assemble_weighted(const MbbDomain& domain,
                            const std::vector<double>& weights) {
  QTOPO_REQUIRE(static_cast<int>(weights.size()) == domain.n_el(),
                ConfigError, "one weight per element required");
  const Eigen::MatrixXd ke = element_stiffness(domain.material()).dense();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(domain.n_dof(), domain.n_dof());
  for (int e = 1; e <= domain.n_el(); ++e) {
    const double w = weights[e - 1];
    if (w == 0.0) continue;
    const auto dofs = element_dofs(e, domain.n_y());
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) k(dofs[a], dofs[b]) += w * ke(a, b);
  }
  return SymMatrix(k);
}

SymMatrix assemble_global(const MbbDomain& domain,
                          const StructureConfig& config) {
  QTOPO_REQUIRE(config.size() == domain.n_el(), ConfigError,
                "config length must equal n_x*n_y");
  std::vector<double> w(config.size());
  for (int e = 1; e <= config.size(); ++e) w[e - 1] = config.solid(e);
  return assemble_weighted(domain, w);
}

SymMatrix reduce_free(const SymMatrix& k, const std::vector<int>& fixed_dofs) {
  std::set<int> fixed;
  for (int i : fixed_dofs) {
    QTOPO_REQUIRE(i >= 0 && i < k.order(), ContractViolation,
                  "fixed DoF out of range");
    QTOPO_REQUIRE(fixed.insert(i).second, ContractViolation,
                  "duplicate fixed DoF");
  }
  std::vector<int> keep;
  for (int i = 0; i < k.order(); ++i)
    if (!fixed.count(i)) keep.push_back(i);
  const int n = static_cast<int>(keep.size());
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = k(keep[i], keep[j]);
  return SymMatrix(r);
}

std::optional<double> compliance_direct(const MbbDomain& domain,
                                        const StructureConfig& config,
                                        double void_density, double penalty) {
  QTOPO_REQUIRE(config.size() == domain.n_el(), ConfigError,
                "config length must equal n_x*n_y");
  QTOPO_REQUIRE(void_density >= 0.0 && void_density < 1.0, ConfigError,
                "void_density must lie in [0, 1)");
  QTOPO_REQUIRE(penalty >= 1.0, ConfigError, "penalty must be >= 1");
  const double void_w = void_density > 0 ? std::pow(void_density, penalty) : 0;
  std::vector<double> w(config.size());
  for (int e = 1; e <= config.size(); ++e)
    w[e - 1] = config.solid(e) ? 1.0 : void_w;
  const SymMatrix kf =
      reduce_free(assemble_weighted(domain, w), domain.fixed_dofs());
  const Eigen::VectorXd f = domain.free_force();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kf.dense());
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double lmax = lam.maxCoeff();
  if (!(lmax > 0.0)) return std::nullopt;
  const double cut = 1e-12 * lmax;

  if (lam.minCoeff() >= cut) {
    Eigen::LLT<Eigen::MatrixXd> llt(kf.dense());
    if (llt.info() == Eigen::Success) return f.dot(llt.solve(f));
  }
  // Singular system: the design is still usable when the load only touches
  // the stiff part (e.g. nodes that belong to void elements alone).
  const Eigen::VectorXd w_f = eig.eigenvectors().transpose() * f;
  double null_mass = 0.0;
  double c = 0.0;
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i) < cut)
      null_mass += w_f(i) * w_f(i);
    else
      c += w_f(i) * w_f(i) / lam(i);
  }
  if (null_mass > 1e-16 * f.squaredNorm()) return std::nullopt;
  return c;
}

double volume_fraction(const StructureConfig& config) {
  if (config.size() == 0) return 0.0;
  return static_cast<double>(config.hamming_weight()) / config.size();
}

std::vector<StructureConfig> enumerate_configs(int n_el,
                                               std::optional<int> weight) {
  QTOPO_REQUIRE(n_el >= 1 && n_el <= 24, GuardViolation,
                "enumeration is limited to n_el <= 24");
  if (weight)
    QTOPO_REQUIRE(*weight >= 0 && *weight <= n_el, ConfigError,
                  "volume weight out of range");
  std::vector<StructureConfig> out;
  const std::uint64_t n = std::uint64_t{1} << n_el;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (weight && std::popcount(i) != *weight) continue;
    out.push_back(StructureConfig::from_index(i, n_el));
  }
  return out;
}

std::string to_csv(const SymMatrix& m) {
  std::ostringstream os;
  os.precision(17);
  for (int i = 0; i < m.order(); ++i) {
    for (int j = 0; j < m.order(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace qtopo::fem
