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

#include "qtopo/blockenc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "qtopo/error.hpp"

namespace qtopo::blockenc {

using qsim::Circuit;
using qsim::Control;
using qsim::Index;
using qsim::Operator;

Eigen::MatrixXcd dilate_contraction(const Eigen::MatrixXcd& m) {
  QTOPO_REQUIRE(m.rows() == m.cols() && m.rows() > 0, ContractViolation,
                "dilation needs a square matrix");
  const Eigen::Index n = m.rows();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  QTOPO_REQUIRE(s.maxCoeff() <= 1.0 + 1e-12, ContractViolation,
                "dilation needs spectral norm <= 1, got " +
                    std::to_string(s.maxCoeff()));
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double si = std::min(s(i), 1.0);
    c(i) = std::sqrt(std::max(0.0, (1.0 - si) * (1.0 + si)));
  }
  // Both square roots share the singular vectors of M, which keeps the
  // cross terms cancelling to round-off even for singular values at 1.
  const Eigen::MatrixXcd& w = svd.matrixU();
  const Eigen::MatrixXcd& v = svd.matrixV();
  const Eigen::MatrixXcd top = w * c.asDiagonal() * w.adjoint();
  const Eigen::MatrixXcd bottom = v * c.asDiagonal() * v.adjoint();
  Eigen::MatrixXcd u(2 * n, 2 * n);
  u.topLeftCorner(n, n) = m;
  u.topRightCorner(n, n) = top;
  u.bottomLeftCorner(n, n) = bottom;
  u.bottomRightCorner(n, n) = -m.adjoint();
  return u;
}

ElementEncoding element_blockencoding(const fem::Material& material,
                                      std::vector<int> targets) {
  QTOPO_REQUIRE(targets.size() == 4, ContractViolation,
                "element encoding acts on three data qubits and b");
  const Eigen::MatrixXd ke = fem::element_stiffness(material).dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ke);
  const double delta = eig.eigenvalues().cwiseAbs().maxCoeff();
  const Eigen::MatrixXcd m = (ke / delta).cast<std::complex<double>>();
  return {Operator::dense(std::move(targets), dilate_contraction(m)), delta};
}

int l_width(int n_el) {
  QTOPO_REQUIRE(n_el >= 1, ContractViolation, "n_el must be positive");
  int w = 0;
  while ((1 << w) < n_el) ++w;
  return std::max(w, 1);
}

int d_width(int n_dof) {
  QTOPO_REQUIRE(n_dof >= 8, ContractViolation, "n_dof must be >= 8");
  int m = 0;
  while ((8 << m) < n_dof) ++m;
  return 3 + m;
}

Circuit gap_permutation(int n_y, const std::vector<int>& d) {
  const int width = static_cast<int>(d.size());
  QTOPO_REQUIRE(width >= 4, GuardViolation,
                "gap permutation needs a data register of at least 4 qubits");
  QTOPO_REQUIRE(n_y >= 1, ContractViolation, "n_y must be positive");
  QTOPO_REQUIRE(8 + 2 * (n_y - 1) <= (1 << width), GuardViolation,
                "data register too small for the element gap");
  Circuit c;
  c.append(qsim::adder_permutation(-4, d));
  if (n_y > 1) {
    const std::vector<int> low(d.begin(), d.end() - 1);
    c.append(qsim::adder_permutation(2 * (n_y - 1), low)
                 .controlled(Control{d.back(), false}));
  }
  c.append(qsim::adder_permutation(4, d));
  return c;
}

qsim::RegisterLayout blockencoding_layout(
    const fem::MbbDomain& domain,
    const std::vector<std::pair<std::string, int>>& extra) {
  qsim::RegisterLayout layout;
  for (const auto& [name, width] : extra) layout.add(name, width);
  layout.add("c", domain.n_el());
  layout.add("l", l_width(domain.n_el()));
  layout.add("v", 1);
  layout.add("z", 1);
  layout.add("b", 1);
  layout.add("d", d_width(domain.n_dof()));
  return layout;
}

namespace {

/// Maps |0> to the uniform state over the first n of 2^width basis states.
Circuit lcu_prepare(int n, const qsim::Register& l) {
  Circuit c;
  const int dim = 1 << l.width;
  if (n == dim) {
    for (int q : l.qubits()) c.append(qsim::hadamard(q));
    return c;
  }
  if (n == 1) return c;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
  w.head(n).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd u = -w;
  u(0) += 1.0;
  u.normalize();
  const Eigen::MatrixXd h =
      Eigen::MatrixXd::Identity(dim, dim) - 2.0 * u * u.transpose();
  c.append(Operator::dense(l.qubits(), h.cast<std::complex<double>>()));
  return c;
}

}  // namespace

BlockEncoding global_blockencoding(const fem::MbbDomain& domain,
                                   const qsim::RegisterLayout& layout) {
  const int n_el = domain.n_el();
  const int n_y = domain.n_y();
  for (const char* name : {"c", "l", "v", "z", "b", "d"})
    QTOPO_REQUIRE(layout.has(name), ContractViolation,
                  std::string("block-encoding layout lacks register ") + name);
  const auto& c = layout["c"];
  const auto& l = layout["l"];
  const auto& d = layout["d"];
  QTOPO_REQUIRE(c.width == n_el, ContractViolation,
                "register c must have one qubit per element");
  QTOPO_REQUIRE(l.width == l_width(n_el), ContractViolation,
                "register l has the wrong width");
  QTOPO_REQUIRE(d.width == d_width(domain.n_dof()), ContractViolation,
                "register d has the wrong width");
  QTOPO_REQUIRE(layout["v"].width == 1 && layout["z"].width == 1 &&
                    layout["b"].width == 1,
                ContractViolation, "v, z and b must be single qubits");

  const int v = layout["v"].qubit(0);
  const int z = layout["z"].qubit(0);
  const int b = layout["b"].qubit(0);
  const auto dq = d.qubits();
  const int branches = 1 << l.width;

  auto element = element_blockencoding(domain.material(),
                                       {dq[0], dq[1], dq[2], b});
  const Circuit prep = lcu_prepare(n_el, l);
  const Circuit gap = gap_permutation(n_y, dq);

  BlockEncoding be;
  be.layout = layout;
  be.scale = n_el * element.delta;
  be.config_register = "c";
  be.projector.ancillas = {"l", "v", "z", "b"};
  be.projector.data = "d";
  for (int i : domain.fixed_dofs()) be.projector.excluded.push_back(i);
  for (Index i = domain.n_dof(); i < (Index{1} << d.width); ++i)
    be.projector.excluded.push_back(i);

  Circuit& u = be.circuit;
  u.append(prep);
  for (int e = 1; e <= n_el; ++e)
    u.append(qsim::adder_permutation(-fem::offset_delta(e, n_y), dq)
                 .controlled(qsim::value_controls(l, e - 1)));
  for (int e = 1; e <= branches; ++e) {
    auto x = qsim::pauli_x(v).controlled(qsim::value_controls(l, e - 1));
    if (e <= n_el) x = x.controlled(Control{c.qubit(n_el - e), false});
    u.append(x);
  }
  u.append(gap.adjoint());
  u.append(element.op);
  if (d.width > 3) {
    u.append(qsim::pauli_x(z));
    std::vector<Control> high;
    for (int k = 3; k < d.width; ++k) high.push_back(Control{dq[k], false});
    u.append(qsim::pauli_x(z).controlled(high));
  }
  u.append(gap);
  for (int e = 1; e <= n_el; ++e)
    u.append(qsim::adder_permutation(fem::offset_delta(e, n_y), dq)
                 .controlled(qsim::value_controls(l, e - 1)));
  u.append(prep.adjoint());
  return be;
}

Operator config_selected_dilation(
    const std::map<Index, Eigen::MatrixXcd>& blocks,
    const qsim::Register& selector, std::vector<int> targets) {
  std::map<Index, Eigen::MatrixXcd> dil;
  for (const auto& [x, m] : blocks) {
    QTOPO_REQUIRE(2 * m.rows() == (Eigen::Index{1} << targets.size()),
                  ContractViolation,
                  "block size does not match the target qubits");
    dil.emplace(x, dilate_contraction(m));
  }
  return Operator::select(selector.qubits(), std::move(targets),
                          std::move(dil));
}

namespace {

std::vector<bool> signal_mask(const BlockEncoding& be) {
  const auto& d = be.layout[be.projector.data];
  std::vector<bool> ok(std::size_t{1} << d.width, true);
  for (Index i : be.projector.excluded)
    if (i < ok.size()) ok[i] = false;
  return ok;
}

}  // namespace

std::map<Index, Eigen::MatrixXcd> extract_blocks(
    const BlockEncoding& be, const std::vector<Index>& configs) {
  QTOPO_REQUIRE(!configs.empty(), ContractViolation, "no configurations");
  const auto& d = be.layout[be.projector.data];
  const Index dim = Index{1} << d.width;
  const auto ok = signal_mask(be);
  const bool has_c = !be.config_register.empty();
  if (!has_c)
    QTOPO_REQUIRE(configs.size() == 1, ContractViolation,
                  "encoding has no configuration register");
  const std::set<Index> unique(configs.begin(), configs.end());
  const double amp = 1.0 / std::sqrt(static_cast<double>(unique.size()));

  std::map<Index, Eigen::MatrixXcd> out;
  for (Index x : unique) out[x] = Eigen::MatrixXcd::Zero(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    if (!ok[j]) continue;
    qsim::QuantumState s(be.layout);
    auto psi = s.amplitudes();
    psi[0] = 0.0;
    for (Index x : unique) {
      std::map<std::string, Index> val{{be.projector.data, j}};
      if (has_c) val[be.config_register] = x;
      psi[be.layout.encode(val)] = amp;
    }
    qsim::apply(s, be.circuit);
    for (Index x : unique) {
      for (Index i = 0; i < dim; ++i) {
        if (!ok[i]) continue;
        std::map<std::string, Index> val{{be.projector.data, i}};
        if (has_c) val[be.config_register] = x;
        out[x](i, j) = s.amplitude(be.layout.encode(val)) / amp;
      }
    }
  }
  return out;
}

Eigen::MatrixXcd extract_block(const BlockEncoding& be, Index config) {
  return extract_blocks(be, {config}).at(config);
}

double block_error(const BlockEncoding& be, const Eigen::MatrixXcd& block,
                   const fem::SymMatrix& reference) {
  const auto ok = signal_mask(be);
  const Index dim = ok.size();
  QTOPO_REQUIRE(static_cast<Index>(block.rows()) == dim, ContractViolation,
                "block size mismatch");
  QTOPO_REQUIRE(static_cast<Index>(reference.order()) <= dim,
                ContractViolation, "reference larger than the data register");
  double err = 0.0;
  for (Index i = 0; i < dim; ++i) {
    if (!ok[i]) continue;
    for (Index j = 0; j < dim; ++j) {
      if (!ok[j]) continue;
      const bool inside = i < static_cast<Index>(reference.order()) &&
                          j < static_cast<Index>(reference.order());
      const double r = inside ? reference(i, j) / be.scale : 0.0;
      err = std::max(err, std::abs(block(i, j) - r));
    }
  }
  return err;
}

double verify_block(const BlockEncoding& be,
                    const fem::StructureConfig& config,
                    const fem::SymMatrix& reference) {
  return block_error(be, extract_block(be, config.index()), reference);
}

double unitarity_defect(const Circuit& circuit,
                        const qsim::RegisterLayout& layout, int samples,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    qsim::QuantumState s(layout);
    auto psi = s.amplitudes();
    for (auto& a : psi) a = {g(rng), g(rng)};
    const double n0 = s.norm();
    for (auto& a : psi) a /= n0;
    const std::vector<qsim::Amplitude> ref(psi.begin(), psi.end());
    qsim::apply(s, circuit);
    worst = std::max(worst, std::abs(s.norm() - 1.0));
    qsim::apply(s, circuit.adjoint());
    for (std::size_t i = 0; i < ref.size(); ++i)
      worst = std::max(worst, std::abs(s.amplitude(i) - ref[i]));
  }
  return worst;
}

}  // namespace qtopo::blockenc
