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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "qtopo/blockenc.hpp"
#include "qtopo/error.hpp"
#include "qtopo/fem.hpp"

using namespace qtopo;
using fem::StructureConfig;
using qsim::Index;

namespace {

double unitarity_error(const Eigen::MatrixXcd& u) {
  return (u.adjoint() * u -
          Eigen::MatrixXcd::Identity(u.rows(), u.cols()))
      .cwiseAbs()
      .maxCoeff();
}

Eigen::MatrixXcd random_symmetric(int n, double norm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  a = (a + a.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  a *= norm / eig.eigenvalues().cwiseAbs().maxCoeff();
  return a.cast<std::complex<double>>();
}

Index gap_image(int n_y, int width, Index in) {
  qsim::RegisterLayout l{{"d", width}};
  auto s = qsim::QuantumState::basis(l, in);
  qsim::apply(s, blockenc::gap_permutation(n_y, l["d"].qubits()));
  for (Index i = 0; i < s.amplitudes().size(); ++i)
    if (std::abs(s.amplitude(i)) > 0.5) return i;
  return ~Index{0};
}

}  // namespace

TEST_CASE("dilate_contraction examples") {
  const int n = 3;
  const auto z = blockenc::dilate_contraction(Eigen::MatrixXcd::Zero(n, n));
  Eigen::MatrixXcd swap = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  swap.topRightCorner(n, n).setIdentity();
  swap.bottomLeftCorner(n, n).setIdentity();
  CHECK((z - swap).cwiseAbs().maxCoeff() <= 1e-15);

  const auto id = blockenc::dilate_contraction(Eigen::MatrixXcd::Identity(n, n));
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Identity(2 * n, 2 * n);
  want.bottomRightCorner(n, n) *= -1.0;
  CHECK((id - want).cwiseAbs().maxCoeff() <= 1e-15);

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto m = random_symmetric(6, 0.9, seed);
    const auto u = blockenc::dilate_contraction(m);
    CHECK(unitarity_error(u) <= 1e-12);
    CHECK((u.topLeftCorner(6, 6) - m).cwiseAbs().maxCoeff() <= 1e-15);
  }

  CHECK_THROWS_AS(blockenc::dilate_contraction(random_symmetric(4, 1.1, 3)),
                  ContractViolation);
}

TEST_CASE("element block-encoding") {
  const fem::Material mat{};
  const auto enc = blockenc::element_blockencoding(mat, {0, 1, 2, 3});
  const auto ke = fem::element_stiffness(mat).dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ke);
  CHECK(enc.delta == doctest::Approx(eig.eigenvalues().maxCoeff()).epsilon(1e-14));
  CHECK(enc.delta == doctest::Approx(1.4285714).epsilon(1e-7));

  const auto& g = std::get<qsim::DenseGate>(enc.op.body());
  CHECK(g.matrix.rows() == 16);
  CHECK(unitarity_error(g.matrix) <= 1e-12);
  const Eigen::MatrixXd block = g.matrix.topLeftCorner(8, 8).real();
  CHECK((block - ke / enc.delta).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("register widths") {
  CHECK(blockenc::l_width(4) == 2);
  CHECK(blockenc::l_width(9) == 4);
  CHECK(blockenc::d_width(18) == 5);
  CHECK(blockenc::d_width(32) == 5);
  CHECK(blockenc::d_width(40) == 6);
}

TEST_CASE("gap permutation") {
  CHECK(gap_image(2, 5, 3) == 3);
  CHECK(gap_image(2, 5, 4) == 6);
  CHECK(gap_image(2, 5, 7) == 9);
  for (Index i = 0; i < 4; ++i) CHECK(gap_image(3, 5, i) == i);
  for (Index i = 4; i < 8; ++i) CHECK(gap_image(3, 5, i) == i + 4);
  CHECK_THROWS_AS(blockenc::gap_permutation(2, {0, 1, 2}), GuardViolation);
}

TEST_CASE("2x2 global block-encoding, every configuration") {
  const auto d = fem::MbbDomain::mbb(2, 2);
  const auto layout = blockenc::blockencoding_layout(d);
  const auto be = blockenc::global_blockencoding(d, layout);
  CHECK(be.scale == doctest::Approx(4 * 1.4285714).epsilon(1e-7));

  std::vector<Index> all(16);
  for (Index i = 0; i < 16; ++i) all[i] = i;
  const auto blocks = blockenc::extract_blocks(be, all);
  for (Index x = 0; x < 16; ++x) {
    const auto ref = fem::assemble_global(d, StructureConfig::from_index(x, 4));
    CHECK(blockenc::block_error(be, blocks.at(x), ref) <= 1e-10);
  }
  CHECK(blocks.at(0).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(blockenc::verify_block(be, StructureConfig::uniform(4, false),
                               fem::SymMatrix::zero(18)) <= 1e-12);
  CHECK(blockenc::unitarity_defect(be.circuit, layout, 3, 1) <= 1e-10);

  SUBCASE("linearity over single-element blocks") {
    for (Index x = 0; x < 16; ++x) {
      Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(32, 32);
      for (int e = 0; e < 4; ++e)
        if ((x >> (3 - e)) & 1U) sum += blocks.at(Index{1} << (3 - e));
      CHECK((blocks.at(x) - sum).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  SUBCASE("corrupted scale is detected") {
    auto bad = be;
    bad.scale = 2 * be.scale;
    const auto x = StructureConfig::uniform(4, true);
    const auto k = fem::assemble_global(d, x);
    const auto free = d.free_dofs();
    double kmax = 0.0;
    for (int i : free)
      for (int j : free) kmax = std::max(kmax, std::abs(k(i, j)));
    const double err = blockenc::verify_block(bad, x, k);
    CHECK(err == doctest::Approx(kmax / (2 * be.scale)).epsilon(1e-9));
  }
}

TEST_CASE("non-power-of-two element count keeps beta = n_el * delta") {
  const auto d = fem::MbbDomain::mbb(3, 3);
  const auto be =
      blockenc::global_blockencoding(d, blockenc::blockencoding_layout(d));
  CHECK(be.scale == doctest::Approx(9 * 1.4285714).epsilon(1e-7));
  const auto blocks = blockenc::extract_blocks(be, {0b111110000, 0b101011001});
  for (const auto& [x, b] : blocks)
    CHECK(blockenc::block_error(
              be, b, fem::assemble_global(d, StructureConfig::from_index(x, 9))) <=
          1e-10);
}

TEST_CASE("3x4 block-encoding, random configurations and data vectors") {
  // 25 qubits: check U acting on random signal vectors instead of extracting
  // every column.
  const auto d = fem::MbbDomain::mbb(3, 4);
  const auto layout = blockenc::blockencoding_layout(d);
  const auto be = blockenc::global_blockencoding(d, layout);
  const auto& dr = layout["d"];
  const Index dim = Index{1} << dr.width;
  const std::set<Index> fixed(be.projector.excluded.begin(),
                              be.projector.excluded.end());

  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<Index> pick(0, (Index{1} << 12) - 1);
  std::set<Index> configs;
  while (configs.size() < 20) configs.insert(pick(rng));
  const double amp = 1.0 / std::sqrt(20.0);

  std::normal_distribution<double> g;
  for (int trial = 0; trial < 2; ++trial) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    for (Index i = 0; i < dim; ++i)
      if (!fixed.count(i)) v(i) = g(rng);
    v.normalize();

    qsim::QuantumState s(layout);
    auto psi = s.amplitudes();
    psi[0] = 0.0;
    for (Index x : configs)
      for (Index i = 0; i < dim; ++i)
        psi[layout.encode({{"c", x}, {"d", i}})] = amp * v(i);
    qsim::apply(s, be.circuit);

    double err = 0.0;
    for (Index x : configs) {
      Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dim, dim);
      k.topLeftCorner(d.n_dof(), d.n_dof()) =
          fem::assemble_global(d, StructureConfig::from_index(x, 12)).dense();
      const Eigen::VectorXd want = k * v / be.scale;
      for (Index i = 0; i < dim; ++i) {
        if (fixed.count(i)) continue;
        const auto got = s.amplitude(layout.encode({{"c", x}, {"d", i}})) / amp;
        err = std::max(err, std::abs(got - want(i)));
      }
    }
    CHECK(err <= 1e-10);
  }
}

TEST_CASE("config-selected dilation") {
  qsim::RegisterLayout l{{"c", 2}, {"d", 2}, {"a", 1}};
  std::vector<int> targets = l["d"].qubits();
  targets.push_back(l["a"].qubit(0));

  std::map<Index, Eigen::MatrixXcd> consts;
  for (Index x = 0; x < 4; ++x) consts[x] = Eigen::MatrixXcd::Identity(4, 4);
  const auto op = blockenc::config_selected_dilation(consts, l["c"], targets);
  for (Index x = 0; x < 4; ++x)
    for (Index a = 0; a < 2; ++a) {
      auto s = qsim::QuantumState::basis(
          l, l.encode({{"c", x}, {"d", 1}, {"a", a}}));
      qsim::apply(s, op);
      const auto idx = l.encode({{"c", x}, {"d", 1}, {"a", a}});
      CHECK(s.amplitude(idx).real() == doctest::Approx(a == 0 ? 1.0 : -1.0));
    }

  std::map<Index, Eigen::MatrixXcd> mats;
  for (Index x = 0; x < 4; ++x) mats[x] = random_symmetric(4, 0.8, 10 + x);
  const auto sel = blockenc::config_selected_dilation(mats, l["c"], targets);
  for (Index x = 0; x < 4; ++x) {
    const auto want = blockenc::dilate_contraction(mats[x]);
    for (Index j = 0; j < 8; ++j) {
      auto s = qsim::QuantumState::basis(
          l, l.encode({{"c", x}, {"d", j & 3}, {"a", j >> 2}}));
      qsim::apply(s, sel);
      for (Index i = 0; i < 8; ++i) {
        const auto got =
            s.amplitude(l.encode({{"c", x}, {"d", i & 3}, {"a", i >> 2}}));
        CHECK(std::abs(got - want(i, j)) <= 1e-14);
      }
    }
  }
  CHECK(blockenc::unitarity_defect(qsim::Circuit{sel}, l, 2, 3) <= 1e-10);

  std::map<Index, Eigen::MatrixXcd> too_big{{0, random_symmetric(4, 1.5, 1)}};
  CHECK_THROWS_AS(blockenc::config_selected_dilation(too_big, l["c"], targets),
                  ContractViolation);
}
