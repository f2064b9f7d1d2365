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

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

#include "qtopo/error.hpp"
#include "qtopo/grover.hpp"

using namespace qtopo;
using fem::StructureConfig;
using qsim::Index;

namespace {

const qsvt::PolySpec kSpec{1e-3, 0.3, 1e-3};
const qsvt::PolySpec kSpec3{1e-5, 0.3, 1e-3};

grover::ThetaTable table_2x2() {
  return grover::theta_table(
      fem::enumerate_thetas(fem::MbbDomain::mbb(2, 2), qsvt::ExactEven{kSpec}));
}

grover::ThetaTable table_3x3_k5() {
  return grover::theta_table(fem::enumerate_thetas(
      fem::MbbDomain::mbb(3, 3), qsvt::ExactEven{kSpec3}, 5));
}

double closed_form(int r, double m, double n) {
  const double a = std::asin(std::sqrt(m / n));
  return std::pow(std::sin((2 * r + 1) * a), 2);
}

std::set<std::string> names(const std::vector<StructureConfig>& v) {
  std::set<std::string> out;
  for (const auto& x : v) out.insert(x.to_string());
  return out;
}

std::vector<Index> top_k(const std::vector<double>& p, std::size_t k) {
  std::vector<Index> idx(p.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return p[a] > p[b]; });
  idx.resize(k);
  return idx;
}

// Synthetic layout with on-grid phases 1/4 + x/2^n_p.
struct Synthetic {
  int n_p;
  qsim::RegisterLayout layout;
  grover::ThetaTable thetas;
};

Synthetic synthetic(int n_p) {
  Synthetic s{n_p,
              qsim::RegisterLayout{{"g", 1}, {"p", n_p}, {"h", 1}, {"a", 1},
                                   {"d", 1}, {"c", 2}},
              {}};
  for (Index x = 0; x < 4; ++x)
    s.thetas[x] = 0.25 + static_cast<double>(x + 1) * std::ldexp(1.0, -n_p);
  return s;
}

}  // namespace

TEST_CASE("iteration_count") {
  CHECK(grover::iteration_count(16, 3) == 1);
  CHECK(grover::iteration_count(126, 8) == 2);
  CHECK(grover::iteration_count(16, 16) == 0);
  CHECK_THROWS_AS(grover::iteration_count(16, 0), ConfigError);
  CHECK_THROWS_AS(grover::iteration_count(4, 5), ConfigError);
}

TEST_CASE("search parameters") {
  grover::SearchParams p;
  CHECK_NOTHROW(p.validate(4));
  p.theta0 = 0.2;
  CHECK_THROWS_AS(p.validate(4), ConfigError);
  p.theta0 = 0.263;
  p.volume_k = 5;
  CHECK_THROWS_AS(p.validate(4), ConfigError);
  p.volume_k.reset();
  p.r = -1;
  CHECK_THROWS_AS(p.validate(4), ConfigError);
  CHECK(grover::search_support(4, std::nullopt).size() == 16);
  CHECK(grover::search_support(9, 5).size() == 126);
  CHECK_THROWS_AS(grover::search_support(25, std::nullopt), GuardViolation);
}

TEST_CASE("exact-phase oracle marking") {
  const auto t = table_2x2();
  const qsim::RegisterLayout l{{"c", 4}};
  const auto support = grover::search_support(4, std::nullopt);
  auto count_marked = [&](double theta0) {
    const auto op = grover::exact_phase_oracle(t, theta0, l["c"], support);
    const auto& ph = std::get<qsim::DiagonalGate>(op.body()).phases;
    return std::count(ph.begin(), ph.end(), qsim::Amplitude{-1.0});
  };
  CHECK(count_marked(0.263) == 3);
  CHECK(count_marked(0.25) == 0);
  std::size_t below_half = 0;
  for (const auto& [x, th] : t)
    if (th < 0.5) ++below_half;
  CHECK(count_marked(0.5) == static_cast<long>(below_half));

  // Oracle idempotence.
  const auto op = grover::exact_phase_oracle(t, 0.263, l["c"], support);
  qsim::QuantumState s(l);
  for (int q = 0; q < 4; ++q) qsim::apply(s, qsim::hadamard(q));
  const auto ref = s;
  qsim::apply(s, op);
  qsim::apply(s, op);
  for (Index i = 0; i < 16; ++i)
    CHECK(std::abs(s.amplitude(i) - ref.amplitude(i)) <= 1e-15);

  grover::ThetaTable partial{{0, 0.3}};
  CHECK_THROWS_AS(grover::exact_phase_oracle(partial, 0.263, l["c"], support),
                  ContractViolation);
}

TEST_CASE("marked sets match the feasible sets") {
  const auto d2 = fem::MbbDomain::mbb(2, 2);
  const auto r2 = grover::run_grover(d2, {}, table_2x2());
  CHECK(names(r2.marked_set) == std::set<std::string>{"1011", "1101", "1111"});

  const auto d3 = fem::MbbDomain::mbb(3, 3);
  grover::SearchParams p3;
  p3.theta0 = 0.251;
  p3.volume_k = 5;
  const auto r3 = grover::run_grover(d3, p3, table_3x3_k5());
  std::set<std::string> feasible;
  for (const auto& x : fem::enumerate_configs(9, 5))
    if (fem::compliance_direct(d3, x)) feasible.insert(x.to_string());
  CHECK(feasible.size() == 8);
  CHECK(names(r3.marked_set) == feasible);
}

TEST_CASE("comparator rule") {
  CHECK(grover::comparator_marks(8, 5, 0.263));
  CHECK(grover::comparator_marks(24, 5, 0.263));
  CHECK_FALSE(grover::comparator_marks(9, 5, 0.263));
  CHECK_FALSE(grover::comparator_marks(8, 5, 0.25));  // ties unmarked
  CHECK(grover::comparator_marks(0, 5, 0.25));
  CHECK_THROWS_AS(grover::comparator_marks(32, 5, 0.3), ContractViolation);
}

TEST_CASE("diffusion") {
  const qsim::RegisterLayout l{{"c", 4}};
  for (std::optional<int> k : {std::optional<int>{}, std::optional<int>{2}}) {
    const auto dop = grover::diffusion(k, l["c"]);
    const auto init = grover::initial_state(4, k);

    qsim::QuantumState s(l);
    for (Index i = 0; i < 16; ++i) s.amplitudes()[i] = init(i);
    qsim::apply(s, dop);
    for (Index i = 0; i < 16; ++i)
      CHECK(std::abs(s.amplitude(i) - init(i)) <= 1e-14);

    // A vector orthogonal to the initial state is negated.
    Eigen::VectorXcd o = Eigen::VectorXcd::Zero(16);
    o(0b0011) = 1.0;
    o(0b0101) = -1.0;
    o /= std::sqrt(2.0);
    qsim::QuantumState so(l);
    for (Index i = 0; i < 16; ++i) so.amplitudes()[i] = o(i);
    qsim::apply(so, dop);
    for (Index i = 0; i < 16; ++i)
      CHECK(std::abs(so.amplitude(i) + o(i)) <= 1e-14);

    // D^2 = 1 on every basis state.
    for (Index b = 0; b < 16; ++b) {
      auto sb = qsim::QuantumState::basis(l, b);
      qsim::apply(sb, dop);
      qsim::apply(sb, dop);
      for (Index i = 0; i < 16; ++i)
        CHECK(std::abs(sb.amplitude(i) - (i == b ? 1.0 : 0.0)) <= 1e-12);
    }
  }
}

TEST_CASE("Grover success matches the closed form for r = 0..5") {
  const auto d = fem::MbbDomain::mbb(2, 2);
  const auto t = table_2x2();
  for (int r = 0; r <= 5; ++r) {
    grover::SearchParams p;
    p.r = r;
    const auto res = grover::run_grover(d, p, t);
    CHECK(res.r_used == r);
    CHECK(std::abs(res.success_probability - closed_form(r, 3, 16)) <= 1e-9);
    CHECK(std::accumulate(res.distribution.begin(), res.distribution.end(),
                          0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto r0 = grover::run_grover(d, [] {
    grover::SearchParams p;
    p.r = 0;
    return p;
  }(), t);
  for (double q : r0.distribution) CHECK(q == doctest::Approx(1.0 / 16));

  const auto best = grover::run_grover(d, {}, t);
  CHECK(best.r_used == 1);
  CHECK(best.success_probability == doctest::Approx(0.94921875).epsilon(1e-12));
  CHECK(std::abs(best.success_probability - 0.9494) <= 1e-3);
}

TEST_CASE("3x3 Dicke search") {
  const auto d = fem::MbbDomain::mbb(3, 3);
  const auto t = table_3x3_k5();
  grover::SearchParams p;
  p.theta0 = 0.251;
  p.volume_k = 5;
  const auto res = grover::run_grover(d, p, t);
  CHECK(res.r_used == 2);
  CHECK(std::abs(res.success_probability - 0.9144) <= 1e-3);
  CHECK(std::abs(res.success_probability - closed_form(2, 8, 126)) <= 1e-9);

  std::set<Index> marked;
  for (const auto& x : res.marked_set) marked.insert(x.index());
  const auto top = top_k(res.distribution, 8);
  CHECK(std::set<Index>(top.begin(), top.end()) == marked);

  for (int r = 0; r <= 5; ++r) {
    p.r = r;
    const auto rr = grover::run_grover(d, p, t);
    double leak = 0.0;
    for (Index x = 0; x < rr.distribution.size(); ++x)
      if (std::popcount(x) != 5) leak += rr.distribution[x];
    CHECK(leak < 1e-12);
    CHECK(std::abs(rr.success_probability - closed_form(r, 8, 126)) <= 1e-9);
  }
}

TEST_CASE("coherent oracle on on-grid synthetic phases") {
  for (int n_p : {4, 5}) {
    const auto syn = synthetic(n_p);
    const qsim::RegisterLayout small{{"c", 2}};
    for (double theta0 : {0.25, 0.25 + 2.5 / (1 << n_p), 0.45}) {
      const auto oracle = grover::oracle_from_preparation(
          grover::rotation_preparation(syn.thetas, syn.layout), syn.layout,
          theta0);
      const auto exact = grover::exact_phase_oracle(syn.thetas, theta0,
                                                    small["c"], {0, 1, 2, 3});
      for (Index x = 0; x < 4; ++x) {
        const Index in = syn.layout.encode({{"c", x}});
        auto s = qsim::QuantumState::basis(syn.layout, in);
        qsim::apply(s, oracle);
        auto e = qsim::QuantumState::basis(small, x);
        qsim::apply(e, exact);
        double dev = 0.0;
        for (Index i = 0; i < s.amplitudes().size(); ++i) {
          const qsim::Amplitude want = i == in ? e.amplitude(x) : 0.0;
          dev = std::max(dev, std::abs(s.amplitude(i) - want));
        }
        CHECK(dev <= 1e-9);
        // theta0 = 1/4 lies below every phase: identity.
        if (theta0 == 0.25) CHECK(std::abs(s.amplitude(in) - 1.0) <= 1e-9);
      }
    }
  }
}

TEST_CASE("coherent oracle on 2x2 at n_p = 5") {
  const auto d = fem::MbbDomain::mbb(2, 2);
  const auto t = table_2x2();
  grover::SearchParams p;
  p.oracle_backend = grover::OracleBackend::kCoherentQae;
  p.n_p = 5;
  const grover::CoherentSetup setup{qsvt::ExactEven{kSpec},
                                    qae::compute_scaling(d, kSpec).beta};
  const auto layout = qae::coherent_layout(d, p.n_p, true);
  const auto support = grover::search_support(4, std::nullopt);
  const auto oracle = grover::coherent_oracle(d, p, setup, layout, support);

  for (const char* bits : {"1111", "1101", "1011", "0000", "0110"}) {
    const auto x = StructureConfig::from_string(bits);
    const Index in = layout.encode({{"c", x.index()}});
    auto s = qsim::QuantumState::basis(layout, in);
    qsim::apply(s, oracle);
    const double amp = s.amplitude(in).real();

    // The returned amplitude is 1 - 2 m with m the marked QAE mass.
    const auto dist = qae::emulated_distribution(t.at(x.index()), p.n_p);
    double marked = 0.0;
    for (Index k = 0; k < dist.probabilities.size(); ++k)
      if (grover::comparator_marks(k, p.n_p, p.theta0))
        marked += dist.probabilities[k];
    CHECK(std::abs(amp - (1.0 - 2.0 * marked)) <= 1e-9);
    CHECK(std::abs(s.amplitude(in).imag()) <= 1e-9);

    const std::string b = bits;
    if (b == "1111" || b == "1101") CHECK(1.0 - marked <= 0.05);
  }
}

TEST_CASE("coherent Grover ranks feasible designs first") {
  const auto d = fem::MbbDomain::mbb(2, 2);
  grover::SearchParams p;
  p.oracle_backend = grover::OracleBackend::kCoherentQae;
  p.n_p = 5;
  const grover::CoherentSetup setup{qsvt::ExactEven{kSpec},
                                    qae::compute_scaling(d, kSpec).beta};
  const auto res = grover::run_grover(d, p, table_2x2(), setup);
  double worst_feasible = 1.0, best_infeasible = 0.0;
  std::set<Index> feasible;
  for (const auto& x : res.marked_set) feasible.insert(x.index());
  for (Index x = 0; x < 16; ++x) {
    if (feasible.count(x))
      worst_feasible = std::min(worst_feasible, res.distribution[x]);
    else
      best_infeasible = std::max(best_infeasible, res.distribution[x]);
  }
  CHECK(worst_feasible > best_infeasible);
}

TEST_CASE("threshold-descent minimization") {
  const auto d2 = fem::MbbDomain::mbb(2, 2);
  grover::SearchParams p;
  p.n_p = 20;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto res = grover::minimize_compliance(d2, p, seed, table_2x2());
    REQUIRE(res.best.has_value());
    CHECK(res.best->to_string() == "1111");
    CHECK_FALSE(res.budget_exhausted);
    CHECK_FALSE(res.trace.back().found.has_value());
  }

  const auto d3 = fem::MbbDomain::mbb(3, 3);
  grover::SearchParams p3;
  p3.n_p = 20;
  p3.theta0 = 0.251;
  p3.volume_k = 5;
  std::optional<StructureConfig> argmin;
  double best = 1e300;
  for (const auto& x : fem::enumerate_configs(9, 5))
    if (auto c = fem::compliance_direct(d3, x); c && *c < best) {
      best = *c;
      argmin = x;
    }
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto res = grover::minimize_compliance(d3, p3, seed, table_3x3_k5());
    REQUIRE(res.best.has_value());
    CHECK(*res.best == *argmin);
  }
}

TEST_CASE("minimization reports budget exhaustion when nothing is feasible") {
  // Without supports every design is a mechanism under the load.
  const auto mbb = fem::MbbDomain::mbb(2, 2);
  const fem::MbbDomain d(2, 2, {}, {}, mbb.force());
  const auto rows = fem::enumerate_thetas(d, qsvt::ExactEven{kSpec});
  for (const auto& r : rows) CHECK_FALSE(r.compliance.has_value());
  grover::SearchParams p;
  const auto res = grover::minimize_compliance(d, p, 0, grover::theta_table(rows));
  CHECK(res.budget_exhausted);
  CHECK_FALSE(res.best.has_value());
  CHECK(res.trace.size() == 1);
  CHECK(res.trace[0].samples == 10 * 4 + 20);
}
