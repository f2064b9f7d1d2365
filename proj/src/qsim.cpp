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

#include "qtopo/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "qtopo/error.hpp"
#include "qtopo/kernels.hpp"

namespace qtopo::qsim {

namespace {

constexpr double kUnitaryTol = 1e-10;
constexpr int kMaxDenseQubits = 10;

void check_unitary(const Eigen::MatrixXcd& m, const char* what) {
  QTOPO_REQUIRE(m.rows() == m.cols(), ContractViolation,
                std::string(what) + ": matrix is not square");
  const Eigen::MatrixXcd d =
      m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  QTOPO_REQUIRE(d.cwiseAbs().maxCoeff() <= kUnitaryTol, ContractViolation,
                std::string(what) + ": matrix is not unitary");
}

void check_dim(std::size_t n_targets, Eigen::Index rows, const char* what) {
  QTOPO_REQUIRE(n_targets >= 1 && n_targets <= kMaxDenseQubits,
                ContractViolation,
                std::string(what) + ": dense blocks take 1..10 qubits");
  QTOPO_REQUIRE(rows == (Eigen::Index{1} << n_targets), ContractViolation,
                std::string(what) + ": matrix size does not match targets");
}

}  // namespace

int Register::qubit(int bit) const {
  QTOPO_REQUIRE(bit >= 0 && bit < width, ContractViolation,
                "register bit out of range in " + name);
  return offset + bit;
}

std::vector<int> Register::qubits() const {
  std::vector<int> q(width);
  for (int i = 0; i < width; ++i) q[i] = offset + i;
  return q;
}

Index Register::mask() const { return ((Index{1} << width) - 1) << offset; }

RegisterLayout::RegisterLayout(
    std::initializer_list<std::pair<std::string, int>> regs) {
  for (const auto& [name, width] : regs) add(name, width);
}

RegisterLayout& RegisterLayout::add(std::string name, int width) {
  QTOPO_REQUIRE(!has(name), ContractViolation,
                "duplicate register name " + name);
  QTOPO_REQUIRE(width >= 1, ContractViolation,
                "register width must be >= 1 for " + name);
  QTOPO_REQUIRE(total_ + width <= kMaxQubits, GuardViolation,
                "layout needs " + std::to_string(total_ + width) +
                    " qubits; the simulator is limited to " +
                    std::to_string(kMaxQubits));
  regs_.push_back(Register{std::move(name), total_, width});
  total_ += width;
  return *this;
}

const Register& RegisterLayout::operator[](std::string_view name) const {
  for (const auto& r : regs_)
    if (r.name == name) return r;
  throw ContractViolation("no register named " + std::string(name));
}

bool RegisterLayout::has(std::string_view name) const {
  return std::any_of(regs_.begin(), regs_.end(),
                     [&](const Register& r) { return r.name == name; });
}

Index RegisterLayout::encode(const std::map<std::string, Index>& values) const {
  Index out = 0;
  for (const auto& [name, v] : values) {
    const Register& r = (*this)[name];
    QTOPO_REQUIRE(v < (Index{1} << r.width), ContractViolation,
                  "value does not fit register " + name);
    out |= r.place(v);
  }
  return out;
}

QuantumState::QuantumState(RegisterLayout layout)
    : layout_(std::move(layout)),
      amps_(std::size_t{1} << layout_.total_qubits(), Amplitude{0.0}) {
  amps_[0] = 1.0;
}

QuantumState QuantumState::basis(RegisterLayout layout, Index index) {
  QuantumState s(std::move(layout));
  QTOPO_REQUIRE(index < s.amps_.size(), ContractViolation,
                "basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

double QuantumState::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

Operator Operator::dense(std::vector<int> targets, Eigen::MatrixXcd matrix) {
  check_dim(targets.size(), matrix.rows(), "dense");
  check_unitary(matrix, "dense");
  return Operator(DenseGate{std::move(targets), std::move(matrix)});
}

Operator Operator::permutation(std::vector<int> targets,
                               std::vector<Index> table) {
  QTOPO_REQUIRE(!targets.empty() && targets.size() < 40, ContractViolation,
                "permutation needs target qubits");
  QTOPO_REQUIRE(table.size() == (std::size_t{1} << targets.size()),
                ContractViolation, "permutation table size mismatch");
  std::vector<char> seen(table.size(), 0);
  for (Index v : table) {
    QTOPO_REQUIRE(v < table.size() && !seen[v], ContractViolation,
                  "permutation table is not a bijection");
    seen[v] = 1;
  }
  return Operator(PermutationGate{std::move(targets), std::move(table)});
}

Operator Operator::diagonal(std::vector<int> targets,
                            std::vector<Amplitude> phases) {
  QTOPO_REQUIRE(!targets.empty(), ContractViolation,
                "diagonal needs target qubits");
  QTOPO_REQUIRE(phases.size() == (std::size_t{1} << targets.size()),
                ContractViolation, "diagonal size mismatch");
  for (const auto& p : phases)
    QTOPO_REQUIRE(std::abs(std::abs(p) - 1.0) <= kUnitaryTol,
                  ContractViolation, "diagonal entries must be phases");
  return Operator(DiagonalGate{std::move(targets), std::move(phases)});
}

Operator Operator::reflection(std::vector<int> targets, Eigen::VectorXcd v) {
  QTOPO_REQUIRE(!targets.empty(), ContractViolation,
                "reflection needs target qubits");
  QTOPO_REQUIRE(v.size() == (Eigen::Index{1} << targets.size()),
                ContractViolation, "reflection vector size mismatch");
  QTOPO_REQUIRE(std::abs(v.norm() - 1.0) <= kUnitaryTol, ContractViolation,
                "reflection vector must have unit norm");
  return Operator(ReflectionGate{std::move(targets), std::move(v)});
}

Operator Operator::select(std::vector<int> selector, std::vector<int> targets,
                          std::map<Index, Eigen::MatrixXcd> blocks) {
  QTOPO_REQUIRE(!selector.empty() && selector.size() <= 24, ContractViolation,
                "select needs 1..24 selector qubits");
  SelectGate::Table adj;
  for (const auto& [s, m] : blocks) {
    QTOPO_REQUIRE(s < (Index{1} << selector.size()), ContractViolation,
                  "selector value out of range");
    check_dim(targets.size(), m.rows(), "select");
    check_unitary(m, "select");
    adj.emplace(s, m.adjoint());
  }
  return Operator(SelectGate{
      std::move(selector), std::move(targets),
      std::make_shared<const SelectGate::Table>(std::move(blocks)),
      std::make_shared<const SelectGate::Table>(std::move(adj))});
}

Operator Operator::controlled(Control c) const {
  Operator out = *this;
  out.controls_.push_back(c);
  return out;
}

Operator Operator::controlled(const std::vector<Control>& cs) const {
  Operator out = *this;
  out.controls_.insert(out.controls_.end(), cs.begin(), cs.end());
  return out;
}

Operator Operator::adjoint() const {
  Operator out = *this;
  std::visit(
      [](auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, DenseGate>) {
          g.matrix = g.matrix.adjoint().eval();
        } else if constexpr (std::is_same_v<T, PermutationGate>) {
          std::vector<Index> inv(g.table.size());
          for (Index i = 0; i < g.table.size(); ++i) inv[g.table[i]] = i;
          g.table = std::move(inv);
        } else if constexpr (std::is_same_v<T, DiagonalGate>) {
          for (auto& p : g.phases) p = std::conj(p);
        } else if constexpr (std::is_same_v<T, SelectGate>) {
          std::swap(g.blocks, g.adjoint_blocks);
        }
      },
      out.body_);
  return out;
}

std::vector<int> Operator::support() const {
  std::vector<int> q;
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        q = g.targets;
        if constexpr (std::is_same_v<T, SelectGate>)
          q.insert(q.end(), g.selector.begin(), g.selector.end());
      },
      body_);
  for (const auto& c : controls_) q.push_back(c.qubit);
  return q;
}

Circuit& Circuit::append(Operator op) {
  ops_.push_back(std::move(op));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  ops_.insert(ops_.end(), other.ops_.begin(), other.ops_.end());
  return *this;
}

Circuit Circuit::adjoint() const {
  Circuit out;
  out.ops_.reserve(ops_.size());
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it)
    out.ops_.push_back(it->adjoint());
  return out;
}

Circuit Circuit::controlled(Control c) const {
  Circuit out;
  out.ops_.reserve(ops_.size());
  for (const auto& op : ops_) out.ops_.push_back(op.controlled(c));
  return out;
}

void apply(QuantumState& state, const Operator& op, Backend backend) {
  const int n = state.num_qubits();
  const auto sup = op.support();
  std::set<int> seen;
  for (int q : sup) {
    QTOPO_REQUIRE(q >= 0 && q < n, ContractViolation,
                  "operator touches a qubit outside the layout");
    QTOPO_REQUIRE(seen.insert(q).second, ContractViolation,
                  "operator targets and controls overlap");
  }
  kernels::ControlMask cm;
  for (const auto& c : op.controls()) {
    cm.mask |= Index{1} << c.qubit;
    if (c.polarity) cm.value |= Index{1} << c.qubit;
  }
  auto psi = state.amplitudes();
  const bool par = backend == Backend::kParallel;
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        const kernels::TargetSet t(g.targets);
        if constexpr (std::is_same_v<T, DenseGate>) {
          par ? kernels::omp::apply_dense(psi, t, g.matrix.data(), cm)
              : kernels::serial::apply_dense(psi, t, g.matrix.data(), cm);
        } else if constexpr (std::is_same_v<T, PermutationGate>) {
          par ? kernels::omp::apply_permutation(psi, t, g.table.data(), cm)
              : kernels::serial::apply_permutation(psi, t, g.table.data(), cm);
        } else if constexpr (std::is_same_v<T, DiagonalGate>) {
          par ? kernels::omp::apply_diagonal(psi, t, g.phases.data(), cm)
              : kernels::serial::apply_diagonal(psi, t, g.phases.data(), cm);
        } else if constexpr (std::is_same_v<T, ReflectionGate>) {
          par ? kernels::omp::apply_reflection(psi, t, g.v.data(), cm)
              : kernels::serial::apply_reflection(psi, t, g.v.data(), cm);
        } else {
          const kernels::TargetSet sel(g.selector);
          std::vector<const Amplitude*> blocks(sel.dim(), nullptr);
          for (const auto& [s, m] : *g.blocks) blocks[s] = m.data();
          par ? kernels::omp::apply_select(psi, sel, t, blocks, cm)
              : kernels::serial::apply_select(psi, sel, t, blocks, cm);
        }
      },
      op.body());
}

void apply(QuantumState& state, const Circuit& circuit, Backend backend) {
  for (const auto& op : circuit.ops()) apply(state, op, backend);
}

Operator hadamard(int qubit) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd h(2, 2);
  h << s, s, s, -s;
  return Operator::dense({qubit}, h);
}

Operator pauli_x(int qubit) { return Operator::permutation({qubit}, {1, 0}); }

Operator pauli_z(int qubit) { return Operator::diagonal({qubit}, {1.0, -1.0}); }

Operator phase_shift(int qubit, double angle) {
  return Operator::diagonal({qubit}, {1.0, std::polar(1.0, angle)});
}

Operator swap(int a, int b) {
  return Operator::permutation({a, b}, {0, 2, 1, 3});
}

Operator adder_permutation(std::int64_t shift, std::vector<int> targets) {
  QTOPO_REQUIRE(!targets.empty() && targets.size() <= 24, ContractViolation,
                "adder width must be 1..24");
  const auto size = static_cast<std::int64_t>(1) << targets.size();
  const std::int64_t s = ((shift % size) + size) % size;
  std::vector<Index> table(size);
  for (std::int64_t i = 0; i < size; ++i)
    table[i] = static_cast<Index>((i + s) % size);
  return Operator::permutation(std::move(targets), std::move(table));
}

Operator reflection_about(const Eigen::VectorXcd& v, std::vector<int> targets) {
  QTOPO_REQUIRE(std::abs(v.norm() - 1.0) <= kUnitaryTol, ConfigError,
                "reflection_about needs a unit vector");
  return Operator::reflection(std::move(targets), v);
}

std::vector<Control> value_controls(const Register& reg, Index value) {
  std::vector<Control> cs;
  for (int b = 0; b < reg.width; ++b)
    cs.push_back(Control{reg.qubit(b), ((value >> b) & 1U) != 0});
  return cs;
}

Circuit qft(const Register& reg) {
  Circuit c;
  const int n = reg.width;
  for (int i = n - 1; i >= 0; --i) {
    c.append(hadamard(reg.qubit(i)));
    for (int j = i - 1; j >= 0; --j) {
      const double angle = 2.0 * std::numbers::pi / std::ldexp(1.0, i - j + 1);
      c.append(phase_shift(reg.qubit(i), angle).controlled(
          Control{reg.qubit(j), true}));
    }
  }
  for (int i = 0; i < n / 2; ++i)
    c.append(swap(reg.qubit(i), reg.qubit(n - 1 - i)));
  return c;
}

void inverse_qft(QuantumState& state, std::string_view reg) {
  apply(state, qft(state.layout()[reg]).adjoint());
}

Eigen::VectorXcd dicke_vector(int width, int k) {
  QTOPO_REQUIRE(width >= 1 && width <= 24, ContractViolation,
                "Dicke width must be 1..24");
  QTOPO_REQUIRE(k >= 0 && k <= width, ConfigError,
                "Dicke weight must lie in [0, width]");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << width);
  Index count = 0;
  for (Index i = 0; i < static_cast<Index>(v.size()); ++i)
    if (std::popcount(i) == k) ++count;
  const double a = 1.0 / std::sqrt(static_cast<double>(count));
  for (Index i = 0; i < static_cast<Index>(v.size()); ++i)
    if (std::popcount(i) == k) v[i] = a;
  return v;
}

void prepare_dicke(QuantumState& state, std::string_view name, int k) {
  const Register& reg = state.layout()[name];
  const Eigen::VectorXcd d = dicke_vector(reg.width, k);
  auto psi = state.amplitudes();
  const Index m = reg.mask();
  for (Index i = 0; i < psi.size(); ++i)
    QTOPO_REQUIRE((i & m) == 0 || std::abs(psi[i]) <= 1e-12, ConfigError,
                  "prepare_dicke needs the register in |0...0>");
  for (Index i = 0; i < psi.size(); ++i) {
    if (i & m) continue;
    const Amplitude a = psi[i];
    if (a == Amplitude{0.0}) continue;
    for (Index v = 0; v < static_cast<Index>(d.size()); ++v)
      psi[i | reg.place(v)] = a * d[v];
  }
}

std::vector<double> measure_distribution(const QuantumState& state,
                                         std::string_view name) {
  const Register& reg = state.layout()[name];
  std::vector<double> p(std::size_t{1} << reg.width, 0.0);
  const auto psi = state.amplitudes();
  for (Index i = 0; i < psi.size(); ++i) p[reg.value(i)] += std::norm(psi[i]);
  return p;
}

std::vector<Index> sample(const std::vector<double>& probabilities, int shots,
                          std::mt19937_64& rng) {
  QTOPO_REQUIRE(shots >= 0, ConfigError, "shots must be non-negative");
  std::discrete_distribution<Index> dist(probabilities.begin(),
                                         probabilities.end());
  std::vector<Index> out(shots);
  for (auto& s : out) s = dist(rng);
  return out;
}

std::string to_bits(Index value, int width) {
  std::string s(width, '0');
  for (int b = 0; b < width; ++b)
    if ((value >> b) & 1U) s[width - 1 - b] = '1';
  return s;
}

void dump_statevector_csv(const QuantumState& state, const std::string& path) {
  std::ofstream os(path);
  QTOPO_REQUIRE(os.good(), ConfigError, "cannot open " + path);
  os.precision(17);
  os << "index,real,imag\n";
  const auto psi = state.amplitudes();
  for (Index i = 0; i < psi.size(); ++i)
    os << i << ',' << psi[i].real() << ',' << psi[i].imag() << '\n';
}

}  // namespace qtopo::qsim
