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

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace qtopo::qsim {

using Amplitude = std::complex<double>;
using Index = std::uint64_t;

inline constexpr int kMaxQubits = 26;

struct Register {
  std::string name;
  int offset = 0;
  int width = 0;

  int qubit(int bit) const;
  std::vector<int> qubits() const;
  Index mask() const;
  Index value(Index basis) const { return (basis & mask()) >> offset; }
  Index place(Index value) const { return value << offset; }
};

/// Named registers packed from qubit 0 upward in insertion order. Inside a
/// register, bit 0 is the least significant bit of its integer value.
class RegisterLayout {
 public:
  RegisterLayout() = default;
  RegisterLayout(std::initializer_list<std::pair<std::string, int>> regs);

  RegisterLayout& add(std::string name, int width);
  const Register& operator[](std::string_view name) const;
  bool has(std::string_view name) const;
  int total_qubits() const { return total_; }
  const std::vector<Register>& registers() const { return regs_; }

  /// Basis index with the given register values; others are zero.
  Index encode(const std::map<std::string, Index>& values) const;

 private:
  std::vector<Register> regs_;
  int total_ = 0;
};

class QuantumState {
 public:
  /// All qubits in |0>.
  explicit QuantumState(RegisterLayout layout);
  static QuantumState basis(RegisterLayout layout, Index index);

  const RegisterLayout& layout() const { return layout_; }
  int num_qubits() const { return layout_.total_qubits(); }
  std::span<Amplitude> amplitudes() { return amps_; }
  std::span<const Amplitude> amplitudes() const { return amps_; }
  Amplitude amplitude(Index i) const { return amps_.at(i); }
  double norm() const;

 private:
  RegisterLayout layout_;
  std::vector<Amplitude> amps_;
};

struct Control {
  int qubit = 0;
  bool polarity = true;  // false: open control, fires on |0>
};

struct DenseGate {
  std::vector<int> targets;
  Eigen::MatrixXcd matrix;
};
struct PermutationGate {
  std::vector<int> targets;
  std::vector<Index> table;
};
struct DiagonalGate {
  std::vector<int> targets;
  std::vector<Amplitude> phases;
};
/// 2|v><v| - 1 on the targets.
struct ReflectionGate {
  std::vector<int> targets;
  Eigen::VectorXcd v;
};
/// sum_s |s><s| (x) blocks[s]; missing selector values act as identity.
/// Tables are shared between copies; the adjoint table is built once.
struct SelectGate {
  using Table = std::map<Index, Eigen::MatrixXcd>;
  std::vector<int> selector;
  std::vector<int> targets;
  std::shared_ptr<const Table> blocks;
  std::shared_ptr<const Table> adjoint_blocks;
};

class Operator {
 public:
  using Body = std::variant<DenseGate, PermutationGate, DiagonalGate,
                            ReflectionGate, SelectGate>;

  static Operator dense(std::vector<int> targets, Eigen::MatrixXcd matrix);
  static Operator permutation(std::vector<int> targets,
                              std::vector<Index> table);
  static Operator diagonal(std::vector<int> targets,
                           std::vector<Amplitude> phases);
  static Operator reflection(std::vector<int> targets, Eigen::VectorXcd v);
  static Operator select(std::vector<int> selector, std::vector<int> targets,
                         std::map<Index, Eigen::MatrixXcd> blocks);

  Operator controlled(Control c) const;
  Operator controlled(const std::vector<Control>& cs) const;
  Operator adjoint() const;

  const Body& body() const { return body_; }
  const std::vector<Control>& controls() const { return controls_; }
  /// Every qubit the operator reads or writes, controls included.
  std::vector<int> support() const;

 private:
  explicit Operator(Body body) : body_(std::move(body)) {}
  Body body_;
  std::vector<Control> controls_;
};

class Circuit {
 public:
  Circuit() = default;
  Circuit(std::initializer_list<Operator> ops) : ops_(ops) {}

  Circuit& append(Operator op);
  Circuit& append(const Circuit& other);
  Circuit adjoint() const;
  Circuit controlled(Control c) const;

  const std::vector<Operator>& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }

 private:
  std::vector<Operator> ops_;
};

enum class Backend { kParallel, kSerial };

void apply(QuantumState& state, const Operator& op,
           Backend backend = Backend::kParallel);
void apply(QuantumState& state, const Circuit& circuit,
           Backend backend = Backend::kParallel);

Operator hadamard(int qubit);
Operator pauli_x(int qubit);
Operator pauli_z(int qubit);
/// diag(1, e^{i angle}).
Operator phase_shift(int qubit, double angle);
Operator swap(int a, int b);

/// i -> (i + shift) mod 2^width on the target qubits (LSB first).
Operator adder_permutation(std::int64_t shift, std::vector<int> targets);

/// 2|v><v| - 1. Rejects v unless it has unit norm.
Operator reflection_about(const Eigen::VectorXcd& v, std::vector<int> targets);

/// Controls that fire exactly when the register holds `value`.
std::vector<Control> value_controls(const Register& reg, Index value);

/// |j> -> 2^{-n/2} sum_k e^{2 pi i jk / 2^n} |k>.
Circuit qft(const Register& reg);
void inverse_qft(QuantumState& state, std::string_view reg);

Eigen::VectorXcd dicke_vector(int width, int k);
void prepare_dicke(QuantumState& state, std::string_view reg, int k);

/// Marginal distribution of a register, indexed by its integer value.
std::vector<double> measure_distribution(const QuantumState& state,
                                         std::string_view reg);
std::vector<Index> sample(const std::vector<double>& probabilities, int shots,
                          std::mt19937_64& rng);

/// MSB-first binary string of width bits.
std::string to_bits(Index value, int width);

/// CSV "index,real,imag" rows.
void dump_statevector_csv(const QuantumState& state, const std::string& path);

}  // namespace qtopo::qsim
