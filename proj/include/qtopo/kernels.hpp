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

// Low-level statevector kernels. Two implementations share one interface:
// `omp` gathers each 2^k target block and works on it in place, spreading
// blocks over OpenMP threads; `serial` is a deliberately naive out-of-place
// per-amplitude version kept as the reference for tests and benchmarks.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace qtopo::qsim::kernels {

using Amplitude = std::complex<double>;
using Index = std::uint64_t;

/// Target qubits; local bit j of a block index lives on qubits[j].
struct TargetSet {
  explicit TargetSet(std::vector<int> qubits);

  std::vector<int> qubits;
  std::vector<int> sorted;
  std::vector<Index> offsets;  // global offset of each local index
  Index mask = 0;

  Index dim() const { return Index{1} << qubits.size(); }
  Index local(Index i) const;
  /// Spreads r over the non-target bit positions.
  Index base(Index r) const;
};

/// An amplitude index i takes part iff (i & mask) == value.
struct ControlMask {
  Index mask = 0;
  Index value = 0;
  bool pass(Index i) const { return (i & mask) == value; }
};

namespace omp {

void apply_dense(std::span<Amplitude> psi, const TargetSet& t,
                 const Amplitude* m, ControlMask c);
void apply_permutation(std::span<Amplitude> psi, const TargetSet& t,
                       const Index* table, ControlMask c);
void apply_diagonal(std::span<Amplitude> psi, const TargetSet& t,
                    const Amplitude* phases, ControlMask c);
/// psi <- (2|v><v| - 1) psi on the target block.
void apply_reflection(std::span<Amplitude> psi, const TargetSet& t,
                      const Amplitude* v, ControlMask c);
/// Dense block chosen by the selector value; nullptr means identity.
/// Matrices (here and in apply_dense) are column-major, dim x dim.
void apply_select(std::span<Amplitude> psi, const TargetSet& selector,
                  const TargetSet& t, const std::vector<const Amplitude*>& m,
                  ControlMask c);

}  // namespace omp

namespace serial {

void apply_dense(std::span<Amplitude> psi, const TargetSet& t,
                 const Amplitude* m, ControlMask c);
void apply_permutation(std::span<Amplitude> psi, const TargetSet& t,
                       const Index* table, ControlMask c);
void apply_diagonal(std::span<Amplitude> psi, const TargetSet& t,
                    const Amplitude* phases, ControlMask c);
void apply_reflection(std::span<Amplitude> psi, const TargetSet& t,
                      const Amplitude* v, ControlMask c);
void apply_select(std::span<Amplitude> psi, const TargetSet& selector,
                  const TargetSet& t, const std::vector<const Amplitude*>& m,
                  ControlMask c);

}  // namespace serial

}  // namespace qtopo::qsim::kernels
