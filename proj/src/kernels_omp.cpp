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

#include <algorithm>
#include <bit>

#include "qtopo/kernels.hpp"

namespace qtopo::qsim::kernels {

TargetSet::TargetSet(std::vector<int> q) : qubits(std::move(q)) {
  sorted = qubits;
  std::sort(sorted.begin(), sorted.end());
  for (int b : qubits) mask |= Index{1} << b;
  offsets.resize(dim());
  for (Index j = 0; j < dim(); ++j) {
    Index off = 0;
    for (std::size_t k = 0; k < qubits.size(); ++k)
      if ((j >> k) & 1U) off |= Index{1} << qubits[k];
    offsets[j] = off;
  }
}

Index TargetSet::local(Index i) const {
  Index v = 0;
  for (std::size_t k = 0; k < qubits.size(); ++k)
    v |= ((i >> qubits[k]) & 1U) << k;
  return v;
}

Index TargetSet::base(Index r) const {
  for (int b : sorted) {
    const Index low = r & ((Index{1} << b) - 1);
    r = low | ((r >> b) << (b + 1));
  }
  return r;
}

namespace omp {
namespace {

std::int64_t block_count(std::span<Amplitude> psi, const TargetSet& t) {
  return static_cast<std::int64_t>(psi.size() >> t.qubits.size());
}

}  // namespace

void apply_dense(std::span<Amplitude> psi, const TargetSet& t,
                 const Amplitude* m, ControlMask c) {
  const std::int64_t n = block_count(psi, t);
  const Index dim = t.dim();
#pragma omp parallel
  {
    std::vector<Amplitude> in(dim);
#pragma omp for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
      const Index b = t.base(static_cast<Index>(r));
      if (!c.pass(b)) continue;
      for (Index j = 0; j < dim; ++j) in[j] = psi[b | t.offsets[j]];
      for (Index i = 0; i < dim; ++i) {
        Amplitude acc = 0;
        for (Index j = 0; j < dim; ++j) acc += m[i + j * dim] * in[j];
        psi[b | t.offsets[i]] = acc;
      }
    }
  }
}

void apply_permutation(std::span<Amplitude> psi, const TargetSet& t,
                       const Index* table, ControlMask c) {
  const std::int64_t n = block_count(psi, t);
  const Index dim = t.dim();
#pragma omp parallel
  {
    std::vector<Amplitude> in(dim);
#pragma omp for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
      const Index b = t.base(static_cast<Index>(r));
      if (!c.pass(b)) continue;
      for (Index j = 0; j < dim; ++j) in[j] = psi[b | t.offsets[j]];
      for (Index j = 0; j < dim; ++j) psi[b | t.offsets[table[j]]] = in[j];
    }
  }
}

void apply_diagonal(std::span<Amplitude> psi, const TargetSet& t,
                    const Amplitude* phases, ControlMask c) {
  const std::int64_t n = block_count(psi, t);
  const Index dim = t.dim();
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n; ++r) {
    const Index b = t.base(static_cast<Index>(r));
    if (!c.pass(b)) continue;
    for (Index j = 0; j < dim; ++j) psi[b | t.offsets[j]] *= phases[j];
  }
}

void apply_reflection(std::span<Amplitude> psi, const TargetSet& t,
                      const Amplitude* v, ControlMask c) {
  const std::int64_t n = block_count(psi, t);
  const Index dim = t.dim();
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n; ++r) {
    const Index b = t.base(static_cast<Index>(r));
    if (!c.pass(b)) continue;
    Amplitude overlap = 0;
    for (Index j = 0; j < dim; ++j)
      overlap += std::conj(v[j]) * psi[b | t.offsets[j]];
    const Amplitude two = 2.0 * overlap;
    for (Index j = 0; j < dim; ++j) {
      Amplitude& a = psi[b | t.offsets[j]];
      a = two * v[j] - a;
    }
  }
}

void apply_select(std::span<Amplitude> psi, const TargetSet& selector,
                  const TargetSet& t, const std::vector<const Amplitude*>& m,
                  ControlMask c) {
  const std::int64_t n = block_count(psi, t);
  const Index dim = t.dim();
#pragma omp parallel
  {
    std::vector<Amplitude> in(dim);
#pragma omp for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
      const Index b = t.base(static_cast<Index>(r));
      if (!c.pass(b)) continue;
      const Amplitude* block = m[selector.local(b)];
      if (!block) continue;
      for (Index j = 0; j < dim; ++j) in[j] = psi[b | t.offsets[j]];
      for (Index i = 0; i < dim; ++i) {
        Amplitude acc = 0;
        for (Index j = 0; j < dim; ++j) acc += block[i + j * dim] * in[j];
        psi[b | t.offsets[i]] = acc;
      }
    }
  }
}

}  // namespace omp
}  // namespace qtopo::qsim::kernels
