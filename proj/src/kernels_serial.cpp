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

#include "qtopo/kernels.hpp"

namespace qtopo::qsim::kernels::serial {

// Every kernel here reads from a frozen copy and writes each output amplitude
// from its definition, one index at a time.

void apply_dense(std::span<Amplitude> psi, const TargetSet& t,
                 const Amplitude* m, ControlMask c) {
  const std::vector<Amplitude> in(psi.begin(), psi.end());
  const Index dim = t.dim();
  for (Index i = 0; i < in.size(); ++i) {
    if (!c.pass(i)) continue;
    const Index row = t.local(i);
    const Index b = i & ~t.mask;
    Amplitude acc = 0;
    for (Index j = 0; j < dim; ++j) acc += m[row + j * dim] * in[b | t.offsets[j]];
    psi[i] = acc;
  }
}

void apply_permutation(std::span<Amplitude> psi, const TargetSet& t,
                       const Index* table, ControlMask c) {
  const std::vector<Amplitude> in(psi.begin(), psi.end());
  for (Index i = 0; i < in.size(); ++i) {
    if (!c.pass(i)) continue;
    psi[(i & ~t.mask) | t.offsets[table[t.local(i)]]] = in[i];
  }
}

void apply_diagonal(std::span<Amplitude> psi, const TargetSet& t,
                    const Amplitude* phases, ControlMask c) {
  for (Index i = 0; i < psi.size(); ++i)
    if (c.pass(i)) psi[i] *= phases[t.local(i)];
}

void apply_reflection(std::span<Amplitude> psi, const TargetSet& t,
                      const Amplitude* v, ControlMask c) {
  const std::vector<Amplitude> in(psi.begin(), psi.end());
  const Index dim = t.dim();
  for (Index i = 0; i < in.size(); ++i) {
    if (!c.pass(i)) continue;
    const Index b = i & ~t.mask;
    Amplitude overlap = 0;
    for (Index j = 0; j < dim; ++j)
      overlap += std::conj(v[j]) * in[b | t.offsets[j]];
    psi[i] = 2.0 * v[t.local(i)] * overlap - in[i];
  }
}

void apply_select(std::span<Amplitude> psi, const TargetSet& selector,
                  const TargetSet& t, const std::vector<const Amplitude*>& m,
                  ControlMask c) {
  const std::vector<Amplitude> in(psi.begin(), psi.end());
  const Index dim = t.dim();
  for (Index i = 0; i < in.size(); ++i) {
    if (!c.pass(i)) continue;
    const Amplitude* block = m[selector.local(i)];
    if (!block) continue;
    const Index row = t.local(i);
    const Index b = i & ~t.mask;
    Amplitude acc = 0;
    for (Index j = 0; j < dim; ++j)
      acc += block[row + j * dim] * in[b | t.offsets[j]];
    psi[i] = acc;
  }
}

}  // namespace qtopo::qsim::kernels::serial
