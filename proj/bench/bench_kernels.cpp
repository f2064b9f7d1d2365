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

// Serial reference vs OpenMP statevector kernels.
// Arg 0 is the register width in qubits.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "qtopo/kernels.hpp"

namespace k = qtopo::qsim::kernels;
using k::Amplitude;
using k::Index;

namespace {

std::vector<Amplitude> random_state(int qubits) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::vector<Amplitude> v(Index{1} << qubits);
  double norm = 0.0;
  for (auto& a : v) {
    a = {g(rng), g(rng)};
    norm += std::norm(a);
  }
  for (auto& a : v) a /= std::sqrt(norm);
  return v;
}

// Unitary DFT matrix, column-major.
std::vector<Amplitude> dft(Index dim) {
  std::vector<Amplitude> m(dim * dim);
  const double s = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Index c = 0; c < dim; ++c)
    for (Index r = 0; r < dim; ++r)
      m[c * dim + r] = std::polar(s, 2 * std::numbers::pi * r * c / dim);
  return m;
}

// Targets spread over low and high qubits so blocks are strided.
std::vector<int> targets(int qubits, int count) {
  std::vector<int> t;
  for (int i = 0; i < count; ++i) t.push_back((i * (qubits - 1)) / (count - 1));
  return t;
}

template <auto Kernel>
void dense(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto psi = random_state(n);
  const k::TargetSet t(targets(n, 3));
  const auto m = dft(t.dim());
  for (auto _ : state) {
    Kernel(psi, t, m.data(), k::ControlMask{});
    benchmark::DoNotOptimize(psi.data());
  }
  state.SetItemsProcessed(state.iterations() * psi.size());
}

template <auto Kernel>
void permutation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto psi = random_state(n);
  const k::TargetSet t(targets(n, 4));
  std::vector<Index> table(t.dim());
  for (Index i = 0; i < t.dim(); ++i) table[i] = (i + 5) % t.dim();
  for (auto _ : state) {
    Kernel(psi, t, table.data(), k::ControlMask{});
    benchmark::DoNotOptimize(psi.data());
  }
  state.SetItemsProcessed(state.iterations() * psi.size());
}

template <auto Kernel>
void diagonal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto psi = random_state(n);
  const k::TargetSet t(targets(n, 4));
  std::vector<Amplitude> phases(t.dim());
  for (Index i = 0; i < t.dim(); ++i) phases[i] = std::polar(1.0, 0.1 * i);
  for (auto _ : state) {
    Kernel(psi, t, phases.data(), k::ControlMask{});
    benchmark::DoNotOptimize(psi.data());
  }
  state.SetItemsProcessed(state.iterations() * psi.size());
}

template <auto Kernel>
void reflection(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto psi = random_state(n);
  const k::TargetSet t(targets(n, 5));
  const std::vector<Amplitude> v(t.dim(),
                                 1.0 / std::sqrt(static_cast<double>(t.dim())));
  for (auto _ : state) {
    Kernel(psi, t, v.data(), k::ControlMask{});
    benchmark::DoNotOptimize(psi.data());
  }
  state.SetItemsProcessed(state.iterations() * psi.size());
}

template <auto Kernel>
void select(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto psi = random_state(n);
  const k::TargetSet sel({n - 1, n - 2});
  const k::TargetSet t({0, 1, 2});
  const auto m = dft(t.dim());
  const std::vector<const Amplitude*> blocks{m.data(), nullptr, m.data(),
                                             m.data()};
  for (auto _ : state) {
    Kernel(psi, sel, t, blocks, k::ControlMask{});
    benchmark::DoNotOptimize(psi.data());
  }
  state.SetItemsProcessed(state.iterations() * psi.size());
}

#define QTOPO_BENCH_PAIR(name)                                          \
  BENCHMARK(name<k::serial::apply_##name>)->Name(#name "/serial")       \
      ->DenseRange(14, 20, 3);                                          \
  BENCHMARK(name<k::omp::apply_##name>)->Name(#name "/omp")             \
      ->DenseRange(14, 20, 3)

QTOPO_BENCH_PAIR(dense);
QTOPO_BENCH_PAIR(permutation);
QTOPO_BENCH_PAIR(diagonal);
QTOPO_BENCH_PAIR(reflection);
QTOPO_BENCH_PAIR(select);

}  // namespace

BENCHMARK_MAIN();
