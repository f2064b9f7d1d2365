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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtopo/fem.hpp"
#include "qtopo/qsim.hpp"

namespace qtopo::blockenc {

/// Signal subspace: every ancilla register at |0...0> and the data register
/// outside the excluded index set.
struct ProjectorSpec {
  std::vector<std::string> ancillas;
  std::string data;
  std::vector<qsim::Index> excluded;
};

struct BlockEncoding {
  qsim::Circuit circuit;
  qsim::RegisterLayout layout;
  ProjectorSpec projector;
  double scale = 1.0;
  /// Register holding the configuration, empty if the encoding has none.
  std::string config_register;
};

/// [[M, sqrt(1 - M M^+)], [sqrt(1 - M^+ M), -M^+]], ancilla as the top bit.
Eigen::MatrixXcd dilate_contraction(const Eigen::MatrixXcd& m);

struct ElementEncoding {
  qsim::Operator op;
  double delta = 0.0;
};

/// Dilation of K^el/delta on targets {d0, d1, d2, b}, delta = ||K^el||_2.
ElementEncoding element_blockencoding(const fem::Material& material,
                                      std::vector<int> targets);

int l_width(int n_el);
int d_width(int n_dof);

/// P_{+4} . (P_{+2(n_y-1)} on the low bits, fired by MSB = 0) . P_{-4}.
qsim::Circuit gap_permutation(int n_y, const std::vector<int>& d_qubits);

/// Registers c, l, v, z, b, d sized for the domain, plus any extras.
qsim::RegisterLayout blockencoding_layout(
    const fem::MbbDomain& domain,
    const std::vector<std::pair<std::string, int>>& extra = {});

/// LCU block-encoding of K(x)/beta controlled by the configuration register,
/// beta = n_el * delta.
BlockEncoding global_blockencoding(const fem::MbbDomain& domain,
                                   const qsim::RegisterLayout& layout);

/// sum_x |x><x| (x) dilate_contraction(M(x)); data qubits first, ancilla last.
qsim::Operator config_selected_dilation(
    const std::map<qsim::Index, Eigen::MatrixXcd>& blocks,
    const qsim::Register& selector, std::vector<int> targets);

/// Signal block for configuration index x: entries <x,0,i|U|x,0,j> over the
/// whole data register, zero on excluded rows and columns.
Eigen::MatrixXcd extract_block(const BlockEncoding& be, qsim::Index config);

/// Same as extract_block for many configurations at once. Relies on the
/// configuration register acting only as a control.
std::map<qsim::Index, Eigen::MatrixXcd> extract_blocks(
    const BlockEncoding& be, const std::vector<qsim::Index>& configs);

/// Max |block - reference/scale| on the signal subspace. Reference entries
/// beyond its order count as zero.
double block_error(const BlockEncoding& be, const Eigen::MatrixXcd& block,
                   const fem::SymMatrix& reference);

double verify_block(const BlockEncoding& be,
                    const fem::StructureConfig& config,
                    const fem::SymMatrix& reference);

/// max ||U^+ U psi - psi||_inf and | ||U psi|| - 1 | over random states.
double unitarity_defect(const qsim::Circuit& circuit,
                        const qsim::RegisterLayout& layout, int samples,
                        std::uint64_t seed);

}  // namespace qtopo::blockenc
