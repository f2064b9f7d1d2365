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

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qtopo::fem {

struct Material {
  double young_modulus = 1.0;
  double poisson_ratio = 0.3;

  /// Throws ConfigError unless E > 0 and 0 <= nu < 0.5.
  void validate() const;
};

/// Dense real symmetric matrix. The stored entries are exactly symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;
  /// Accepts a matrix that is symmetric up to round-off and symmetrizes it.
  explicit SymMatrix(const Eigen::MatrixXd& m);
  static SymMatrix zero(int order);

  int order() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& dense() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Eigen::MatrixXd m_;
};

/// Binary material assignment. Element e (1-indexed, column-wise) is bit x_e.
class StructureConfig {
 public:
  StructureConfig() = default;
  explicit StructureConfig(std::vector<std::uint8_t> bits);

  /// Parses "1011" as x_1 = 1, x_2 = 0, x_3 = 1, x_4 = 1.
  static StructureConfig from_string(std::string_view bits);
  static StructureConfig uniform(int n_el, bool solid);
  /// Register value with x_1 as the most significant bit.
  static StructureConfig from_index(std::uint64_t index, int n_el);

  std::uint64_t index() const;
  int size() const { return static_cast<int>(bits_.size()); }
  bool solid(int e) const { return bits_.at(e - 1) != 0; }
  int hamming_weight() const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  std::string to_string() const;
  /// Row-major picture of the mesh, '#' solid and '.' void, rows joined by '\n'.
  std::string glyph_grid(int n_y) const;

  auto operator<=>(const StructureConfig&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

class MbbDomain {
 public:
  /// Standard half-MBB beam: left edge fixed horizontally, bottom-right corner
  /// fixed vertically, unit downward load at the top-left corner.
  static MbbDomain mbb(int n_x, int n_y, Material material = {});

  MbbDomain(int n_x, int n_y, Material material, std::vector<int> fixed_dofs,
            Eigen::VectorXd force);

  int n_x() const { return n_x_; }
  int n_y() const { return n_y_; }
  int n_el() const { return n_x_ * n_y_; }
  int n_dof() const { return 2 * (n_x_ + 1) * (n_y_ + 1); }
  const Material& material() const { return material_; }
  const std::vector<int>& fixed_dofs() const { return fixed_; }
  const Eigen::VectorXd& force() const { return force_; }

  std::vector<int> free_dofs() const;
  Eigen::VectorXd free_force() const;

 private:
  int n_x_;
  int n_y_;
  Material material_;
  std::vector<int> fixed_;
  Eigen::VectorXd force_;
};

SymMatrix element_stiffness(const Material& material);

/// Global offset of element e's block, 2(e-1+floor((e-1)/n_y)).
int offset_delta(int e, int n_y);

/// Global DoFs of element e in local order.
std::array<int, 8> element_dofs(int e, int n_y);

SymMatrix assemble_global(const MbbDomain& domain,
                          const StructureConfig& config);

/// Assembly with an arbitrary stiffness weight per element.
SymMatrix assemble_weighted(const MbbDomain& domain,
                            const std::vector<double>& weights);

SymMatrix reduce_free(const SymMatrix& k, const std::vector<int>& fixed_dofs);

/// f^T K_free^+ f, or nullopt when the load is not in the range of K_free
/// (a disconnected or under-supported design). Void elements get stiffness
/// weight void_density^penalty.
std::optional<double> compliance_direct(const MbbDomain& domain,
                                        const StructureConfig& config,
                                        double void_density = 0.0,
                                        double penalty = 1.0);

double volume_fraction(const StructureConfig& config);

/// All configs of n_el bits in index order, optionally of fixed weight k.
std::vector<StructureConfig> enumerate_configs(int n_el,
                                               std::optional<int> weight);

std::string to_csv(const SymMatrix& m);

}  // namespace qtopo::fem
