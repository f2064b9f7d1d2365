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

#include <cstdint>

#include "qtopo/qae.hpp"

namespace qtopo::fem {

std::vector<ThetaRow> enumerate_thetas(const MbbDomain& domain,
                                       const qsvt::Filter& filter,
                                       std::optional<int> volume_k) {
  const auto configs = enumerate_configs(domain.n_el(), volume_k);
  const qae::ScalingConstants k = qae::compute_scaling(domain, qsvt::PolySpec{});
  std::vector<ThetaRow> rows(configs.size());
  const auto n = static_cast<std::int64_t>(configs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    ThetaRow& r = rows[i];
    r.config = configs[i];
    r.compliance = compliance_direct(domain, r.config);
    const auto rec = qae::phase_of_config(domain, r.config, k, filter);
    r.t = rec.t_value;
    r.theta = rec.theta;
  }
  return rows;
}

}  // namespace qtopo::fem
