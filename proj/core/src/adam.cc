// Copyright 2026 The Molfuse Authors.
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
#include "molfuse/adam.h"

#include <cmath>
#include <stdexcept>

namespace molfuse {

Adam::Adam(const ParameterSet& params, AdamOptions options)
    : options_(options) {
  for (const Parameter& p : params.params()) {
    m_.emplace_back(p.value.size(), 0.0);
    v_.emplace_back(p.value.size(), 0.0);
  }
}

void Adam::Step(ParameterSet& params) {
  auto& list = params.params();
  if (list.size() != m_.size()) {
    throw std::logic_error("Adam::Step: parameter set changed size");
  }
  for (const Parameter& p : list) {
    if (!p.value.requires_grad()) {
      throw std::logic_error("Adam::Step: parameter " + p.name +
                             " has no gradient");
    }
  }
  ++step_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (size_t k = 0; k < list.size(); ++k) {
    Parameter& p = list[k];
    auto values = p.value.mutable_data();
    const auto grad = p.value.grad();
    const double l2 = p.kind == ParamKind::kEmbedding ? 0.0 : options_.l2;
    auto& m = m_[k];
    auto& v = v_[k];
    for (size_t i = 0; i < values.size(); ++i) {
      const double g = grad[i] + l2 * values[i];
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      values[i] -= options_.learning_rate * m_hat /
                   (std::sqrt(v_hat) + options_.epsilon);
    }
    p.value.ZeroGrad();
  }
}

}  // namespace molfuse
