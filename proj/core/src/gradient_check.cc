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
#include "molfuse/gradient_check.h"

#include <algorithm>
#include <cmath>

namespace molfuse {

GradientCheckResult GradientCheck(const std::function<Tensor()>& loss_fn,
                                  std::vector<Tensor> inputs, double epsilon,
                                  size_t max_coordinates) {
  for (Tensor& t : inputs) t.ZeroGrad();
  loss_fn().Backward();
  std::vector<std::vector<double>> analytic;
  for (const Tensor& t : inputs) {
    analytic.emplace_back(t.grad().begin(), t.grad().end());
  }

  GradientCheckResult result;
  for (size_t k = 0; k < inputs.size(); ++k) {
    auto values = inputs[k].mutable_data();
    const size_t n = values.size();
    size_t stride = 1;
    if (max_coordinates > 0 && n > max_coordinates) {
      stride = (n + max_coordinates - 1) / max_coordinates;
    }
    for (size_t i = 0; i < n; i += stride) {
      const double saved = values[i];
      double plus, minus;
      {
        NoGradGuard no_grad;
        values[i] = saved + epsilon;
        plus = loss_fn().item();
        values[i] = saved - epsilon;
        minus = loss_fn().item();
      }
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double a = analytic[k][i];
      const double err = std::abs(a - numeric) /
                         std::max(1e-8, std::abs(a) + std::abs(numeric));
      result.max_relative_error = std::max(result.max_relative_error, err);
      ++result.coordinates;
    }
  }
  for (Tensor& t : inputs) t.ZeroGrad();
  return result;
}

}  // namespace molfuse
