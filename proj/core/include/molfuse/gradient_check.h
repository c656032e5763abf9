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
#ifndef MOLFUSE_GRADIENT_CHECK_H_
#define MOLFUSE_GRADIENT_CHECK_H_

#include <functional>
#include <vector>

#include "molfuse/tensor.h"

namespace molfuse {

struct GradientCheckResult {
  double max_relative_error = 0.0;
  size_t coordinates = 0;
};

// Compares the analytic gradient of loss_fn() with respect to each tensor in
// inputs against central differences with step epsilon. The relative error
// per coordinate is |a - n| / max(1e-8, |a| + |n|). If max_coordinates is
// nonzero, at most that many coordinates per input are checked (evenly
// strided). loss_fn must rebuild the graph from the current input values.
GradientCheckResult GradientCheck(const std::function<Tensor()>& loss_fn,
                                  std::vector<Tensor> inputs,
                                  double epsilon = 1e-5,
                                  size_t max_coordinates = 0);

}  // namespace molfuse

#endif  // MOLFUSE_GRADIENT_CHECK_H_
