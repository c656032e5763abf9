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
#ifndef MOLFUSE_ADAM_H_
#define MOLFUSE_ADAM_H_

#include <cstdint>
#include <vector>

#include "molfuse/parameters.h"

namespace molfuse {

struct AdamOptions {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Added as coefficient * param to the gradient of weights and biases.
  double l2 = 0.0;
};

// Adam with bias correction. Moments are keyed by position in the
// ParameterSet the optimizer was created for.
class Adam {
 public:
  Adam(const ParameterSet& params, AdamOptions options);

  // One update of every parameter from its accumulated gradient; gradients
  // are zeroed afterwards. Throws std::logic_error if a parameter does not
  // track gradients.
  void Step(ParameterSet& params);

  int64_t step_count() const { return step_; }
  const AdamOptions& options() const { return options_; }
  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }

 private:
  AdamOptions options_;
  int64_t step_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace molfuse

#endif  // MOLFUSE_ADAM_H_
