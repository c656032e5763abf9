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

#include <gtest/gtest.h>

#include "molfuse/rng.h"

namespace molfuse {
namespace {

TEST(GradientCheckTest, SquareAtThree) {
  const Tensor x = Tensor::Scalar(3.0, /*requires_grad=*/true);
  const auto result = GradientCheck([&] { return SumAll(Mul(x, x)); }, {x});
  EXPECT_LT(result.max_relative_error, 1e-6);
  EXPECT_EQ(result.coordinates, 1u);
  EXPECT_EQ(x.at(0), 3.0);
}

TEST(GradientCheckTest, DetectsAWrongGradient) {
  const Tensor x = Tensor::Row({1.0, 2.0}, /*requires_grad=*/true);
  // Detach hides the x * x path from autodiff, so the analytic gradient is
  // half the true one.
  const auto result = GradientCheck(
      [&] { return SumAll(Add(Mul(x, x.Detach()), Scale(x, 0.0))); }, {x});
  EXPECT_GT(result.max_relative_error, 0.1);
}

TEST(GradientCheckTest, GruCell) {
  Rng rng(6);
  auto random = [&](Shape shape) {
    Tensor t = Tensor::Zeros(shape, /*requires_grad=*/true);
    for (double& v : t.mutable_data()) v = rng.Uniform(-0.5, 0.5);
    return t;
  };
  const Tensor h = random({2, 3}), m = random({2, 3});
  const Tensor wz = random({3, 3}), uz = random({3, 3});
  const Tensor wr = random({3, 3}), ur = random({3, 3});
  const Tensor wn = random({3, 3}), un = random({3, 3});
  auto loss = [&] {
    const Tensor z = Sigmoid(Add(MatMul(m, wz), MatMul(h, uz)));
    const Tensor r = Sigmoid(Add(MatMul(m, wr), MatMul(h, ur)));
    const Tensor n = Tanh(Add(MatMul(m, wn), MatMul(Mul(r, h), un)));
    const Tensor one_minus_z = Sub(Tensor::Full({2, 3}, 1.0), z);
    return SumAll(Add(Mul(one_minus_z, n), Mul(z, h)));
  };
  const auto result = GradientCheck(loss, {h, m, wz, uz, wr, ur, wn, un});
  EXPECT_LT(result.max_relative_error, 1e-6);
  EXPECT_EQ(result.coordinates, 12u + 6u * 9u);
}

TEST(GradientCheckTest, CoordinateCap) {
  const Tensor x = Tensor::Zeros({10, 10}, /*requires_grad=*/true);
  const auto result = GradientCheck([&] { return SumAll(Mul(x, x)); }, {x}, 1e-5, 7);
  EXPECT_EQ(result.coordinates, 7u);
}

}  // namespace
}  // namespace molfuse
