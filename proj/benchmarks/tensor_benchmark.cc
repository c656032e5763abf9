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

#include <benchmark/benchmark.h>

#include "molfuse/rng.h"
#include "molfuse/tensor.h"

namespace molfuse {
namespace {

Tensor RandomMatrix(int64_t rows, int64_t cols, Rng& rng, bool grad = false) {
  Tensor t = Tensor::Zeros({rows, cols}, grad);
  for (double& v : t.mutable_data()) v = rng.Uniform(-1.0, 1.0);
  return t;
}

void BM_MatMul(benchmark::State& state) {
  const int64_t n = state.range(0);
  Rng rng(1);
  const Tensor a = RandomMatrix(n, n, rng);
  const Tensor b = RandomMatrix(n, n, rng);
  NoGradGuard no_grad;
  for (auto _ : state) benchmark::DoNotOptimize(MatMul(a, b));
  state.SetItemsProcessed(state.iterations() * n * n * n);
}
BENCHMARK(BM_MatMul)->RangeMultiplier(2)->Range(16, 256);

void BM_MatMulBackward(benchmark::State& state) {
  const int64_t n = state.range(0);
  Rng rng(2);
  const Tensor a = RandomMatrix(n, n, rng, true);
  const Tensor b = RandomMatrix(n, n, rng, true);
  for (auto _ : state) {
    SumAll(MatMul(a, b)).Backward();
  }
  state.SetItemsProcessed(state.iterations() * 3 * n * n * n);
}
BENCHMARK(BM_MatMulBackward)->RangeMultiplier(2)->Range(16, 128);

void BM_SoftmaxCrossEntropy(benchmark::State& state) {
  const int64_t rows = state.range(0);
  Rng rng(3);
  const Tensor logits = RandomMatrix(rows, 5, rng, true);
  std::vector<int64_t> gold(rows);
  for (auto& g : gold) g = static_cast<int64_t>(rng.UniformInt(5));
  for (auto _ : state) CrossEntropy(Softmax(logits), gold).Backward();
}
BENCHMARK(BM_SoftmaxCrossEntropy)->Arg(50)->Arg(500);

}  // namespace
}  // namespace molfuse
