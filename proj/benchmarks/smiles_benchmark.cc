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

#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "molfuse/smiles.h"

namespace molfuse {
namespace {

const std::vector<std::string>& Molecules() {
  static const std::vector<std::string> molecules = {
      "CC(=O)Oc1ccccc1C(=O)O",
      "CN1C=NC2=C1C(=O)N(C(=O)N2C)C",
      "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
      "CN1CCC[C@H]1c2cccnc2",
      "c1ccc2c(c1)[nH]c1ccccc12",
      "CC(=O)Nc1ccc(O)cc1",
      "OC[C@H]1OC(O)[C@H](O)[C@@H](O)[C@@H]1O",
      "CCN(CC)CCNC(=O)c1ccc(N)cc1",
  };
  return molecules;
}

void BM_ParseSmiles(benchmark::State& state) {
  int64_t bytes = 0;
  for (auto _ : state) {
    for (const std::string& s : Molecules()) {
      benchmark::DoNotOptimize(ParseSmiles(s));
      bytes += static_cast<int64_t>(s.size());
    }
  }
  state.SetBytesProcessed(bytes);
  state.SetItemsProcessed(state.iterations() * Molecules().size());
}
BENCHMARK(BM_ParseSmiles);

void BM_ParseLongChain(benchmark::State& state) {
  std::string chain = "C";
  for (int64_t i = 1; i < state.range(0); ++i) chain += i % 7 == 0 ? "(O)C" : "C";
  for (auto _ : state) benchmark::DoNotOptimize(ParseSmiles(chain));
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(chain.size()));
}
BENCHMARK(BM_ParseLongChain)->Arg(64)->Arg(1024);

}  // namespace
}  // namespace molfuse
