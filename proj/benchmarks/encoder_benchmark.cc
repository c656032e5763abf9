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

#include "molfuse/mol_encoder.h"
#include "molfuse/smiles.h"
#include "molfuse/text_encoder.h"

namespace molfuse {
namespace {

struct GraphSet {
  std::vector<MolGraph> graphs;
  std::vector<const MolGraph*> pointers;
};

const GraphSet& Graphs() {
  static const GraphSet set = [] {
    GraphSet s;
    for (const char* smiles :
         {"CC(=O)Oc1ccccc1C(=O)O", "CN1C=NC2=C1C(=O)N(C(=O)N2C)C",
          "CC(C)Cc1ccc(cc1)C(C)C(=O)O", "c1ccc2c(c1)[nH]c1ccccc12",
          "CC(=O)Nc1ccc(O)cc1", "CCN(CC)CCNC(=O)c1ccc(N)cc1"}) {
      s.graphs.push_back(ParseSmiles(smiles));
    }
    for (int copy = 0; copy < 16; ++copy) {
      for (const MolGraph& g : s.graphs) s.pointers.push_back(&g);
    }
    return s;
  }();
  return set;
}

// Encodes a batch of 96 graphs with d = 50 and the given step count.
void EncodeBatch(benchmark::State& state, EncoderKind kind) {
  const GraphSet& set = Graphs();
  Rng rng(1);
  std::vector<const MolGraph*> unique;
  for (const MolGraph& g : set.graphs) unique.push_back(&g);
  const MolecularModel model(
      MolModelConfig{kind, 50, static_cast<int>(state.range(0)), 100},
      AtomVocabulary::Build(unique), rng);
  NoGradGuard no_grad;
  for (auto _ : state) benchmark::DoNotOptimize(model.EncodeGraphs(set.pointers));
  state.SetItemsProcessed(state.iterations() * set.pointers.size());
}

void BM_NfpEncode(benchmark::State& state) { EncodeBatch(state, EncoderKind::kNfp); }
BENCHMARK(BM_NfpEncode)->Arg(2)->Arg(4);

void BM_GgnnEncode(benchmark::State& state) { EncodeBatch(state, EncoderKind::kGgnn); }
BENCHMARK(BM_GgnnEncode)->Arg(2)->Arg(4);

void BM_CnnEncode(benchmark::State& state) {
  TextModelConfig config;
  config.vocab_size = 1000;
  Rng rng(2);
  const TextModel model(config, rng);
  const int64_t n = state.range(0);
  TextInstance instance;
  instance.pair_id = "bench";
  for (int64_t i = 0; i < n; ++i) {
    instance.tokens.push_back(static_cast<int64_t>(rng.UniformInt(1000)));
  }
  const PositionFeatures pos = BuildPositionFeatures(n, 1, n - 2, config.position_clip);
  instance.position1 = pos.first;
  instance.position2 = pos.second;
  NoGradGuard no_grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(CnnEncode(instance, model.weights(), config));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CnnEncode)->Arg(20)->Arg(60);

}  // namespace
}  // namespace molfuse
