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

// Generators for randomized and synthetic test inputs.

#ifndef MOLFUSE_TESTS_TESTING_SYNTHETIC_H_
#define MOLFUSE_TESTS_TESTING_SYNTHETIC_H_

#include <string>
#include <vector>

#include "molfuse/corpus.h"
#include "molfuse/fusion.h"
#include "molfuse/rng.h"
#include "molfuse/smiles.h"
#include "molfuse/text_encoder.h"

namespace molfuse {
namespace testing {

struct SmilesGenOptions {
  bool allow_nitrogen = true;
  // Forces at least one nitrogen atom.
  bool require_nitrogen = false;
  int max_atoms = 18;
};

// A valid SMILES string with chains, branches, ring closures, multiple bond
// orders, bracket atoms and fused aromatic rings.
std::string RandomSmiles(Rng& rng, const SmilesGenOptions& options = {});

// Uniformly random permutation of 0..n-1.
std::vector<int> RandomPermutation(int n, Rng& rng);

bool ContainsNitrogen(const MolGraph& graph);

// Pair task with label "both molecules contain nitrogen". Owns the graphs
// the examples point into.
struct NitrogenPairTask {
  std::vector<MolGraph> molecules;
  std::vector<MolPairExample> train;
  std::vector<MolPairExample> test;
  AtomVocabulary vocab;
};

// num_pairs pairs, roughly half positive, split 4:1 by label.
NitrogenPairTask MakeNitrogenPairTask(int num_pairs, uint64_t seed);

// Five-class sentences where each relation type has its own trigger word
// between the two drug placeholders; Negative sentences carry none.
struct SyntheticTextCorpus {
  Vocabulary vocab;
  std::vector<MaskedInstance> masked;
  std::vector<TextInstance> instances;
};

SyntheticTextCorpus MakeTextCorpus(int num_instances, uint64_t seed,
                                   int position_clip = 50);

}  // namespace testing
}  // namespace molfuse

#endif  // MOLFUSE_TESTS_TESTING_SYNTHETIC_H_
