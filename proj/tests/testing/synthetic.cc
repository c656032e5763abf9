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

#include "testing/synthetic.h"

#include <algorithm>
#include <numeric>

#include "molfuse/labels.h"

namespace molfuse {
namespace testing {

namespace {

class SmilesWriter {
 public:
  SmilesWriter(Rng& rng, const SmilesGenOptions& options)
      : rng_(rng), options_(options) {}

  std::string Generate() {
    std::string out;
    const int last = Chain(&out, 0, -1);
    CloseAll(&out, last, 0);
    if (options_.require_nitrogen && !has_nitrogen_) {
      out += rng_.Coin() ? "N" : "C(=O)N";
    }
    return out;
  }

 private:
  struct OpenRing {
    int label;
    int atom;
  };

  static std::string Label(int label) {
    return label < 10 ? std::to_string(label) : "%" + std::to_string(label);
  }

  int FreeLabel() const {
    int label = 1;
    while (std::any_of(open_.begin(), open_.end(),
                       [&](const OpenRing& r) { return r.label == label; })) {
      ++label;
    }
    return label;
  }

  // Pairs every ring opened since index keep with a fresh atom two bonds
  // away from last.
  int CloseAll(std::string* out, int last, size_t keep) {
    if (open_.size() <= keep) return last;
    *out += "CC";
    atoms_ += 2;
    while (open_.size() > keep) {
      *out += Label(open_.back().label);
      open_.pop_back();
    }
    return atoms_ - 1;
  }

  std::string Element() {
    ++atoms_;
    static const char* kPlain[] = {"C", "C", "C", "O", "S", "F", "Cl", "Br"};
    if (options_.allow_nitrogen && rng_.UniformInt(5) == 0) {
      has_nitrogen_ = true;
      switch (rng_.UniformInt(4)) {
        case 0:
          return "[NH4+]";
        case 1:
          return "[N+]";
        default:
          return "N";
      }
    }
    if (rng_.UniformInt(12) == 0) return rng_.Coin() ? "[O-]" : "[13CH3]";
    return kPlain[rng_.UniformInt(std::size(kPlain))];
  }

  std::string AromaticRing() {
    const std::string label = Label(FreeLabel());
    std::string ring = "c" + label;
    const bool pyridine = options_.allow_nitrogen && rng_.UniformInt(3) == 0;
    for (int i = 0; i < 5; ++i) {
      if (pyridine && i == 2) {
        ring += "n";
        has_nitrogen_ = true;
      } else {
        ring += "c";
      }
    }
    atoms_ += 6;
    return ring + label;
  }

  // Writes a chain bonded to atom parent and returns its last atom.
  int Chain(std::string* out, int depth, int parent) {
    int last = parent;
    const int length = 1 + static_cast<int>(rng_.UniformInt(5));
    for (int i = 0; i < length && atoms_ < options_.max_atoms; ++i) {
      if (last >= 0) {
        const uint64_t b = rng_.UniformInt(10);
        if (b == 0) *out += "=";
        if (b == 1) *out += "#";
      }
      if (rng_.UniformInt(6) == 0) {
        *out += AromaticRing();
        last = atoms_ - 1;
      } else {
        *out += Element();
        const int atom = atoms_ - 1;
        if (!open_.empty() && open_.back().atom != last &&
            rng_.UniformInt(3) == 0) {
          *out += Label(open_.back().label);
          open_.pop_back();
        } else if (rng_.UniformInt(5) == 0 && open_.size() < 3) {
          const int label = FreeLabel();
          open_.push_back({label, atom});
          *out += Label(label);
        }
        last = atom;
      }
      if (depth < 3 && rng_.UniformInt(4) == 0) {
        *out += "(";
        const size_t opened = open_.size();
        const int branch_last = Chain(out, depth + 1, last);
        CloseAll(out, branch_last, opened);
        *out += ")";
      }
    }
    return last;
  }

  Rng& rng_;
  SmilesGenOptions options_;
  std::vector<OpenRing> open_;
  int atoms_ = 0;
  bool has_nitrogen_ = false;
};

}  // namespace

std::string RandomSmiles(Rng& rng, const SmilesGenOptions& options) {
  return SmilesWriter(rng, options).Generate();
}

std::vector<int> RandomPermutation(int n, Rng& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.Shuffle(perm);
  return perm;
}

bool ContainsNitrogen(const MolGraph& graph) {
  for (const Atom& atom : graph.atoms()) {
    if (CanonicalElement(atom.symbol) == "N") return true;
  }
  return false;
}

NitrogenPairTask MakeNitrogenPairTask(int num_pairs, uint64_t seed) {
  Rng rng(seed);
  NitrogenPairTask task;
  const int pool = 200;
  task.molecules.reserve(pool);
  std::vector<int> with_n, without_n;
  for (int i = 0; i < pool; ++i) {
    SmilesGenOptions options;
    options.allow_nitrogen = i % 2 == 0;
    options.require_nitrogen = i % 2 == 0;
    task.molecules.push_back(ParseSmiles(RandomSmiles(rng, options)));
    (ContainsNitrogen(task.molecules.back()) ? with_n : without_n).push_back(i);
  }
  std::vector<const MolGraph*> graphs;
  for (const MolGraph& g : task.molecules) graphs.push_back(&g);
  task.vocab = AtomVocabulary::Build(graphs);

  std::vector<MolPairExample> positives, negatives;
  auto pick = [&](const std::vector<int>& from) {
    return &task.molecules[from[rng.UniformInt(from.size())]];
  };
  for (int k = 0; k < num_pairs; ++k) {
    MolPairExample example;
    if (rng.Coin()) {
      example.first = pick(with_n);
      example.second = pick(with_n);
    } else {
      switch (rng.UniformInt(3)) {
        case 0:
          example.first = pick(with_n);
          example.second = pick(without_n);
          break;
        case 1:
          example.first = pick(without_n);
          example.second = pick(with_n);
          break;
        default:
          example.first = pick(without_n);
          example.second = pick(without_n);
      }
    }
    example.positive =
        ContainsNitrogen(*example.first) && ContainsNitrogen(*example.second);
    (example.positive ? positives : negatives).push_back(example);
  }
  for (auto* group : {&positives, &negatives}) {
    const size_t cut = static_cast<size_t>(std::llround(0.8 * group->size()));
    task.train.insert(task.train.end(), group->begin(), group->begin() + cut);
    task.test.insert(task.test.end(), group->begin() + cut, group->end());
  }
  rng.Shuffle(task.train);
  return task;
}

SyntheticTextCorpus MakeTextCorpus(int num_instances, uint64_t seed,
                                   int position_clip) {
  static const char* kTriggers[kNumPositiveLabels] = {"metabolism", "increases",
                                                      "avoid", "interacts"};
  Rng rng(seed);
  std::vector<std::string> filler;
  for (int i = 0; i < 40; ++i) filler.push_back("w" + std::to_string(i));

  SyntheticTextCorpus corpus;
  for (int n = 0; n < num_instances; ++n) {
    const Label label = LabelFromIndex(n % kNumLabels);
    MaskedInstance m;
    m.pair_id = "s" + std::to_string(n) + ".p0";
    m.sentence_id = "s" + std::to_string(n);
    m.label = label;
    auto words = [&](int count) {
      for (int i = 0; i < count; ++i) {
        m.tokens.push_back(filler[rng.UniformInt(filler.size())]);
      }
    };
    words(1 + static_cast<int>(rng.UniformInt(5)));
    m.drug1_index = m.tokens.size();
    m.tokens.push_back(kDrug1Token);
    words(static_cast<int>(rng.UniformInt(3)));
    if (IsPositive(label)) m.tokens.push_back(kTriggers[LabelIndex(label)]);
    words(static_cast<int>(rng.UniformInt(3)));
    m.drug2_index = m.tokens.size();
    m.tokens.push_back(kDrug2Token);
    words(1 + static_cast<int>(rng.UniformInt(5)));
    corpus.masked.push_back(std::move(m));
  }
  std::vector<std::vector<std::string>> texts;
  for (const MaskedInstance& m : corpus.masked) texts.push_back(m.tokens);
  corpus.vocab = Vocabulary::Build(texts, 1);
  for (const MaskedInstance& m : corpus.masked) {
    corpus.instances.push_back(Featurize(m, corpus.vocab, position_clip));
  }
  return corpus;
}

}  // namespace testing
}  // namespace molfuse
