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

// Corpus ingestion: relation-annotated sentences, drug tables, entity
// linking, pseudo-negative drug pairs and vocabularies.

#ifndef MOLFUSE_CORPUS_H_
#define MOLFUSE_CORPUS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "molfuse/labels.h"
#include "molfuse/text_encoder.h"

namespace molfuse {

inline constexpr char kDrug1Token[] = "drug1";
inline constexpr char kDrug2Token[] = "drug2";
inline constexpr char kDrugOtherToken[] = "drugother";
inline constexpr char kUnknownToken[] = "<unk>";

struct Entity {
  std::string id;
  std::string text;
  std::string type;
  // Byte range [begin, end) in the sentence text. Discontinuous mentions
  // are widened to cover all their fragments.
  size_t begin = 0;
  size_t end = 0;
};

struct CandidatePair {
  std::string id;
  std::string entity1;
  std::string entity2;
  Label label = Label::kNegative;
};

struct Sentence {
  std::string id;
  std::string text;
  std::vector<Entity> entities;
  std::vector<CandidatePair> pairs;

  const Entity* FindEntity(std::string_view id) const;
};

// Parses one task XML document (document > sentence > entity/pair). Entity
// charOffset values are inclusive character ranges. Throws DataError on
// malformed XML, bad offsets or pairs naming unknown entities.
std::vector<Sentence> ParseDdiXml(std::string_view xml,
                                  const std::string& source = "<memory>");
std::vector<Sentence> LoadDdiCorpus(const std::string& path);

// A candidate pair after masking, before vocabulary lookup.
struct MaskedInstance {
  std::string pair_id;
  std::string sentence_id;
  std::vector<std::string> tokens;
  size_t drug1_index = 0;
  size_t drug2_index = 0;
  Label label = Label::kNegative;
  std::string drug1_mention;
  std::string drug2_mention;
  std::optional<std::string> drug1_id;
  std::optional<std::string> drug2_id;
};

// Replaces the target mentions by drug1/drug2 in order of appearance and
// every other non-overlapping mention by drugother, then tokenizes. Returns
// nullopt (and sets *warning) when the two target mentions overlap.
std::optional<MaskedInstance> MaskPair(const Sentence& sentence,
                                       const CandidatePair& pair,
                                       std::string* warning = nullptr);

struct DrugEntry {
  std::string id;
  std::string name;
  std::vector<std::string> synonyms;
  std::optional<std::string> smiles;
};

// Tab-separated "id, name, synonyms (';'-separated), smiles" rows. Blank
// lines, '#' comments and a header row starting with "id" are skipped.
std::vector<DrugEntry> LoadDrugTable(const std::string& path);
std::vector<DrugEntry> ParseDrugTable(std::string_view text,
                                      const std::string& source = "<memory>");

// Length of the longest common substring (bytes).
size_t LongestCommonSubstring(std::string_view a, std::string_view b);

// Links mentions to drug entries by lowercased name overlap: an exact name
// or synonym match wins; otherwise the entry with the longest common
// substring against any of its names, ties to the smallest id, and nothing
// below min_overlap characters.
class EntityLinker {
 public:
  explicit EntityLinker(const std::vector<DrugEntry>& entries,
                        size_t min_overlap = 3);

  std::optional<std::string> Link(std::string_view mention) const;

 private:
  struct Names {
    std::string id;
    std::vector<std::string> names;
  };
  std::vector<Names> entries_;  // sorted by id
  std::map<std::string, std::string> exact_;
  size_t min_overlap_;
  mutable std::unordered_map<std::string, std::optional<std::string>> cache_;
};

std::optional<std::string> LinkEntity(std::string_view mention,
                                      const std::vector<DrugEntry>& entries);

enum class PairProvenance { kDatabase, kGenerated };

struct PairRecord {
  std::string drug1;
  std::string drug2;
  bool positive = true;
  PairProvenance provenance = PairProvenance::kDatabase;
};

// Unordered pair key with the smaller id first.
std::pair<std::string, std::string> UnorderedKey(const std::string& a,
                                                 const std::string& b);

// n distinct unordered pairs over the universe avoiding positives and
// exclusions. Throws DataError naming the feasible maximum if n is too large.
std::vector<PairRecord> GenerateNegativePairs(
    const std::vector<PairRecord>& positives,
    const std::vector<std::string>& universe, size_t n,
    const std::set<std::pair<std::string, std::string>>& exclusions,
    uint64_t seed);

struct PairSplit {
  std::vector<PairRecord> train;
  std::vector<PairRecord> test;
};

// Per-label shuffle, then round(train_fraction * count) to train.
PairSplit SplitPairs(const std::vector<PairRecord>& records,
                     double train_fraction, uint64_t seed);

class Vocabulary {
 public:
  static constexpr int64_t kUnknown = 0;

  Vocabulary();

  // Tokens seen at least min_count times (plus the drug placeholders),
  // sorted, after the reserved unknown row.
  static Vocabulary Build(const std::vector<std::vector<std::string>>& texts,
                          int min_count = 2);
  static Vocabulary FromTokens(const std::vector<std::string>& tokens);

  int64_t Lookup(std::string_view token) const;
  bool Contains(std::string_view token) const;
  void Add(const std::string& token);
  int64_t size() const { return static_cast<int64_t>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int64_t, std::less<>> index_;
};

// Token ids plus position rows for the network.
TextInstance Featurize(const MaskedInstance& instance, const Vocabulary& vocab,
                       int position_clip);

struct PretrainedEmbeddings {
  int dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
  std::vector<double> mean;
};

// "word v1 ... vd" per line; an optional leading "count dim" line is skipped.
PretrainedEmbeddings LoadEmbeddings(const std::string& path);

// Fills the word table (vocab x dim): pre-trained vectors where available,
// the vector of "drug" for the two target placeholders, and the mean of all
// pre-trained vectors for everything else (including the unknown row).
void InitializeWordEmbeddings(Tensor& table, const Vocabulary& vocab,
                              const PretrainedEmbeddings& pretrained);

// FNV-1a 64-bit, used for deterministic hash splits.
uint64_t StableHash(std::string_view text);

// True for roughly one in ten pair ids, chosen by hash.
bool InHeldOutSplit(std::string_view pair_id);

}  // namespace molfuse

#endif  // MOLFUSE_CORPUS_H_
