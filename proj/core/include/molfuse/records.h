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

// On-disk formats shared by the command-line stages: JSON-lines instance and
// pair files, the vocabulary TSV and prediction TSVs.

#ifndef MOLFUSE_RECORDS_H_
#define MOLFUSE_RECORDS_H_

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "molfuse/corpus.h"
#include "molfuse/fusion.h"

namespace molfuse {

// One JSON object per line. Readers throw DataError with the line number on
// malformed input.
void WriteInstances(std::ostream& out, const std::vector<MaskedInstance>& items);
std::vector<MaskedInstance> ReadInstances(std::istream& in);
void SaveInstances(const std::string& path,
                   const std::vector<MaskedInstance>& items);
std::vector<MaskedInstance> LoadInstances(const std::string& path);

void WritePairs(std::ostream& out, const std::vector<PairRecord>& pairs);
std::vector<PairRecord> ReadPairs(std::istream& in);
void SavePairs(const std::string& path, const std::vector<PairRecord>& pairs);
std::vector<PairRecord> LoadPairs(const std::string& path);

// token <TAB> id, ids in row order starting at the unknown token.
void WriteVocabulary(std::ostream& out, const Vocabulary& vocab);
Vocabulary ReadVocabulary(std::istream& in);

// pair_id gold pred p_mech p_eff p_adv p_int p_neg, with a header row.
void WritePredictions(std::ostream& out,
                      const std::vector<Prediction>& predictions);
std::vector<Prediction> ReadPredictions(std::istream& in);
void SavePredictions(const std::string& path,
                     const std::vector<Prediction>& predictions);
std::vector<Prediction> LoadPredictions(const std::string& path);

// Binary predictions in the same layout: pred is Positive or Negative, the
// four type columns each carry a quarter of the positive probability.
void WriteBinaryPredictions(std::ostream& out,
                            const std::vector<BinaryPrediction>& predictions);

// Opens a file or throws DataError naming it.
std::ifstream OpenInput(const std::string& path);
std::ofstream OpenOutput(const std::string& path);

}  // namespace molfuse

#endif  // MOLFUSE_RECORDS_H_
