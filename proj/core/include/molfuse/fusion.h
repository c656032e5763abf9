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

// Two-stage training. Stage 1 fits the molecular pair classifier on drug
// pairs; stage 2 trains the text classifier on [h_t; h_m] with the graph
// encoder frozen, so molecule features are computed once up front and enter
// the text model as constants.

#ifndef MOLFUSE_FUSION_H_
#define MOLFUSE_FUSION_H_

#include <array>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "molfuse/config.h"
#include "molfuse/metrics.h"
#include "molfuse/mol_encoder.h"
#include "molfuse/smiles.h"
#include "molfuse/text_encoder.h"

namespace molfuse {

struct EpochRecord {
  int epoch = 0;
  std::string split;
  double loss = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  double accuracy = 0.0;
};

using TrainingLog = std::vector<EpochRecord>;

// Tab-separated with a header: epoch, split, loss, P, R, F, accuracy.
void WriteTrainingLog(std::ostream& out, const TrainingLog& log);

struct MolPairExample {
  const MolGraph* first = nullptr;
  const MolGraph* second = nullptr;
  bool positive = false;
};

struct MolTrainResult {
  MolecularModel model;
  TrainingLog log;
};

// Mini-batch Adam on the pair cross-entropy. heldout may be empty. Throws
// DataError on an empty training set; a single-class training set only
// produces a warning on diagnostics.
MolTrainResult TrainMolecular(const std::vector<MolPairExample>& train,
                              const std::vector<MolPairExample>& heldout,
                              const AtomVocabulary& vocab,
                              const ExperimentConfig& config,
                              std::ostream* diagnostics = nullptr);

struct MolEvaluation {
  double loss = 0.0;
  BinaryReport report;
};

MolEvaluation EvaluateMolecular(const MolecularModel& model,
                                const std::vector<MolPairExample>& pairs,
                                int batch_size = 256);

// x / ||x||_2; the zero vector is returned unchanged.
std::vector<double> NormalizeL2(std::span<const double> x);

// [x1 / ||x1||; x2 / ||x2||].
std::vector<double> FusedMoleculeInput(std::span<const double> first,
                                       std::span<const double> second);

// Frozen per-drug molecule vectors. Unknown or unlinked drugs read as zero.
class MoleculeFeatures {
 public:
  explicit MoleculeFeatures(int dim) : dim_(dim) {}

  // Encodes every graph with the model's encoder (no gradient tracking).
  static MoleculeFeatures Compute(const MolecularModel& model,
                                  const std::map<std::string, MolGraph>& graphs);

  int dim() const { return dim_; }
  void Set(const std::string& drug_id, std::vector<double> vector);
  const std::map<std::string, std::vector<double>>& vectors() const {
    return vectors_;
  }

  // Normalized [h_{g1}; h_{g2}] for one instance, 2 * dim values.
  std::vector<double> PairInput(const std::optional<std::string>& first,
                                const std::optional<std::string>& second) const;
  // batch x 2 dim constant tensor.
  Tensor BatchInput(const std::vector<const TextInstance*>& batch) const;

 private:
  int dim_;
  std::map<std::string, std::vector<double>> vectors_;
};

struct TextTrainResult {
  TextModel model;
  TrainingLog log;
};

// Trains initial on instances. molecules is required exactly when the model
// has a molecule block. If frozen is given, its parameters are checked for
// bit-equality against a snapshot after every epoch.
TextTrainResult TrainText(const std::vector<TextInstance>& instances,
                          TextModel initial, const MoleculeFeatures* molecules,
                          const ExperimentConfig& config,
                          const MolecularModel* frozen = nullptr,
                          std::ostream* diagnostics = nullptr);

struct Prediction {
  std::string pair_id;
  Label gold = Label::kNegative;
  Label predicted = Label::kNegative;
  std::array<double, kNumLabels> probabilities{};
};

// Argmax with ties going to the lowest class index.
std::vector<Prediction> PredictText(const std::vector<TextInstance>& instances,
                                    const TextModel& model,
                                    const MoleculeFeatures* molecules,
                                    int batch_size = 64);

struct BinaryPrediction {
  std::string pair_id;
  Label gold = Label::kNegative;
  bool positive = false;
  double positive_probability = 0.0;
};

// Stage-1 classifier applied to text pairs; drugs without a graph
// contribute zero halves.
std::vector<BinaryPrediction> PredictBinary(
    const std::vector<TextInstance>& instances, const MolecularModel& model,
    const std::map<std::string, MolGraph>& graphs, int batch_size = 256);

}  // namespace molfuse

#endif  // MOLFUSE_FUSION_H_
