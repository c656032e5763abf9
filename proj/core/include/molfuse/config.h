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

#ifndef MOLFUSE_CONFIG_H_
#define MOLFUSE_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "molfuse/mol_encoder.h"
#include "molfuse/text_encoder.h"

namespace molfuse {

enum class Mode {
  kTextOnly,   // CNN features only
  kTextNfp,    // CNN + frozen NFP molecule features
  kTextGgnn,   // CNN + frozen GGNN molecule features
  kMolOnly,    // 5-way classifier on molecule features only
  kMolBinary,  // stage-1 pair classifier applied to text pairs
};

const char* ModeName(Mode mode);
Mode ParseMode(std::string_view name);  // throws ConfigError

// Every knob of an experiment. Defaults follow the published hyperparameter
// tables where they exist.
struct ExperimentConfig {
  Mode mode = Mode::kTextOnly;
  uint64_t seed = 1;

  // Text model.
  int word_dim = 200;
  int position_dim = 20;
  int position_clip = 50;
  std::vector<int> windows = {3, 5, 7};
  int filters = 100;
  int text_hidden = 500;
  double text_learning_rate = 0.001;
  int text_batch_size = 50;
  double text_l2 = 0.0001;
  int text_epochs = 20;
  int min_word_count = 2;
  // Negative-logit offsets tried on the held-out split after training.
  // Empty: no sweep, offset stays 0.
  std::vector<double> negative_bias_grid;
  // Keep the epoch with the best held-out micro F.
  bool select_best_checkpoint = false;

  // Molecular model.
  EncoderKind encoder = EncoderKind::kNfp;
  int mol_dim = 50;
  int mol_steps = 4;
  int mol_hidden = 1000;
  double mol_learning_rate = 0.001;
  int mol_batch_size = 100;
  double mol_l2 = 0.0001;
  int mol_epochs = 20;

  // Data preparation and evaluation.
  double negative_ratio = 1.0;
  double train_fraction = 0.8;
  int smiles_max_depth = 100;
  int link_min_overlap = 3;
  int randomization_rounds = 9999;

  std::string embeddings_path;
  std::string mol_checkpoint;
  std::string text_checkpoint;

  bool UsesHeldOut() const {
    return !negative_bias_grid.empty() || select_best_checkpoint;
  }
  // Molecule feature width fed to the text classifier for this mode.
  int MoleculeFeatureDim() const;
  bool NeedsMolecularModel() const;
  MolModelConfig MolConfig() const;
  TextModelConfig TextConfig(int64_t vocab_size) const;

  // Throws ConfigError on inconsistent or out-of-range values.
  void Validate() const;

  // Unknown keys are rejected so typos surface as config errors.
  static ExperimentConfig FromJson(const nlohmann::json& json);
  static ExperimentConfig Load(const std::string& path);
  nlohmann::ordered_json ToJson() const;
};

}  // namespace molfuse

#endif  // MOLFUSE_CONFIG_H_
