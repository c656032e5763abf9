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

#include "molfuse/config.h"

#include <fstream>
#include <set>

#include "molfuse/errors.h"
#include "molfuse/tokenizer.h"

namespace molfuse {

const char* ModeName(Mode mode) {
  switch (mode) {
    case Mode::kTextOnly: return "text-only";
    case Mode::kTextNfp: return "text+nfp";
    case Mode::kTextGgnn: return "text+ggnn";
    case Mode::kMolOnly: return "mol-only";
    case Mode::kMolBinary: return "mol-binary";
  }
  return "text-only";
}

Mode ParseMode(std::string_view name) {
  const std::string lower = ToLower(name);
  for (Mode m : {Mode::kTextOnly, Mode::kTextNfp, Mode::kTextGgnn,
                 Mode::kMolOnly, Mode::kMolBinary}) {
    if (lower == ModeName(m)) return m;
  }
  throw ConfigError("unknown mode '" + std::string(name) +
                    "' (expected text-only, text+nfp, text+ggnn, mol-only or "
                    "mol-binary)");
}

int ExperimentConfig::MoleculeFeatureDim() const {
  switch (mode) {
    case Mode::kTextNfp:
    case Mode::kTextGgnn:
    case Mode::kMolOnly:
      return 2 * mol_dim;
    default:
      return 0;
  }
}

bool ExperimentConfig::NeedsMolecularModel() const {
  return mode != Mode::kTextOnly;
}

MolModelConfig ExperimentConfig::MolConfig() const {
  MolModelConfig c;
  c.encoder = encoder;
  if (mode == Mode::kTextNfp) c.encoder = EncoderKind::kNfp;
  if (mode == Mode::kTextGgnn) c.encoder = EncoderKind::kGgnn;
  c.dim = mol_dim;
  c.steps = mol_steps;
  c.hidden = mol_hidden;
  return c;
}

TextModelConfig ExperimentConfig::TextConfig(int64_t vocab_size) const {
  TextModelConfig c;
  c.vocab_size = vocab_size;
  c.word_dim = word_dim;
  c.position_dim = position_dim;
  c.position_clip = position_clip;
  c.windows = windows;
  c.filters = filters;
  c.hidden = text_hidden;
  c.use_text = mode != Mode::kMolOnly;
  c.molecule_dim = MoleculeFeatureDim();
  return c;
}

void ExperimentConfig::Validate() const {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
  };
  require(word_dim >= 1 && position_dim >= 0, "embedding sizes must be positive");
  require(position_clip >= 0, "position_clip must be >= 0");
  require(!windows.empty(), "windows must not be empty");
  for (int k : windows) {
    require(k >= 1 && k % 2 == 1, "windows must be odd and positive");
  }
  require(filters >= 1 && text_hidden >= 1, "filters and text_hidden must be >= 1");
  require(text_learning_rate > 0 && mol_learning_rate > 0,
          "learning rates must be > 0");
  require(text_batch_size >= 1 && mol_batch_size >= 1,
          "batch sizes must be >= 1");
  require(text_l2 >= 0 && mol_l2 >= 0, "L2 coefficients must be >= 0");
  require(text_epochs >= 0 && mol_epochs >= 0, "epoch counts must be >= 0");
  require(min_word_count >= 1, "min_word_count must be >= 1");
  require(mol_dim >= 1 && mol_hidden >= 1, "mol_dim and mol_hidden must be >= 1");
  require(mol_steps >= 0, "mol_steps must be >= 0");
  require(negative_ratio >= 0, "negative_ratio must be >= 0");
  require(train_fraction > 0 && train_fraction < 1,
          "train_fraction must be in (0, 1)");
  require(smiles_max_depth >= 1, "smiles_max_depth must be >= 1");
  require(link_min_overlap >= 1, "link_min_overlap must be >= 1");
  require(randomization_rounds >= 1, "randomization_rounds must be >= 1");
}

ExperimentConfig ExperimentConfig::FromJson(const nlohmann::json& json) {
  if (!json.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  std::set<std::string> known;
  bool encoder_given = false;
  auto field = [&](const char* key, auto& target) {
    known.insert(key);
    if (!json.contains(key)) return false;
    try {
      json.at(key).get_to(target);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config field '") + key +
                        "' has the wrong type: " + e.what());
    }
    return true;
  };
  std::string mode_name, encoder_name;
  if (field("mode", mode_name)) c.mode = ParseMode(mode_name);
  if (field("encoder", encoder_name)) {
    c.encoder = ParseEncoderKind(encoder_name);
    encoder_given = true;
  }
  field("seed", c.seed);
  field("word_dim", c.word_dim);
  field("position_dim", c.position_dim);
  field("position_clip", c.position_clip);
  field("windows", c.windows);
  field("filters", c.filters);
  field("text_hidden", c.text_hidden);
  field("text_learning_rate", c.text_learning_rate);
  field("text_batch_size", c.text_batch_size);
  field("text_l2", c.text_l2);
  field("text_epochs", c.text_epochs);
  field("min_word_count", c.min_word_count);
  field("negative_bias_grid", c.negative_bias_grid);
  field("select_best_checkpoint", c.select_best_checkpoint);
  field("mol_dim", c.mol_dim);
  field("mol_steps", c.mol_steps);
  field("mol_hidden", c.mol_hidden);
  field("mol_learning_rate", c.mol_learning_rate);
  field("mol_batch_size", c.mol_batch_size);
  field("mol_l2", c.mol_l2);
  field("mol_epochs", c.mol_epochs);
  field("negative_ratio", c.negative_ratio);
  field("train_fraction", c.train_fraction);
  field("smiles_max_depth", c.smiles_max_depth);
  field("link_min_overlap", c.link_min_overlap);
  field("randomization_rounds", c.randomization_rounds);
  field("embeddings_path", c.embeddings_path);
  field("mol_checkpoint", c.mol_checkpoint);
  field("text_checkpoint", c.text_checkpoint);
  for (const auto& item : json.items()) {
    if (!known.count(item.key())) {
      throw ConfigError("unknown config field '" + item.key() + "'");
    }
  }
  if (encoder_given) {
    if ((c.mode == Mode::kTextNfp && c.encoder != EncoderKind::kNfp) ||
        (c.mode == Mode::kTextGgnn && c.encoder != EncoderKind::kGgnn)) {
      throw ConfigError(std::string("encoder '") + EncoderKindName(c.encoder) +
                        "' contradicts mode '" + ModeName(c.mode) + "'");
    }
  }
  if (c.mode == Mode::kTextNfp) c.encoder = EncoderKind::kNfp;
  if (c.mode == Mode::kTextGgnn) c.encoder = EncoderKind::kGgnn;
  c.Validate();
  return c;
}

ExperimentConfig ExperimentConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return FromJson(json);
}

nlohmann::ordered_json ExperimentConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["mode"] = ModeName(mode);
  j["encoder"] = EncoderKindName(encoder);
  j["seed"] = seed;
  j["word_dim"] = word_dim;
  j["position_dim"] = position_dim;
  j["position_clip"] = position_clip;
  j["windows"] = windows;
  j["filters"] = filters;
  j["text_hidden"] = text_hidden;
  j["text_learning_rate"] = text_learning_rate;
  j["text_batch_size"] = text_batch_size;
  j["text_l2"] = text_l2;
  j["text_epochs"] = text_epochs;
  j["min_word_count"] = min_word_count;
  j["negative_bias_grid"] = negative_bias_grid;
  j["select_best_checkpoint"] = select_best_checkpoint;
  j["mol_dim"] = mol_dim;
  j["mol_steps"] = mol_steps;
  j["mol_hidden"] = mol_hidden;
  j["mol_learning_rate"] = mol_learning_rate;
  j["mol_batch_size"] = mol_batch_size;
  j["mol_l2"] = mol_l2;
  j["mol_epochs"] = mol_epochs;
  j["negative_ratio"] = negative_ratio;
  j["train_fraction"] = train_fraction;
  j["smiles_max_depth"] = smiles_max_depth;
  j["link_min_overlap"] = link_min_overlap;
  j["randomization_rounds"] = randomization_rounds;
  j["embeddings_path"] = embeddings_path;
  j["mol_checkpoint"] = mol_checkpoint;
  j["text_checkpoint"] = text_checkpoint;
  return j;
}

}  // namespace molfuse
