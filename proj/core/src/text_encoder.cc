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

#include "molfuse/text_encoder.h"

#include <algorithm>
#include <numeric>

#include "molfuse/errors.h"
#include "molfuse/mol_encoder.h"

namespace molfuse {

PositionFeatures BuildPositionFeatures(size_t num_tokens, size_t drug1_index,
                                       size_t drug2_index, int clip) {
  PositionFeatures out;
  out.first.reserve(num_tokens);
  out.second.reserve(num_tokens);
  auto row = [clip](size_t k, size_t target) {
    const int64_t offset = static_cast<int64_t>(k) - static_cast<int64_t>(target);
    return std::clamp<int64_t>(offset, -clip, clip) + clip;
  };
  for (size_t k = 0; k < num_tokens; ++k) {
    out.first.push_back(row(k, drug1_index));
    out.second.push_back(row(k, drug2_index));
  }
  return out;
}

void TextModelConfig::Validate() const {
  if (vocab_size < 1) throw ConfigError("text vocabulary is empty");
  if (word_dim < 1 || position_dim < 0 || position_clip < 0) {
    throw ConfigError("embedding sizes must be positive");
  }
  if (filters < 1 || hidden < 1) {
    throw ConfigError("filter count and hidden size must be positive");
  }
  if (use_text && windows.empty()) {
    throw ConfigError("at least one convolution window is required");
  }
  for (int k : windows) {
    if (k < 1 || k % 2 == 0) {
      throw ConfigError("convolution windows must be odd and positive, got " +
                        std::to_string(k));
    }
  }
  if (molecule_dim < 0) throw ConfigError("negative molecule dimension");
  if (ClassifierInputDim() < 1) {
    throw ConfigError("classifier has no input features");
  }
}

TextModelParams TextModelParams::Create(ParameterSet& params,
                                        const TextModelConfig& config,
                                        Rng& rng) {
  TextModelParams p;
  const int64_t positions = 2 * config.position_clip + 1;
  if (config.use_text) {
    p.word_embedding = params.Add("text.word_embedding",
                                  {config.vocab_size, config.word_dim},
                                  ParamKind::kEmbedding, rng);
    p.position1 = params.Add("text.position1", {positions, config.position_dim},
                             ParamKind::kEmbedding, rng);
    p.position2 = params.Add("text.position2", {positions, config.position_dim},
                             ParamKind::kEmbedding, rng);
    for (int k : config.windows) {
      const std::string name = "text.conv" + std::to_string(k);
      p.conv_weight.push_back(
          params.Add(name + ".weight",
                     {config.filters, int64_t{k} * config.TokenDim()},
                     ParamKind::kWeight, rng));
      p.conv_bias.push_back(params.Add(name + ".bias", {1, config.filters},
                                       ParamKind::kBias, rng));
    }
  }
  p.hidden_weight =
      params.Add("text.hidden_weight",
                 {config.hidden, config.ClassifierInputDim()},
                 ParamKind::kWeight, rng);
  p.hidden_bias =
      params.Add("text.hidden_bias", {1, config.hidden}, ParamKind::kBias, rng);
  p.output_weight = params.Add("text.output_weight", {kNumLabels, config.hidden},
                               ParamKind::kWeight, rng);
  p.output_bias =
      params.Add("text.output_bias", {1, kNumLabels}, ParamKind::kBias, rng);
  return p;
}

Tensor CnnEncode(const TextInstance& instance, const TextModelParams& params,
                 const TextModelConfig& config) {
  const size_t n = instance.tokens.size();
  if (n == 0 || instance.position1.size() != n ||
      instance.position2.size() != n) {
    throw DataError("instance " + instance.pair_id +
                    " has empty or misaligned token features");
  }
  for (int64_t id : instance.tokens) {
    if (id < 0 || id >= config.vocab_size) {
      throw DataError("instance " + instance.pair_id + ": token id " +
                      std::to_string(id) + " outside vocabulary of " +
                      std::to_string(config.vocab_size));
    }
  }
  const Tensor tokens = Concat(
      {EmbeddingLookup(params.word_embedding, instance.tokens),
       EmbeddingLookup(params.position1, instance.position1),
       EmbeddingLookup(params.position2, instance.position2)},
      1);
  const int64_t width = tokens.cols();
  std::vector<Tensor> pooled;
  for (size_t l = 0; l < config.windows.size(); ++l) {
    const int k = config.windows[l];
    const int64_t pad = (k - 1) / 2;
    Tensor padded = tokens;
    if (pad > 0) {
      const Tensor zeros = Tensor::Zeros({pad, width});
      padded = Concat({zeros, tokens, zeros}, 0);
    }
    // Row i of the unfolded matrix is [w_{i-pad}; ...; w_{i+pad}].
    std::vector<Tensor> shifted;
    for (int o = 0; o < k; ++o) {
      std::vector<int64_t> rows(n);
      std::iota(rows.begin(), rows.end(), int64_t{o});
      shifted.push_back(EmbeddingLookup(padded, rows));
    }
    const Tensor windows = k == 1 ? shifted[0] : Concat(shifted, 1);
    const Tensor activations = Relu(
        Linear(windows, params.conv_weight[l], params.conv_bias[l]));
    pooled.push_back(Max(activations, 0));
  }
  return pooled.size() == 1 ? pooled[0] : Concat(pooled, 1);
}

Tensor TextClassify(const Tensor& features, const TextModelParams& params,
                    double negative_offset) {
  const Tensor hidden =
      Relu(Linear(features, params.hidden_weight, params.hidden_bias));
  Tensor logits = Linear(hidden, params.output_weight, params.output_bias);
  if (negative_offset != 0.0) {
    std::vector<double> offset(kNumLabels, 0.0);
    offset[LabelIndex(Label::kNegative)] = negative_offset;
    logits = Add(logits, Tensor::Row(std::move(offset)));
  }
  return Softmax(logits);
}

TextModel::TextModel(TextModelConfig config, Rng& rng)
    : config_(std::move(config)) {
  config_.Validate();
  weights_ = TextModelParams::Create(params_, config_, rng);
}

TextModel TextModel::Clone() const {
  Rng rng(0);
  TextModel copy(config_, rng);
  copy.params_.CopyValuesFrom(params_);
  copy.negative_offset_ = negative_offset_;
  return copy;
}

Tensor TextModel::Features(const std::vector<const TextInstance*>& batch,
                           const Tensor& molecule) const {
  std::vector<Tensor> blocks;
  if (config_.use_text) {
    std::vector<Tensor> rows;
    rows.reserve(batch.size());
    for (const TextInstance* inst : batch) {
      rows.push_back(CnnEncode(*inst, weights_, config_));
    }
    blocks.push_back(rows.size() == 1 ? rows[0] : Concat(rows, 0));
  }
  if (config_.molecule_dim > 0) {
    if (!molecule.defined()) {
      throw DataError("model expects molecule features but none were given");
    }
    if (molecule.rows() != static_cast<int64_t>(batch.size()) ||
        molecule.cols() != config_.molecule_dim) {
      throw ShapeError("TextModel: molecule block " +
                       ShapeToString(molecule.shape()) + " for batch of " +
                       std::to_string(batch.size()) + " and molecule_dim " +
                       std::to_string(config_.molecule_dim));
    }
    blocks.push_back(molecule);
  }
  return blocks.size() == 1 ? blocks[0] : Concat(blocks, 1);
}

Tensor TextModel::Forward(const std::vector<const TextInstance*>& batch,
                          const Tensor& molecule) const {
  return TextClassify(Features(batch, molecule), weights_, negative_offset_);
}

void TextModel::Save(const std::string& path,
                     nlohmann::ordered_json extra) const {
  nlohmann::ordered_json meta;
  meta["model"] = "text";
  meta["vocab_size"] = config_.vocab_size;
  meta["word_dim"] = config_.word_dim;
  meta["position_dim"] = config_.position_dim;
  meta["position_clip"] = config_.position_clip;
  meta["windows"] = config_.windows;
  meta["filters"] = config_.filters;
  meta["hidden"] = config_.hidden;
  meta["use_text"] = config_.use_text;
  meta["molecule_dim"] = config_.molecule_dim;
  meta["negative_offset"] = negative_offset_;
  meta["extra"] = std::move(extra);
  SaveCheckpoint(path, params_, meta);
}

TextModel TextModel::Load(const std::string& path,
                          nlohmann::ordered_json* extra) {
  const auto doc = ReadCheckpoint(path);
  const auto& meta = doc.at("metadata");
  if (meta.value("model", "") != "text") {
    throw DataError(path + " is not a text model checkpoint");
  }
  TextModelConfig config;
  double offset = 0.0;
  try {
    config.vocab_size = meta.at("vocab_size").get<int64_t>();
    config.word_dim = meta.at("word_dim").get<int>();
    config.position_dim = meta.at("position_dim").get<int>();
    config.position_clip = meta.at("position_clip").get<int>();
    config.windows = meta.at("windows").get<std::vector<int>>();
    config.filters = meta.at("filters").get<int>();
    config.hidden = meta.at("hidden").get<int>();
    config.use_text = meta.at("use_text").get<bool>();
    config.molecule_dim = meta.at("molecule_dim").get<int>();
    offset = meta.at("negative_offset").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad text checkpoint metadata: " + e.what());
  }
  Rng rng(0);
  TextModel model(config, rng);
  model.params_.LoadJson(doc.at("parameters"));
  model.negative_offset_ = offset;
  if (extra) *extra = meta.value("extra", nlohmann::ordered_json::object());
  return model;
}

}  // namespace molfuse
