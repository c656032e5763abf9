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

// Convolutional sentence-pair encoder and the relation classifier on top.

#ifndef MOLFUSE_TEXT_ENCODER_H_
#define MOLFUSE_TEXT_ENCODER_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "molfuse/labels.h"
#include "molfuse/parameters.h"
#include "molfuse/rng.h"
#include "molfuse/tensor.h"

namespace molfuse {

// A masked candidate pair ready for the network.
struct TextInstance {
  std::string pair_id;
  std::vector<int64_t> tokens;
  // Position-embedding rows, i.e. clamped offsets shifted by the clip.
  std::vector<int64_t> position1;
  std::vector<int64_t> position2;
  Label label = Label::kNegative;
  std::optional<std::string> drug1_id;
  std::optional<std::string> drug2_id;
};

struct PositionFeatures {
  std::vector<int64_t> first;
  std::vector<int64_t> second;
};

// Row index clamp(k - target, -clip, clip) + clip for every token k. The
// table therefore has 2 * clip + 1 rows, with the two end rows absorbing all
// offsets beyond the clip.
PositionFeatures BuildPositionFeatures(size_t num_tokens, size_t drug1_index,
                                       size_t drug2_index, int clip);

struct TextModelConfig {
  int64_t vocab_size = 1;
  int word_dim = 200;
  int position_dim = 20;
  int position_clip = 50;
  std::vector<int> windows = {3, 5, 7};
  int filters = 100;
  int hidden = 500;
  // Use the CNN features. Disabled for the molecule-only ablation.
  bool use_text = true;
  // Width of the molecule block appended to the CNN features (0, or 2d).
  int molecule_dim = 0;

  int TokenDim() const { return word_dim + 2 * position_dim; }
  int TextFeatureDim() const {
    return use_text ? static_cast<int>(windows.size()) * filters : 0;
  }
  int ClassifierInputDim() const { return TextFeatureDim() + molecule_dim; }
  // Throws ConfigError.
  void Validate() const;
};

struct TextModelParams {
  Tensor word_embedding;      // vocab x word_dim
  Tensor position1, position2;  // (2 clip + 1) x position_dim
  std::vector<Tensor> conv_weight;  // filters x (window * token_dim)
  std::vector<Tensor> conv_bias;    // 1 x filters
  Tensor hidden_weight, hidden_bias;  // hidden x input
  Tensor output_weight, output_bias;  // 5 x hidden

  static TextModelParams Create(ParameterSet& params,
                                const TextModelConfig& config, Rng& rng);
};

// Max-pooled relu convolution features, 1 x (windows * filters). Each
// sentence is zero-padded by (k - 1) / 2 rows per side for window k.
Tensor CnnEncode(const TextInstance& instance, const TextModelParams& params,
                 const TextModelConfig& config);

// softmax(W2 relu(W1 h + b1) + b2 + offset on the Negative logit): batch x 5.
Tensor TextClassify(const Tensor& features, const TextModelParams& params,
                    double negative_offset = 0.0);

class TextModel {
 public:
  TextModel(TextModelConfig config, Rng& rng);
  TextModel(TextModel&&) = default;
  TextModel& operator=(TextModel&&) = default;
  TextModel(const TextModel&) = delete;
  TextModel& operator=(const TextModel&) = delete;

  TextModel Clone() const;

  const TextModelConfig& config() const { return config_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  const TextModelParams& weights() const { return weights_; }

  double negative_offset() const { return negative_offset_; }
  void set_negative_offset(double offset) { negative_offset_ = offset; }

  // Classifier input rows for a batch: [h_t; molecule] (either part may be
  // absent depending on the configuration). molecule must be batch x
  // molecule_dim when molecule_dim > 0.
  Tensor Features(const std::vector<const TextInstance*>& batch,
                  const Tensor& molecule) const;
  // batch x 5 distributions.
  Tensor Forward(const std::vector<const TextInstance*>& batch,
                 const Tensor& molecule) const;

  // Metadata carries the config, offset and any extra fields (vocabulary).
  void Save(const std::string& path, nlohmann::ordered_json extra) const;
  static TextModel Load(const std::string& path,
                        nlohmann::ordered_json* extra = nullptr);

 private:
  TextModelConfig config_;
  ParameterSet params_;
  TextModelParams weights_;
  double negative_offset_ = 0.0;
};

}  // namespace molfuse

#endif  // MOLFUSE_TEXT_ENCODER_H_
