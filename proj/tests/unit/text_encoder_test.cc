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
#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "molfuse/errors.h"
#include "molfuse/gradient_check.h"

namespace molfuse {
namespace {

void Fill(ParameterSet& params, double value) {
  for (Parameter& p : params.params()) {
    std::fill(p.value.mutable_data().begin(), p.value.mutable_data().end(), value);
  }
}

void Randomize(ParameterSet& params, Rng& rng, double scale) {
  for (Parameter& p : params.params()) {
    for (double& v : p.value.mutable_data()) v = rng.Uniform(-scale, scale);
  }
}

TextInstance MakeInstance(std::vector<int64_t> tokens, size_t d1, size_t d2,
                          int clip) {
  TextInstance instance;
  instance.pair_id = "s0.p0";
  const PositionFeatures pos = BuildPositionFeatures(tokens.size(), d1, d2, clip);
  instance.tokens = std::move(tokens);
  instance.position1 = pos.first;
  instance.position2 = pos.second;
  return instance;
}

TextModelConfig SmallConfig() {
  TextModelConfig config;
  config.vocab_size = 6;
  config.word_dim = 3;
  config.position_dim = 2;
  config.position_clip = 4;
  config.windows = {1, 3};
  config.filters = 4;
  config.hidden = 7;
  return config;
}

TEST(PositionFeaturesTest, ClampsOffsets) {
  const PositionFeatures pos = BuildPositionFeatures(5, 1, 4, 2);
  EXPECT_EQ(pos.first, (std::vector<int64_t>{1, 2, 3, 4, 4}));
  EXPECT_EQ(pos.second, (std::vector<int64_t>{0, 0, 0, 1, 2}));
}

TEST(PositionFeaturesTest, FarTokensShareTheEndRow) {
  const PositionFeatures pos = BuildPositionFeatures(120, 100, 110, 50);
  // Offset -100 clamps to -50, row 0.
  EXPECT_EQ(pos.first[0], 0);
  EXPECT_EQ(pos.first[50], 0);
  EXPECT_EQ(pos.first[51], 1);
  EXPECT_EQ(pos.second[0], 0);
  EXPECT_EQ(pos.first[100], 50);
}

TEST(TextModelConfigTest, Validation) {
  TextModelConfig config = SmallConfig();
  EXPECT_NO_THROW(config.Validate());
  config.windows = {4};
  EXPECT_THROW(config.Validate(), ConfigError);
  config = SmallConfig();
  config.windows.clear();
  EXPECT_THROW(config.Validate(), ConfigError);
  config = SmallConfig();
  config.filters = 0;
  EXPECT_THROW(config.Validate(), ConfigError);
  config = SmallConfig();
  config.use_text = false;
  EXPECT_THROW(config.Validate(), ConfigError);
  config.molecule_dim = 4;
  EXPECT_NO_THROW(config.Validate());
}

TEST(TextModelConfigTest, DefaultFeatureWidth) {
  const TextModelConfig config;
  EXPECT_EQ(config.TextFeatureDim(), 300);
  EXPECT_EQ(config.TokenDim(), 240);
}

TEST(CnnEncodeTest, FeatureWidthIsWindowsTimesFilters) {
  TextModelConfig config = SmallConfig();
  Rng rng(1);
  const TextModel model(config, rng);
  const TextInstance instance = MakeInstance({1, 2, 3, 4, 5}, 0, 3, 4);
  const Tensor h = CnnEncode(instance, model.weights(), config);
  EXPECT_EQ(h.shape(), (Shape{1, 8}));
}

TEST(CnnEncodeTest, ZeroFiltersGiveZeroFeatures) {
  TextModelConfig config = SmallConfig();
  Rng rng(2);
  TextModel model(config, rng);
  TextModelParams weights = model.weights();
  for (size_t l = 0; l < config.windows.size(); ++l) {
    for (Tensor* t : {&weights.conv_weight[l], &weights.conv_bias[l]}) {
      std::fill(t->mutable_data().begin(), t->mutable_data().end(), 0.0);
    }
  }
  const TextInstance instance = MakeInstance({1, 2, 3}, 0, 2, 4);
  const Tensor h = CnnEncode(instance, model.weights(), config);
  for (int64_t i = 0; i < h.size(); ++i) EXPECT_EQ(h.at(i), 0.0);
}

// Direct loops over padded windows as an independent oracle.
TEST(CnnEncodeTest, MatchesDirectConvolution) {
  TextModelConfig config = SmallConfig();
  Rng rng(3);
  TextModel model(config, rng);
  Randomize(model.params(), rng, 1.0);
  const TextInstance instance = MakeInstance({5, 1, 0, 2, 2, 3}, 1, 4, 4);
  const TextModelParams& p = model.weights();
  const int d = config.TokenDim();
  const int64_t n = static_cast<int64_t>(instance.tokens.size());
  auto token_feature = [&](int64_t t, int j) -> double {
    if (t < 0 || t >= n) return 0.0;
    if (j < config.word_dim) return p.word_embedding.at(instance.tokens[t], j);
    j -= config.word_dim;
    if (j < config.position_dim) return p.position1.at(instance.position1[t], j);
    j -= config.position_dim;
    return p.position2.at(instance.position2[t], j);
  };
  std::vector<double> expected;
  for (size_t l = 0; l < config.windows.size(); ++l) {
    const int k = config.windows[l];
    const int pad = (k - 1) / 2;
    for (int f = 0; f < config.filters; ++f) {
      double best = 0.0;
      for (int64_t t = 0; t < n; ++t) {
        double z = p.conv_bias[l].at(f);
        for (int o = 0; o < k; ++o) {
          for (int j = 0; j < d; ++j) {
            z += p.conv_weight[l].at(f, o * d + j) * token_feature(t - pad + o, j);
          }
        }
        best = std::max(best, z);
      }
      expected.push_back(best);
    }
  }
  const Tensor h = CnnEncode(instance, p, config);
  ASSERT_EQ(static_cast<size_t>(h.size()), expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(h.at(static_cast<int64_t>(i)), expected[i], 1e-12) << i;
  }
}

TEST(CnnEncodeTest, RejectsOutOfVocabularyIds) {
  const TextModelConfig config = SmallConfig();
  Rng rng(4);
  const TextModel model(config, rng);
  EXPECT_THROW(CnnEncode(MakeInstance({1, 6}, 0, 1, 4), model.weights(), config),
               DataError);
  EXPECT_THROW(CnnEncode(MakeInstance({}, 0, 0, 4), model.weights(), config),
               DataError);
}

TEST(TextClassifyTest, ZeroParametersGiveUniform) {
  const TextModelConfig config = SmallConfig();
  Rng rng(5);
  TextModel model(config, rng);
  Fill(model.params(), 0.0);
  const TextInstance instance = MakeInstance({1, 2, 3}, 0, 2, 4);
  const Tensor p = model.Forward({&instance}, Tensor());
  ASSERT_EQ(p.shape(), (Shape{1, kNumLabels}));
  for (int64_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p.at(i), 0.2, 1e-15);
}

TEST(TextClassifyTest, LargeNegativeOffsetForcesNegative) {
  const TextModelConfig config = SmallConfig();
  Rng rng(6);
  TextModel model(config, rng);
  Randomize(model.params(), rng, 1.0);
  model.set_negative_offset(1e3);
  const TextInstance instance = MakeInstance({1, 2, 3, 4}, 0, 3, 4);
  const Tensor p = model.Forward({&instance}, Tensor());
  EXPECT_NEAR(p.at(LabelIndex(Label::kNegative)), 1.0, 1e-12);
  model.set_negative_offset(-1e3);
  EXPECT_LT(model.Forward({&instance}, Tensor()).at(LabelIndex(Label::kNegative)),
            1e-12);
}

// Permuting the filters of one window, together with the matching columns
// of the hidden layer, leaves the prediction unchanged.
TEST(TextModelTest, FilterPermutationInvariance) {
  const TextModelConfig config = SmallConfig();
  Rng rng(7);
  TextModel model(config, rng);
  Randomize(model.params(), rng, 0.5);
  const TextInstance instance = MakeInstance({1, 2, 3, 4, 5}, 1, 3, 4);
  const Tensor before = model.Forward({&instance}, Tensor());

  const std::vector<int> perm = {2, 0, 3, 1};
  const int window = 1;
  const int d = config.windows[window] * config.TokenDim();
  TextModelParams w = model.weights();
  const std::vector<double> conv(w.conv_weight[window].data().begin(),
                                 w.conv_weight[window].data().end());
  const std::vector<double> bias(w.conv_bias[window].data().begin(),
                                 w.conv_bias[window].data().end());
  const std::vector<double> hidden(w.hidden_weight.data().begin(),
                                   w.hidden_weight.data().end());
  const int64_t in = w.hidden_weight.cols();
  for (int f = 0; f < config.filters; ++f) {
    for (int j = 0; j < d; ++j) {
      w.conv_weight[window].mutable_data()[perm[f] * d + j] = conv[f * d + j];
    }
    w.conv_bias[window].mutable_data()[perm[f]] = bias[f];
    for (int r = 0; r < config.hidden; ++r) {
      const int64_t base = window * config.filters;
      w.hidden_weight.mutable_data()[r * in + base + perm[f]] =
          hidden[r * in + base + f];
    }
  }
  const Tensor after = model.Forward({&instance}, Tensor());
  for (int64_t i = 0; i < before.size(); ++i) {
    EXPECT_NEAR(before.at(i), after.at(i), 1e-12);
  }
}

TEST(TextModelTest, MoleculeOnlyIgnoresTokens) {
  TextModelConfig config = SmallConfig();
  config.use_text = false;
  config.molecule_dim = 4;
  Rng rng(8);
  const TextModel model(config, rng);
  const TextInstance a = MakeInstance({1, 2, 3}, 0, 2, 4);
  const TextInstance b = MakeInstance({5, 5, 4, 4, 1}, 1, 4, 4);
  const Tensor molecule = Tensor::FromData({2, 4}, {1, 2, 3, 4, 1, 2, 3, 4});
  const Tensor p = model.Forward({&a, &b}, molecule);
  for (int c = 0; c < kNumLabels; ++c) EXPECT_EQ(p.at(0, c), p.at(1, c));
}

TEST(TextModelTest, FeaturesConcatenateMoleculeBlock) {
  TextModelConfig config = SmallConfig();
  config.molecule_dim = 2;
  Rng rng(9);
  const TextModel model(config, rng);
  const TextInstance a = MakeInstance({1, 2, 3}, 0, 2, 4);
  const Tensor features = model.Features({&a}, Tensor::Row({0.25, -0.5}));
  ASSERT_EQ(features.shape(), (Shape{1, 10}));
  EXPECT_EQ(features.at(8), 0.25);
  EXPECT_EQ(features.at(9), -0.5);
  EXPECT_THROW(model.Features({&a}, Tensor::Row({1.0, 2.0, 3.0})), ShapeError);
}

TEST(TextModelTest, GradientsMatchFiniteDifferences) {
  TextModelConfig config = SmallConfig();
  config.molecule_dim = 3;
  Rng rng(10);
  TextModel model(config, rng);
  Randomize(model.params(), rng, 0.3);
  const TextInstance a = MakeInstance({1, 2, 3, 4}, 0, 3, 4);
  const TextInstance b = MakeInstance({5, 0, 2}, 2, 0, 4);
  const Tensor molecule = Tensor::FromData({2, 3}, {0.1, -0.2, 0.3, 0.0, 0.5, -0.4});
  std::vector<Tensor> inputs;
  for (Parameter& p : model.params().params()) inputs.push_back(p.value);
  const std::vector<int64_t> gold = {0, 4};
  const auto result = GradientCheck(
      [&] { return CrossEntropy(model.Forward({&a, &b}, molecule), gold); }, inputs);
  EXPECT_LT(result.max_relative_error, 1e-4);
}

TEST(TextModelTest, SaveLoadKeepsOffsetAndExtra) {
  const TextModelConfig config = SmallConfig();
  Rng rng(11);
  TextModel model(config, rng);
  model.set_negative_offset(0.75);
  const std::string path =
      (std::filesystem::temp_directory_path() / "molfuse_text_model.json").string();
  model.Save(path, {{"mode", "text"}});
  nlohmann::ordered_json extra;
  const TextModel loaded = TextModel::Load(path, &extra);
  std::filesystem::remove(path);
  EXPECT_EQ(loaded.negative_offset(), 0.75);
  EXPECT_EQ(extra["mode"], "text");
  EXPECT_EQ(loaded.config().windows, config.windows);
  EXPECT_TRUE(loaded.params().ValuesEqual(model.params()));
}

}  // namespace
}  // namespace molfuse
