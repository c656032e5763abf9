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

#include "molfuse/mol_encoder.h"

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "molfuse/errors.h"
#include "molfuse/gradient_check.h"
#include "molfuse/smiles.h"
#include "testing/synthetic.h"

namespace molfuse {
namespace {

void ZeroAll(ParameterSet& params) {
  for (Parameter& p : params.params()) {
    for (double& v : p.value.mutable_data()) v = 0.0;
  }
}

Tensor RowOf(const Tensor& x, int64_t r) {
  std::vector<double> row(x.data().begin() + r * x.cols(),
                          x.data().begin() + (r + 1) * x.cols());
  return Tensor::FromData({1, x.cols()}, std::move(row));
}

double MaxAbsDiff(const Tensor& a, const Tensor& b) {
  EXPECT_EQ(a.shape(), b.shape());
  double worst = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.at(i) - b.at(i)));
  }
  return worst;
}

TEST(DegreeBucketTest, ClampsAtBothEnds) {
  EXPECT_EQ(DegreeBucket(0), 1);
  EXPECT_EQ(DegreeBucket(1), 1);
  EXPECT_EQ(DegreeBucket(4), 4);
  EXPECT_EQ(DegreeBucket(6), 6);
  EXPECT_EQ(DegreeBucket(9), kMaxDegreeBucket);
}

TEST(EncoderKindTest, ParsesNames) {
  EXPECT_EQ(ParseEncoderKind("nfp"), EncoderKind::kNfp);
  EXPECT_EQ(ParseEncoderKind("ggnn"), EncoderKind::kGgnn);
  EXPECT_STREQ(EncoderKindName(EncoderKind::kGgnn), "ggnn");
  EXPECT_THROW(ParseEncoderKind("gcn"), ConfigError);
}

TEST(GraphBatchTest, DisjointUnionOffsetsNodes) {
  const MolGraph co = ParseSmiles("C=O");
  const MolGraph ccc = ParseSmiles("CCC");
  const AtomVocabulary vocab = AtomVocabulary::Build({&co, &ccc});
  const GraphBatch batch = GraphBatch::Build({&co, &ccc}, vocab);
  EXPECT_EQ(batch.num_graphs, 2);
  EXPECT_EQ(batch.num_nodes, 5);
  EXPECT_EQ(batch.graph, (std::vector<int64_t>{0, 0, 1, 1, 1}));
  EXPECT_EQ(batch.edge_source.size(), 6u);
  const int dbl = static_cast<int>(BondType::kDouble);
  EXPECT_EQ(batch.typed_source[dbl], (std::vector<int64_t>{0, 1}));
  EXPECT_EQ(batch.bucket[3], 2);
}

TEST(GraphBatchTest, RejectsEmptyGraphAndStrictUnknowns) {
  const MolGraph co = ParseSmiles("CO");
  const MolGraph fe = ParseSmiles("[Fe]");
  const AtomVocabulary vocab = AtomVocabulary::Build({&co});
  const MolGraph empty;
  EXPECT_THROW(GraphBatch::Build({&empty}, vocab), DataError);
  EXPECT_THROW(GraphBatch::Build({&fe}, vocab, /*strict=*/true), DataError);
  EXPECT_EQ(GraphBatch::Build({&fe}, vocab).atom[0], AtomVocabulary::kUnknown);
}

TEST(NfpTest, SingleNodeWithZeroWeights) {
  const MolGraph c = ParseSmiles("C");
  const AtomVocabulary vocab = AtomVocabulary::Build({&c});
  ParameterSet params;
  Rng rng(1);
  const NfpParams nfp = NfpParams::Create(params, vocab.size(), 2, 1, rng);
  ZeroAll(params);
  const Tensor h = NfpEncode(c, vocab, nfp);
  ASSERT_EQ(h.shape(), (Shape{1, 2}));
  EXPECT_NEAR(h.at(0), 1.0, 1e-12);
  EXPECT_NEAR(h.at(1), 1.0, 1e-12);
}

// With no propagation steps the fingerprint is sum_v softmax(W0 e(v)).
TEST(NfpTest, ZeroStepsMatchesClosedForm) {
  const MolGraph g = ParseSmiles("CO");
  const AtomVocabulary vocab = AtomVocabulary::Build({&g});
  ParameterSet params;
  Rng rng(2);
  const NfpParams nfp = NfpParams::Create(params, vocab.size(), 2, 0, rng);
  ASSERT_EQ(nfp.readout.size(), 1u);
  const Tensor& e = nfp.embedding;
  const Tensor& w = nfp.readout[0];
  double expected[2] = {0.0, 0.0};
  for (int atom : {vocab.Index("C"), vocab.Index("O")}) {
    double z[2];
    for (int i = 0; i < 2; ++i) {
      z[i] = w.at(i, 0) * e.at(atom, 0) + w.at(i, 1) * e.at(atom, 1);
    }
    const double m = std::max(z[0], z[1]);
    const double denom = std::exp(z[0] - m) + std::exp(z[1] - m);
    for (int i = 0; i < 2; ++i) expected[i] += std::exp(z[i] - m) / denom;
  }
  const Tensor h = NfpEncode(g, vocab, nfp);
  EXPECT_NEAR(h.at(0), expected[0], 1e-12);
  EXPECT_NEAR(h.at(1), expected[1], 1e-12);
  EXPECT_NEAR(h.at(0) + h.at(1), 2.0, 1e-12);
}

TEST(GgnnTest, IsolatedNodeWithZeroWeightsEncodesToZero) {
  const MolGraph c = ParseSmiles("C");
  const AtomVocabulary vocab = AtomVocabulary::Build({&c});
  ParameterSet params;
  Rng rng(3);
  const GgnnParams ggnn = GgnnParams::Create(params, vocab.size(), 3, 2, rng);
  ZeroAll(params);
  const Tensor h = GgnnEncode(c, vocab, ggnn);
  for (int64_t i = 0; i < h.size(); ++i) EXPECT_EQ(h.at(i), 0.0);
}

class EncoderTest : public ::testing::TestWithParam<EncoderKind> {
 protected:
  MolecularModel MakeModel(const std::vector<const MolGraph*>& graphs,
                           uint64_t seed = 5) {
    Rng rng(seed);
    return MolecularModel(MolModelConfig{GetParam(), 6, 2, 8},
                          AtomVocabulary::Build(graphs), rng);
  }
};

TEST_P(EncoderTest, DistinguishesSizeAndBondOrder) {
  const MolGraph co = ParseSmiles("CO");
  const MolGraph cco = ParseSmiles("CCO");
  const MolGraph c_o = ParseSmiles("C=O");
  const MolecularModel model = MakeModel({&co, &cco});
  const Tensor h = model.EncodeGraphs({&co, &cco, &c_o});
  const Tensor a = RowOf(h, 0), b = RowOf(h, 1), c = RowOf(h, 2);
  EXPECT_GT(MaxAbsDiff(a, b), 1e-6);
  if (GetParam() == EncoderKind::kGgnn) {
    // NFP weights by degree only and ignores bond types.
    EXPECT_GT(MaxAbsDiff(a, c), 1e-6);
  }
}

TEST_P(EncoderTest, InvariantToAtomAndBondOrder) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const MolGraph g = ParseSmiles(testing::RandomSmiles(rng));
    const MolecularModel model = MakeModel({&g}, trial);
    const MolGraph relabeled =
        g.Relabeled(testing::RandomPermutation(g.num_atoms(), rng));
    const MolGraph reordered =
        relabeled.WithBondOrder(testing::RandomPermutation(g.num_bonds(), rng));
    const Tensor h = model.EncodeGraphs({&g, &reordered});
    EXPECT_LT(MaxAbsDiff(RowOf(h, 0), RowOf(h, 1)), 1e-9);
  }
}

TEST_P(EncoderTest, BatchedMatchesSingleGraph) {
  const MolGraph a = ParseSmiles("CC(=O)Oc1ccccc1C(=O)O");
  const MolGraph b = ParseSmiles("c1ccncc1");
  const MolecularModel model = MakeModel({&a, &b});
  const Tensor both = model.EncodeGraphs({&a, &b});
  EXPECT_LT(MaxAbsDiff(RowOf(both, 1), model.EncodeGraphs({&b})), 1e-12);
}

TEST_P(EncoderTest, PairHalvesSwapAndZeroForMissing) {
  const MolGraph a = ParseSmiles("CCN");
  const MolGraph b = ParseSmiles("c1ccccc1O");
  const MolecularModel model = MakeModel({&a, &b});
  const Tensor ab = EncodePair(&a, &b, model);
  const Tensor ba = EncodePair(&b, &a, model);
  ASSERT_EQ(ab.shape(), (Shape{1, 12}));
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(ab.at(i), ba.at(i + 6));
    EXPECT_EQ(ab.at(i + 6), ba.at(i));
  }
  const Tensor a_missing = EncodePair(&a, nullptr, model);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(a_missing.at(i), ab.at(i));
    EXPECT_EQ(a_missing.at(i + 6), 0.0);
  }
  const Tensor batched = model.EncodePairs({{&a, &b}, {nullptr, nullptr}});
  EXPECT_EQ(MaxAbsDiff(RowOf(batched, 0), ab), 0.0);
  for (int i = 0; i < 12; ++i) EXPECT_EQ(batched.at(1, i), 0.0);
}

TEST_P(EncoderTest, ClassifierGradientsMatchFiniteDifferences) {
  const MolGraph a = ParseSmiles("CC(=O)N");
  const MolGraph b = ParseSmiles("c1ccccc1");
  const MolGraph c = ParseSmiles("OCCO");
  MolecularModel model = MakeModel({&a, &b, &c});
  Rng rng(21);
  std::vector<Tensor> inputs;
  for (Parameter& p : model.params().params()) {
    for (double& v : p.value.mutable_data()) v = rng.Uniform(-0.3, 0.3);
    inputs.push_back(p.value);
  }
  const std::vector<int64_t> gold = {1, 0};
  const auto result = GradientCheck(
      [&] {
        return CrossEntropy(model.Classify(model.EncodePairs({{&a, &b}, {&c, &a}})),
                            gold);
      },
      inputs);
  EXPECT_LT(result.max_relative_error, 1e-4);
}

TEST_P(EncoderTest, SaveLoadRoundTrip) {
  const MolGraph a = ParseSmiles("CCO");
  const MolecularModel model = MakeModel({&a});
  const std::string path =
      (std::filesystem::temp_directory_path() / "molfuse_mol_model.json").string();
  model.Save(path);
  const MolecularModel loaded = MolecularModel::Load(path);
  std::filesystem::remove(path);
  EXPECT_EQ(loaded.config().encoder, GetParam());
  EXPECT_TRUE(loaded.params().ValuesEqual(model.params()));
  EXPECT_EQ(MaxAbsDiff(loaded.EncodeGraphs({&a}), model.EncodeGraphs({&a})), 0.0);
}

TEST_P(EncoderTest, CloneIsIndependent) {
  const MolGraph a = ParseSmiles("CCO");
  MolecularModel model = MakeModel({&a});
  const MolecularModel copy = model.Clone();
  model.params().params()[0].value.mutable_data()[0] += 1.0;
  EXPECT_FALSE(copy.params().ValuesEqual(model.params()));
}

INSTANTIATE_TEST_SUITE_P(Kinds, EncoderTest,
                         ::testing::Values(EncoderKind::kNfp, EncoderKind::kGgnn),
                         [](const auto& info) {
                           return std::string(EncoderKindName(info.param));
                         });

TEST(MolClassifyTest, ZeroParametersGiveEvenOdds) {
  ParameterSet params;
  Rng rng(4);
  const MolClassifierParams classifier =
      MolClassifierParams::Create(params, 8, 5, rng);
  ZeroAll(params);
  const Tensor p = MolClassify(Tensor::Full({3, 8}, 0.7), classifier);
  ASSERT_EQ(p.shape(), (Shape{3, 2}));
  for (int64_t i = 0; i < p.size(); ++i) EXPECT_DOUBLE_EQ(p.at(i), 0.5);
}

TEST(LinearTest, MatchesHandComputation) {
  const Tensor x = Tensor::FromData({1, 2}, {1.0, 2.0});
  const Tensor w = Tensor::FromData({3, 2}, {1, 0, 0, 1, 1, 1});
  const Tensor b = Tensor::Row({0.5, -0.5, 0.0});
  const Tensor y = Linear(x, w, b);
  EXPECT_EQ(y.shape(), (Shape{1, 3}));
  EXPECT_DOUBLE_EQ(y.at(0), 1.5);
  EXPECT_DOUBLE_EQ(y.at(1), 1.5);
  EXPECT_DOUBLE_EQ(y.at(2), 3.0);
}

}  // namespace
}  // namespace molfuse
