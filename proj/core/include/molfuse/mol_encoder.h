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

// Graph encoders over molecular graphs and the molecular pair classifier.
//
// Both encoders run on a GraphBatch, the disjoint union of several graphs,
// and return one d-dimensional row per graph. Neighbour sums are expressed
// as gather + segment-sum so the whole batch is a handful of dense ops.

#ifndef MOLFUSE_MOL_ENCODER_H_
#define MOLFUSE_MOL_ENCODER_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "molfuse/parameters.h"
#include "molfuse/rng.h"
#include "molfuse/smiles.h"
#include "molfuse/tensor.h"

namespace molfuse {

enum class EncoderKind { kNfp, kGgnn };

const char* EncoderKindName(EncoderKind kind);
// "nfp" or "ggnn"; throws ConfigError otherwise.
EncoderKind ParseEncoderKind(std::string_view name);

// Degree buckets for the NFP degree-specific weights. Degrees above the
// maximum clamp to it; isolated atoms use bucket 1.
inline constexpr int kMaxDegreeBucket = 6;
int DegreeBucket(int degree);

struct GraphBatch {
  int64_t num_graphs = 0;
  int64_t num_nodes = 0;
  std::vector<int64_t> atom;        // atom vocabulary row per node
  std::vector<int64_t> graph;       // owning graph per node
  std::vector<int> bucket;          // degree bucket per node
  // Directed edges (each bond appears in both directions).
  std::vector<int64_t> edge_source;
  std::vector<int64_t> edge_target;
  // Directed edges split by bond type.
  std::array<std::vector<int64_t>, kNumBondTypes> typed_source;
  std::array<std::vector<int64_t>, kNumBondTypes> typed_target;

  // strict: unseen elements throw instead of mapping to the unknown row.
  // Graphs must be nonempty.
  static GraphBatch Build(const std::vector<const MolGraph*>& graphs,
                          const AtomVocabulary& vocab, bool strict = false);
};

struct NfpParams {
  Tensor embedding;                             // vocab x d
  std::vector<std::vector<Tensor>> degree;      // [step][bucket-1], d x d
  std::vector<Tensor> readout;                  // [0..T], d x d

  int steps() const { return static_cast<int>(degree.size()); }
  static NfpParams Create(ParameterSet& params, int vocab_size, int dim,
                          int steps, Rng& rng);
};

struct GgnnParams {
  Tensor embedding;                              // vocab x d
  std::array<Tensor, kNumBondTypes> bond;        // d x d message maps
  // GRU: input (message) weights, recurrent weights, biases for the update
  // gate z, reset gate r and candidate n.
  Tensor input_z, input_r, input_n;
  Tensor hidden_z, hidden_r, hidden_n;
  Tensor bias_z, bias_r, bias_n;
  Tensor gate_weight, gate_bias;    // i: 2d -> d
  Tensor value_weight, value_bias;  // j: d -> d
  int steps = 0;

  static GgnnParams Create(ParameterSet& params, int vocab_size, int dim,
                           int steps, Rng& rng);
};

struct MolClassifierParams {
  Tensor hidden_weight, hidden_bias;  // hidden x 2d
  Tensor output_weight, output_bias;  // 2 x hidden

  static MolClassifierParams Create(ParameterSet& params, int input_dim,
                                    int hidden, Rng& rng);
};

// x * W^T + b for row-major x (n x in), W (out x in), b (1 x out).
Tensor Linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

// Neural fingerprint: h^{t+1}_v = sigmoid(H_t^{deg v} (h^t_v + sum of
// neighbour h^t_w)), readout sum over nodes and steps 0..T of
// softmax(W^t h^t_v). Returns num_graphs x d.
Tensor NfpEncode(const GraphBatch& batch, const NfpParams& params);

// Gated graph network: messages sum A_{bond type} h_w over neighbours, the
// node state is updated by a shared GRU (state h, input m), and the readout
// is sum_v sigmoid(i([h^T_v; h^0_v])) * j(h^T_v). Returns num_graphs x d.
Tensor GgnnEncode(const GraphBatch& batch, const GgnnParams& params);

// Single-graph conveniences returning 1 x d. Throws DataError on an empty
// graph.
Tensor NfpEncode(const MolGraph& graph, const AtomVocabulary& vocab,
                 const NfpParams& params);
Tensor GgnnEncode(const MolGraph& graph, const AtomVocabulary& vocab,
                  const GgnnParams& params);

// softmax(W2 relu(W1 h_m + b1) + b2): batch x 2 with column 1 = interacting.
Tensor MolClassify(const Tensor& pair_features,
                   const MolClassifierParams& params);

struct MolModelConfig {
  EncoderKind encoder = EncoderKind::kNfp;
  int dim = 50;
  int steps = 4;
  int hidden = 1000;
};

// Encoder + pair classifier with their parameters and atom vocabulary.
class MolecularModel {
 public:
  MolecularModel(MolModelConfig config, AtomVocabulary vocab, Rng& rng);
  MolecularModel(MolecularModel&&) = default;
  MolecularModel& operator=(MolecularModel&&) = default;
  // Parameters are shared handles; use Clone() for an independent copy.
  MolecularModel(const MolecularModel&) = delete;
  MolecularModel& operator=(const MolecularModel&) = delete;

  MolecularModel Clone() const;

  const MolModelConfig& config() const { return config_; }
  const AtomVocabulary& vocab() const { return vocab_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  // Parameters of the graph encoder only (excludes the pair classifier).
  std::vector<std::string> EncoderParameterNames() const;

  // One row per graph.
  Tensor EncodeGraphs(const std::vector<const MolGraph*>& graphs,
                      bool strict = false) const;
  // h_m = [h_{g1}; h_{g2}] per pair; a null graph contributes zeros.
  Tensor EncodePairs(
      const std::vector<std::pair<const MolGraph*, const MolGraph*>>& pairs,
      bool strict = false) const;
  Tensor Classify(const Tensor& pair_features) const;

  nlohmann::ordered_json Metadata() const;
  void Save(const std::string& path) const;
  static MolecularModel Load(const std::string& path);

 private:
  MolModelConfig config_;
  AtomVocabulary vocab_;
  ParameterSet params_;
  NfpParams nfp_;
  GgnnParams ggnn_;
  MolClassifierParams classifier_;
};

// [h_{g1}; h_{g2}] from per-pair encodings; null graphs give zero halves.
Tensor EncodePair(const MolGraph* first, const MolGraph* second,
                  const MolecularModel& model);

}  // namespace molfuse

#endif  // MOLFUSE_MOL_ENCODER_H_
