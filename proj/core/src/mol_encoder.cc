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

#include <algorithm>
#include <numeric>

#include "molfuse/errors.h"
#include "molfuse/tokenizer.h"

namespace molfuse {

namespace {

std::string StepName(const char* base, int step) {
  return std::string(base) + "." + std::to_string(step);
}

// Gathers rows of x at sources and sums them into targets: the neighbour
// aggregation sum_{w in N(v)} x_w.
Tensor Aggregate(const Tensor& x, const std::vector<int64_t>& source,
                 const std::vector<int64_t>& target, int64_t num_nodes) {
  return SegmentSum(EmbeddingLookup(x, source), target, num_nodes);
}

}  // namespace

const char* EncoderKindName(EncoderKind kind) {
  return kind == EncoderKind::kNfp ? "nfp" : "ggnn";
}

EncoderKind ParseEncoderKind(std::string_view name) {
  const std::string lower = ToLower(name);
  if (lower == "nfp") return EncoderKind::kNfp;
  if (lower == "ggnn") return EncoderKind::kGgnn;
  throw ConfigError("unknown encoder '" + std::string(name) +
                    "' (expected nfp or ggnn)");
}

int DegreeBucket(int degree) {
  return std::clamp(degree, 1, kMaxDegreeBucket);
}

GraphBatch GraphBatch::Build(const std::vector<const MolGraph*>& graphs,
                             const AtomVocabulary& vocab, bool strict) {
  GraphBatch batch;
  batch.num_graphs = static_cast<int64_t>(graphs.size());
  for (size_t g = 0; g < graphs.size(); ++g) {
    const MolGraph& graph = *graphs[g];
    if (graph.empty()) throw DataError("cannot encode an empty molecule");
    const int64_t base = batch.num_nodes;
    for (int a = 0; a < graph.num_atoms(); ++a) {
      batch.atom.push_back(vocab.Index(graph.atoms()[a].symbol, strict));
      batch.graph.push_back(static_cast<int64_t>(g));
      batch.bucket.push_back(DegreeBucket(graph.Degree(a)));
    }
    for (const Bond& b : graph.bonds()) {
      const int64_t u = base + b.begin, v = base + b.end;
      const int type = static_cast<int>(b.type);
      for (auto [s, t] : {std::pair{u, v}, std::pair{v, u}}) {
        batch.edge_source.push_back(s);
        batch.edge_target.push_back(t);
        batch.typed_source[type].push_back(s);
        batch.typed_target[type].push_back(t);
      }
    }
    batch.num_nodes += graph.num_atoms();
  }
  return batch;
}

NfpParams NfpParams::Create(ParameterSet& params, int vocab_size, int dim,
                            int steps, Rng& rng) {
  NfpParams p;
  p.embedding = params.Add("nfp.embedding", {vocab_size, dim},
                           ParamKind::kEmbedding, rng);
  for (int t = 0; t < steps; ++t) {
    std::vector<Tensor> per_degree;
    for (int d = 1; d <= kMaxDegreeBucket; ++d) {
      per_degree.push_back(params.Add(
          "nfp.degree." + std::to_string(t) + "." + std::to_string(d),
          {dim, dim}, ParamKind::kWeight, rng));
    }
    p.degree.push_back(std::move(per_degree));
  }
  for (int t = 0; t <= steps; ++t) {
    p.readout.push_back(params.Add(StepName("nfp.readout", t), {dim, dim},
                                   ParamKind::kWeight, rng));
  }
  return p;
}

GgnnParams GgnnParams::Create(ParameterSet& params, int vocab_size, int dim,
                              int steps, Rng& rng) {
  GgnnParams p;
  p.steps = steps;
  p.embedding = params.Add("ggnn.embedding", {vocab_size, dim},
                           ParamKind::kEmbedding, rng);
  for (int e = 0; e < kNumBondTypes; ++e) {
    p.bond[e] = params.Add(
        std::string("ggnn.bond.") + BondTypeName(static_cast<BondType>(e)),
        {dim, dim}, ParamKind::kWeight, rng);
  }
  auto weight = [&](const char* name, int64_t rows, int64_t cols) {
    return params.Add(name, {rows, cols}, ParamKind::kWeight, rng);
  };
  auto bias = [&](const char* name, int64_t cols) {
    return params.Add(name, {1, cols}, ParamKind::kBias, rng);
  };
  p.input_z = weight("ggnn.gru.input_z", dim, dim);
  p.input_r = weight("ggnn.gru.input_r", dim, dim);
  p.input_n = weight("ggnn.gru.input_n", dim, dim);
  p.hidden_z = weight("ggnn.gru.hidden_z", dim, dim);
  p.hidden_r = weight("ggnn.gru.hidden_r", dim, dim);
  p.hidden_n = weight("ggnn.gru.hidden_n", dim, dim);
  p.bias_z = bias("ggnn.gru.bias_z", dim);
  p.bias_r = bias("ggnn.gru.bias_r", dim);
  p.bias_n = bias("ggnn.gru.bias_n", dim);
  p.gate_weight = weight("ggnn.readout.gate_weight", dim, 2 * dim);
  p.gate_bias = bias("ggnn.readout.gate_bias", dim);
  p.value_weight = weight("ggnn.readout.value_weight", dim, dim);
  p.value_bias = bias("ggnn.readout.value_bias", dim);
  return p;
}

MolClassifierParams MolClassifierParams::Create(ParameterSet& params,
                                                int input_dim, int hidden,
                                                Rng& rng) {
  MolClassifierParams p;
  p.hidden_weight = params.Add("mol.hidden_weight", {hidden, input_dim},
                               ParamKind::kWeight, rng);
  p.hidden_bias = params.Add("mol.hidden_bias", {1, hidden}, ParamKind::kBias,
                             rng);
  p.output_weight = params.Add("mol.output_weight", {2, hidden},
                               ParamKind::kWeight, rng);
  p.output_bias = params.Add("mol.output_bias", {1, 2}, ParamKind::kBias, rng);
  return p;
}

Tensor Linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  return Add(MatMulTransposed(x, weight), bias);
}

Tensor NfpEncode(const GraphBatch& batch, const NfpParams& params) {
  const int64_t n = batch.num_nodes;
  Tensor h = EmbeddingLookup(params.embedding, batch.atom);
  Tensor readout = SegmentSum(Softmax(MatMulTransposed(h, params.readout[0])),
                              batch.graph, batch.num_graphs);

  // Nodes grouped by degree bucket, and where each node lands once the
  // per-bucket results are stacked.
  std::vector<std::vector<int64_t>> by_bucket(kMaxDegreeBucket + 1);
  for (int64_t v = 0; v < n; ++v) by_bucket[batch.bucket[v]].push_back(v);
  std::vector<int64_t> stacked_position(n);
  int64_t next = 0;
  for (const auto& nodes : by_bucket) {
    for (int64_t v : nodes) stacked_position[v] = next++;
  }

  for (int t = 0; t < params.steps(); ++t) {
    Tensor message = Add(
        h, Aggregate(h, batch.edge_source, batch.edge_target, n));
    std::vector<Tensor> parts;
    for (int d = 1; d <= kMaxDegreeBucket; ++d) {
      if (by_bucket[d].empty()) continue;
      parts.push_back(Sigmoid(MatMulTransposed(
          EmbeddingLookup(message, by_bucket[d]), params.degree[t][d - 1])));
    }
    h = EmbeddingLookup(Concat(parts, 0), stacked_position);
    readout = Add(readout,
                  SegmentSum(Softmax(MatMulTransposed(h, params.readout[t + 1])),
                             batch.graph, batch.num_graphs));
  }
  return readout;
}

Tensor GgnnEncode(const GraphBatch& batch, const GgnnParams& params) {
  const int64_t n = batch.num_nodes;
  const Tensor h0 = EmbeddingLookup(params.embedding, batch.atom);
  const int64_t dim = h0.cols();
  Tensor h = h0;
  for (int t = 0; t < params.steps; ++t) {
    Tensor message;
    for (int e = 0; e < kNumBondTypes; ++e) {
      if (batch.typed_source[e].empty()) continue;
      Tensor part = Aggregate(MatMulTransposed(h, params.bond[e]),
                              batch.typed_source[e], batch.typed_target[e], n);
      message = message.defined() ? Add(message, part) : part;
    }
    if (!message.defined()) message = Tensor::Zeros({n, dim});

    const Tensor z = Sigmoid(Add(Add(MatMulTransposed(message, params.input_z),
                                     MatMulTransposed(h, params.hidden_z)),
                                 params.bias_z));
    const Tensor r = Sigmoid(Add(Add(MatMulTransposed(message, params.input_r),
                                     MatMulTransposed(h, params.hidden_r)),
                                 params.bias_r));
    const Tensor candidate =
        Tanh(Add(Add(MatMulTransposed(message, params.input_n),
                     MatMulTransposed(Mul(r, h), params.hidden_n)),
                 params.bias_n));
    // (1 - z) * h + z * candidate
    h = Add(h, Mul(z, Sub(candidate, h)));
  }
  const Tensor gate = Sigmoid(
      Linear(Concat({h, h0}, 1), params.gate_weight, params.gate_bias));
  const Tensor value = Linear(h, params.value_weight, params.value_bias);
  return SegmentSum(Mul(gate, value), batch.graph, batch.num_graphs);
}

Tensor NfpEncode(const MolGraph& graph, const AtomVocabulary& vocab,
                 const NfpParams& params) {
  return NfpEncode(GraphBatch::Build({&graph}, vocab), params);
}

Tensor GgnnEncode(const MolGraph& graph, const AtomVocabulary& vocab,
                  const GgnnParams& params) {
  return GgnnEncode(GraphBatch::Build({&graph}, vocab), params);
}

Tensor MolClassify(const Tensor& pair_features,
                   const MolClassifierParams& params) {
  const Tensor hidden = Relu(
      Linear(pair_features, params.hidden_weight, params.hidden_bias));
  return Softmax(Linear(hidden, params.output_weight, params.output_bias));
}

MolecularModel::MolecularModel(MolModelConfig config, AtomVocabulary vocab,
                               Rng& rng)
    : config_(config), vocab_(std::move(vocab)) {
  if (config_.dim < 1 || config_.hidden < 1 || config_.steps < 0) {
    throw ConfigError("molecular model needs dim >= 1, hidden >= 1, steps >= 0");
  }
  if (config_.encoder == EncoderKind::kNfp) {
    nfp_ = NfpParams::Create(params_, vocab_.size(), config_.dim, config_.steps,
                             rng);
  } else {
    ggnn_ = GgnnParams::Create(params_, vocab_.size(), config_.dim,
                               config_.steps, rng);
  }
  classifier_ = MolClassifierParams::Create(params_, 2 * config_.dim,
                                            config_.hidden, rng);
}

MolecularModel MolecularModel::Clone() const {
  Rng rng(0);
  MolecularModel copy(config_, vocab_, rng);
  copy.params_.CopyValuesFrom(params_);
  return copy;
}

std::vector<std::string> MolecularModel::EncoderParameterNames() const {
  std::vector<std::string> names;
  for (const Parameter& p : params_.params()) {
    if (p.name.rfind("mol.", 0) != 0) names.push_back(p.name);
  }
  return names;
}

Tensor MolecularModel::EncodeGraphs(const std::vector<const MolGraph*>& graphs,
                                    bool strict) const {
  if (graphs.empty()) return Tensor::Zeros({0, config_.dim});
  const GraphBatch batch = GraphBatch::Build(graphs, vocab_, strict);
  return config_.encoder == EncoderKind::kNfp ? NfpEncode(batch, nfp_)
                                              : GgnnEncode(batch, ggnn_);
}

Tensor MolecularModel::EncodePairs(
    const std::vector<std::pair<const MolGraph*, const MolGraph*>>& pairs,
    bool strict) const {
  // Row 0 of the lookup table is the zero vector for unmatched drugs.
  std::vector<const MolGraph*> graphs;
  std::vector<int64_t> first, second;
  auto slot = [&](const MolGraph* g) -> int64_t {
    if (g == nullptr) return 0;
    graphs.push_back(g);
    return static_cast<int64_t>(graphs.size());
  };
  for (const auto& [a, b] : pairs) {
    first.push_back(slot(a));
    second.push_back(slot(b));
  }
  const Tensor zero = Tensor::Zeros({1, config_.dim});
  const Tensor table =
      graphs.empty() ? zero : Concat({zero, EncodeGraphs(graphs, strict)}, 0);
  return Concat({EmbeddingLookup(table, first), EmbeddingLookup(table, second)},
                1);
}

Tensor MolecularModel::Classify(const Tensor& pair_features) const {
  return MolClassify(pair_features, classifier_);
}

nlohmann::ordered_json MolecularModel::Metadata() const {
  nlohmann::ordered_json meta;
  meta["model"] = "molecular";
  meta["encoder"] = EncoderKindName(config_.encoder);
  meta["dim"] = config_.dim;
  meta["steps"] = config_.steps;
  meta["hidden"] = config_.hidden;
  meta["atoms"] = vocab_.symbols();
  return meta;
}

void MolecularModel::Save(const std::string& path) const {
  SaveCheckpoint(path, params_, Metadata());
}

MolecularModel MolecularModel::Load(const std::string& path) {
  const auto doc = ReadCheckpoint(path);
  const auto& meta = doc.at("metadata");
  if (meta.value("model", "") != "molecular") {
    throw DataError(path + " is not a molecular model checkpoint");
  }
  MolModelConfig config;
  try {
    config.encoder = ParseEncoderKind(meta.at("encoder").get<std::string>());
    config.dim = meta.at("dim").get<int>();
    config.steps = meta.at("steps").get<int>();
    config.hidden = meta.at("hidden").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad molecular checkpoint metadata: " + e.what());
  } catch (const ConfigError& e) {
    throw DataError(path + ": " + e.what());
  }
  Rng rng(0);
  MolecularModel model(
      config,
      AtomVocabulary::FromSymbols(meta.at("atoms").get<std::vector<std::string>>()),
      rng);
  model.params_.LoadJson(doc.at("parameters"));
  return model;
}

Tensor EncodePair(const MolGraph* first, const MolGraph* second,
                  const MolecularModel& model) {
  return model.EncodePairs({{first, second}});
}

}  // namespace molfuse
