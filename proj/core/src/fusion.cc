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

#include "molfuse/fusion.h"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "molfuse/adam.h"
#include "molfuse/corpus.h"
#include "molfuse/errors.h"
#include "molfuse/rng.h"

namespace molfuse {

namespace {

// Shuffling draws from its own stream so that changing the model size does
// not change the batch order.
constexpr uint64_t kShuffleStream = 0x9e3779b97f4a7c15ull;

int ArgMax(std::span<const double> row) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(row.size()); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

void CheckFinite(double loss, const char* stage, int epoch, size_t batch) {
  if (!std::isfinite(loss)) {
    throw std::runtime_error(fmt::format(
        "{}: non-finite loss {} at epoch {} batch {}", stage, loss, epoch, batch));
  }
}

std::vector<std::vector<size_t>> Batches(size_t count, int batch_size,
                                         Rng* shuffle) {
  std::vector<size_t> order(count);
  std::iota(order.begin(), order.end(), size_t{0});
  if (shuffle) shuffle->Shuffle(order);
  std::vector<std::vector<size_t>> out;
  for (size_t start = 0; start < count; start += batch_size) {
    const size_t end = std::min(count, start + static_cast<size_t>(batch_size));
    out.emplace_back(order.begin() + start, order.begin() + end);
  }
  return out;
}

EpochRecord MolRecord(int epoch, const std::string& split, double loss,
                      const BinaryReport& r) {
  return {epoch, split, loss, r.precision, r.recall, r.f_score, r.accuracy};
}

EpochRecord TextRecord(int epoch, const std::string& split, double loss,
                       const EvalReport& r) {
  return {epoch, split, loss, r.precision, r.recall, r.f_score, r.accuracy};
}

std::span<const bool> AsBools(const std::vector<uint8_t>& flags) {
  static_assert(sizeof(bool) == sizeof(uint8_t));
  return {reinterpret_cast<const bool*>(flags.data()), flags.size()};
}

std::vector<std::pair<const MolGraph*, const MolGraph*>> GraphPairs(
    const std::vector<MolPairExample>& pairs, const std::vector<size_t>& idx) {
  std::vector<std::pair<const MolGraph*, const MolGraph*>> out;
  out.reserve(idx.size());
  for (size_t i : idx) out.emplace_back(pairs[i].first, pairs[i].second);
  return out;
}

}  // namespace

void WriteTrainingLog(std::ostream& out, const TrainingLog& log) {
  out << "epoch\tsplit\tloss\tP\tR\tF\taccuracy\n";
  for (const EpochRecord& r : log) {
    out << fmt::format("{}\t{}\t{:.6f}\t{:.6f}\t{:.6f}\t{:.6f}\t{:.6f}\n",
                       r.epoch, r.split, r.loss, r.precision, r.recall,
                       r.f_score, r.accuracy);
  }
}

MolEvaluation EvaluateMolecular(const MolecularModel& model,
                                const std::vector<MolPairExample>& pairs,
                                int batch_size) {
  NoGradGuard no_grad;
  MolEvaluation eval;
  std::vector<Label> gold;
  std::vector<uint8_t> predicted;
  double loss_sum = 0.0;
  for (const auto& idx : Batches(pairs.size(), batch_size, nullptr)) {
    const Tensor probs = model.Classify(model.EncodePairs(GraphPairs(pairs, idx)));
    std::vector<int64_t> labels;
    for (size_t i : idx) labels.push_back(pairs[i].positive ? 1 : 0);
    loss_sum += CrossEntropy(probs, labels).item() * idx.size();
    for (size_t r = 0; r < idx.size(); ++r) {
      gold.push_back(pairs[idx[r]].positive ? Label::kInt : Label::kNegative);
      predicted.push_back(ArgMax(probs.data().subspan(2 * r, 2)) == 1);
    }
  }
  eval.report = BinaryDetectionEval(gold, AsBools(predicted));
  eval.loss = pairs.empty() ? 0.0 : loss_sum / static_cast<double>(pairs.size());
  return eval;
}

MolTrainResult TrainMolecular(const std::vector<MolPairExample>& train,
                              const std::vector<MolPairExample>& heldout,
                              const AtomVocabulary& vocab,
                              const ExperimentConfig& config,
                              std::ostream* diagnostics) {
  config.Validate();
  if (train.empty()) throw DataError("molecular training set is empty");
  const size_t positives = std::count_if(
      train.begin(), train.end(), [](const MolPairExample& p) { return p.positive; });
  if ((positives == 0 || positives == train.size()) && diagnostics) {
    *diagnostics << "warning: molecular training set has a single class\n";
  }
  for (const MolPairExample& p : train) {
    if (!p.first || !p.second) {
      throw DataError("molecular training pairs need both graphs");
    }
  }

  Rng init_rng(config.seed);
  MolTrainResult result{MolecularModel(config.MolConfig(), vocab, init_rng), {}};
  MolecularModel& model = result.model;
  Adam adam(model.params(),
            AdamOptions{.learning_rate = config.mol_learning_rate,
                        .l2 = config.mol_l2});
  Rng shuffle(config.seed ^ kShuffleStream);

  for (int epoch = 1; epoch <= config.mol_epochs; ++epoch) {
    double loss_sum = 0.0;
    std::vector<Label> gold;
    std::vector<uint8_t> predicted;
    size_t batch_no = 0;
    for (const auto& idx : Batches(train.size(), config.mol_batch_size, &shuffle)) {
      const Tensor probs =
          model.Classify(model.EncodePairs(GraphPairs(train, idx), true));
      std::vector<int64_t> labels;
      for (size_t i : idx) labels.push_back(train[i].positive ? 1 : 0);
      const Tensor loss = CrossEntropy(probs, labels);
      CheckFinite(loss.item(), "TrainMolecular", epoch, batch_no++);
      loss.Backward();
      adam.Step(model.params());
      loss_sum += loss.item() * idx.size();
      for (size_t r = 0; r < idx.size(); ++r) {
        gold.push_back(train[idx[r]].positive ? Label::kInt : Label::kNegative);
        predicted.push_back(ArgMax(probs.data().subspan(2 * r, 2)) == 1);
      }
    }
    result.log.push_back(MolRecord(epoch, "train", loss_sum / train.size(),
                                   BinaryDetectionEval(gold, AsBools(predicted))));
    if (!heldout.empty()) {
      const MolEvaluation eval = EvaluateMolecular(model, heldout);
      result.log.push_back(MolRecord(epoch, "heldout", eval.loss, eval.report));
    }
  }
  return result;
}

std::vector<double> NormalizeL2(std::span<const double> x) {
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  std::vector<double> out(x.begin(), x.end());
  if (norm > 0.0) {
    for (double& v : out) v /= norm;
  }
  return out;
}

std::vector<double> FusedMoleculeInput(std::span<const double> first,
                                       std::span<const double> second) {
  std::vector<double> out = NormalizeL2(first);
  const std::vector<double> tail = NormalizeL2(second);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

MoleculeFeatures MoleculeFeatures::Compute(
    const MolecularModel& model, const std::map<std::string, MolGraph>& graphs) {
  NoGradGuard no_grad;
  MoleculeFeatures features(model.config().dim);
  std::vector<std::string> ids;
  std::vector<const MolGraph*> list;
  for (const auto& [id, graph] : graphs) {
    if (graph.empty()) continue;
    ids.push_back(id);
    list.push_back(&graph);
  }
  constexpr size_t kChunk = 256;
  for (size_t start = 0; start < list.size(); start += kChunk) {
    const size_t end = std::min(list.size(), start + kChunk);
    const Tensor encoded = model.EncodeGraphs(
        std::vector<const MolGraph*>(list.begin() + start, list.begin() + end));
    const int64_t d = encoded.cols();
    for (size_t i = start; i < end; ++i) {
      const auto row = encoded.data().subspan((i - start) * d, d);
      features.Set(ids[i], std::vector<double>(row.begin(), row.end()));
    }
  }
  return features;
}

void MoleculeFeatures::Set(const std::string& drug_id,
                           std::vector<double> vector) {
  if (static_cast<int>(vector.size()) != dim_) {
    throw ShapeError("MoleculeFeatures: vector of size " +
                     std::to_string(vector.size()) + " for dim " +
                     std::to_string(dim_));
  }
  vectors_[drug_id] = std::move(vector);
}

std::vector<double> MoleculeFeatures::PairInput(
    const std::optional<std::string>& first,
    const std::optional<std::string>& second) const {
  const std::vector<double> zero(dim_, 0.0);
  auto lookup = [&](const std::optional<std::string>& id)
      -> const std::vector<double>& {
    if (!id) return zero;
    auto it = vectors_.find(*id);
    return it == vectors_.end() ? zero : it->second;
  };
  return FusedMoleculeInput(lookup(first), lookup(second));
}

Tensor MoleculeFeatures::BatchInput(
    const std::vector<const TextInstance*>& batch) const {
  std::vector<double> data;
  data.reserve(batch.size() * 2 * dim_);
  for (const TextInstance* inst : batch) {
    const std::vector<double> row = PairInput(inst->drug1_id, inst->drug2_id);
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor::FromData(
      {static_cast<int64_t>(batch.size()), 2 * static_cast<int64_t>(dim_)},
      std::move(data));
}

namespace {

Tensor MoleculeBlock(const TextModel& model, const MoleculeFeatures* molecules,
                     const std::vector<const TextInstance*>& batch) {
  if (model.config().molecule_dim == 0) return Tensor();
  return molecules->BatchInput(batch);
}

void CheckMoleculeInputs(const TextModel& model,
                         const MoleculeFeatures* molecules) {
  const int needed = model.config().molecule_dim;
  if (needed == 0) return;
  if (!molecules) {
    throw DataError("model expects molecule vectors but none were provided");
  }
  if (2 * molecules->dim() != needed) {
    throw ShapeError("molecule vectors give " +
                     std::to_string(2 * molecules->dim()) +
                     " features but the classifier expects " +
                     std::to_string(needed));
  }
}

// Classifier inputs for instances, computed without gradient tracking.
Tensor FeatureRows(const std::vector<const TextInstance*>& instances,
                   const TextModel& model, const MoleculeFeatures* molecules) {
  NoGradGuard no_grad;
  return model.Features(instances, MoleculeBlock(model, molecules, instances));
}

EvalReport Score(const std::vector<const TextInstance*>& instances,
                 const Tensor& probs, double* loss) {
  std::vector<Label> gold, predicted;
  std::vector<int64_t> labels;
  for (size_t r = 0; r < instances.size(); ++r) {
    gold.push_back(instances[r]->label);
    labels.push_back(LabelIndex(instances[r]->label));
    predicted.push_back(
        LabelFromIndex(ArgMax(probs.data().subspan(r * kNumLabels, kNumLabels))));
  }
  if (loss) *loss = instances.empty() ? 0.0 : CrossEntropy(probs, labels).item();
  return MicroPrf(gold, predicted);
}

}  // namespace

TextTrainResult TrainText(const std::vector<TextInstance>& instances,
                          TextModel initial, const MoleculeFeatures* molecules,
                          const ExperimentConfig& config,
                          const MolecularModel* frozen,
                          std::ostream* diagnostics) {
  config.Validate();
  CheckMoleculeInputs(initial, molecules);
  if (instances.empty()) throw DataError("text training set is empty");

  std::vector<const TextInstance*> train, heldout;
  for (const TextInstance& inst : instances) {
    if (config.UsesHeldOut() && InHeldOutSplit(inst.pair_id)) {
      heldout.push_back(&inst);
    } else {
      train.push_back(&inst);
    }
  }
  if (train.empty()) throw DataError("no training instances outside the held-out split");
  if (config.UsesHeldOut() && heldout.empty() && diagnostics) {
    *diagnostics << "warning: held-out split is empty; bias sweep and "
                    "checkpoint selection are skipped\n";
  }

  TextTrainResult result{std::move(initial), {}};
  TextModel& model = result.model;
  std::optional<ParameterSet> frozen_snapshot;
  if (frozen) frozen_snapshot = frozen->params().Clone();

  Adam adam(model.params(),
            AdamOptions{.learning_rate = config.text_learning_rate,
                        .l2 = config.text_l2});
  Rng shuffle(config.seed ^ kShuffleStream);
  std::optional<TextModel> best;
  double best_f = -1.0;

  for (int epoch = 1; epoch <= config.text_epochs; ++epoch) {
    double loss_sum = 0.0;
    std::vector<Label> gold, predicted;
    size_t batch_no = 0;
    for (const auto& idx : Batches(train.size(), config.text_batch_size, &shuffle)) {
      std::vector<const TextInstance*> batch;
      std::vector<int64_t> labels;
      for (size_t i : idx) {
        batch.push_back(train[i]);
        labels.push_back(LabelIndex(train[i]->label));
      }
      const Tensor probs =
          model.Forward(batch, MoleculeBlock(model, molecules, batch));
      const Tensor loss = CrossEntropy(probs, labels);
      CheckFinite(loss.item(), "TrainText", epoch, batch_no++);
      loss.Backward();
      adam.Step(model.params());
      loss_sum += loss.item() * batch.size();
      for (size_t r = 0; r < batch.size(); ++r) {
        gold.push_back(batch[r]->label);
        predicted.push_back(LabelFromIndex(
            ArgMax(probs.data().subspan(r * kNumLabels, kNumLabels))));
      }
    }
    result.log.push_back(TextRecord(epoch, "train", loss_sum / train.size(),
                                    MicroPrf(gold, predicted)));
    if (!heldout.empty()) {
      double loss = 0.0;
      const Tensor probs = TextClassify(FeatureRows(heldout, model, molecules),
                                        model.weights(), model.negative_offset());
      const EvalReport report = Score(heldout, probs, &loss);
      result.log.push_back(TextRecord(epoch, "heldout", loss, report));
      if (config.select_best_checkpoint && report.f_score > best_f) {
        best_f = report.f_score;
        best = model.Clone();
      }
    }
    if (frozen && !frozen->params().ValuesEqual(*frozen_snapshot)) {
      throw std::logic_error("frozen molecular parameters changed during "
                             "text training");
    }
  }
  if (best) model = std::move(*best);

  if (!config.negative_bias_grid.empty() && !heldout.empty()) {
    NoGradGuard no_grad;
    const Tensor features = FeatureRows(heldout, model, molecules);
    double best_offset = 0.0, best_grid_f = -1.0;
    for (double offset : config.negative_bias_grid) {
      const EvalReport report =
          Score(heldout, TextClassify(features, model.weights(), offset), nullptr);
      if (report.f_score > best_grid_f) {
        best_grid_f = report.f_score;
        best_offset = offset;
      }
    }
    model.set_negative_offset(best_offset);
  }
  return result;
}

std::vector<Prediction> PredictText(const std::vector<TextInstance>& instances,
                                    const TextModel& model,
                                    const MoleculeFeatures* molecules,
                                    int batch_size) {
  CheckMoleculeInputs(model, molecules);
  NoGradGuard no_grad;
  std::vector<Prediction> out;
  out.reserve(instances.size());
  for (const auto& idx : Batches(instances.size(), batch_size, nullptr)) {
    std::vector<const TextInstance*> batch;
    for (size_t i : idx) batch.push_back(&instances[i]);
    const Tensor probs = model.Forward(batch, MoleculeBlock(model, molecules, batch));
    for (size_t r = 0; r < batch.size(); ++r) {
      Prediction p;
      p.pair_id = batch[r]->pair_id;
      p.gold = batch[r]->label;
      const auto row = probs.data().subspan(r * kNumLabels, kNumLabels);
      std::copy(row.begin(), row.end(), p.probabilities.begin());
      p.predicted = LabelFromIndex(ArgMax(row));
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<BinaryPrediction> PredictBinary(
    const std::vector<TextInstance>& instances, const MolecularModel& model,
    const std::map<std::string, MolGraph>& graphs, int batch_size) {
  NoGradGuard no_grad;
  auto graph_of = [&](const std::optional<std::string>& id) -> const MolGraph* {
    if (!id) return nullptr;
    auto it = graphs.find(*id);
    return it == graphs.end() || it->second.empty() ? nullptr : &it->second;
  };
  std::vector<BinaryPrediction> out;
  out.reserve(instances.size());
  for (const auto& idx : Batches(instances.size(), batch_size, nullptr)) {
    std::vector<std::pair<const MolGraph*, const MolGraph*>> pairs;
    for (size_t i : idx) {
      pairs.emplace_back(graph_of(instances[i].drug1_id),
                         graph_of(instances[i].drug2_id));
    }
    const Tensor probs = model.Classify(model.EncodePairs(pairs));
    for (size_t r = 0; r < idx.size(); ++r) {
      BinaryPrediction p;
      p.pair_id = instances[idx[r]].pair_id;
      p.gold = instances[idx[r]].label;
      p.positive_probability = probs.at(static_cast<int64_t>(r), 1);
      p.positive = ArgMax(probs.data().subspan(2 * r, 2)) == 1;
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace molfuse
