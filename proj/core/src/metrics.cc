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

#include "molfuse/metrics.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "molfuse/rng.h"

namespace molfuse {

namespace {

double Ratio(int64_t num, int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void RequireAligned(size_t a, size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(a) +
                                " gold labels but " + std::to_string(b) +
                                " predictions");
  }
}

// Contribution of one (gold, predicted) pair to the micro counts.
struct Counts {
  int64_t tp = 0, fp = 0, fn = 0;
};

Counts Contribution(Label gold, Label predicted) {
  Counts c;
  if (IsPositive(predicted)) {
    if (predicted == gold) {
      c.tp = 1;
    } else {
      c.fp = 1;
    }
  }
  if (IsPositive(gold) && predicted != gold) c.fn = 1;
  return c;
}

double MicroF(const Counts& c) {
  return FScore(Ratio(c.tp, c.tp + c.fp), Ratio(c.tp, c.tp + c.fn));
}

}  // namespace

double FScore(double precision, double recall) {
  const double total = precision + recall;
  return total > 0.0 ? 2.0 * precision * recall / total : 0.0;
}

EvalReport MicroPrf(std::span<const Label> gold,
                    std::span<const Label> predicted) {
  RequireAligned(gold.size(), predicted.size(), "MicroPrf");
  EvalReport r;
  r.count = static_cast<int64_t>(gold.size());
  int64_t correct = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    ++r.confusion[LabelIndex(gold[i])][LabelIndex(predicted[i])];
    const Counts c = Contribution(gold[i], predicted[i]);
    r.true_positives += c.tp;
    r.false_positives += c.fp;
    r.false_negatives += c.fn;
    if (gold[i] == predicted[i]) ++correct;
  }
  r.precision = Ratio(r.true_positives, r.true_positives + r.false_positives);
  r.recall = Ratio(r.true_positives, r.true_positives + r.false_negatives);
  r.f_score = FScore(r.precision, r.recall);
  r.accuracy = Ratio(correct, r.count);
  for (int t = 0; t < kNumPositiveLabels; ++t) {
    int64_t tp = r.confusion[t][t], fp = 0, fn = 0;
    for (int o = 0; o < kNumLabels; ++o) {
      if (o == t) continue;
      fp += r.confusion[o][t];
      fn += r.confusion[t][o];
    }
    r.type_f[t] = FScore(Ratio(tp, tp + fp), Ratio(tp, tp + fn));
  }
  return r;
}

nlohmann::ordered_json EvalReport::ToJson() const {
  nlohmann::ordered_json out;
  out["instances"] = count;
  out["precision"] = precision;
  out["recall"] = recall;
  out["f"] = f_score;
  out["accuracy"] = accuracy;
  out["true_positives"] = true_positives;
  out["false_positives"] = false_positives;
  out["false_negatives"] = false_negatives;
  nlohmann::ordered_json per_type;
  for (int t = 0; t < kNumPositiveLabels; ++t) {
    per_type[LabelName(LabelFromIndex(t))] = type_f[t];
  }
  out["type_f"] = per_type;
  nlohmann::ordered_json matrix;
  for (int g = 0; g < kNumLabels; ++g) {
    nlohmann::ordered_json row;
    for (int p = 0; p < kNumLabels; ++p) {
      row[LabelName(LabelFromIndex(p))] = confusion[g][p];
    }
    matrix[LabelName(LabelFromIndex(g))] = row;
  }
  out["confusion"] = matrix;
  return out;
}

BinaryReport BinaryDetectionEval(std::span<const Label> gold,
                                 std::span<const bool> predicted_positive) {
  RequireAligned(gold.size(), predicted_positive.size(), "BinaryDetectionEval");
  BinaryReport r;
  for (size_t i = 0; i < gold.size(); ++i) {
    const bool g = IsPositive(gold[i]);
    const bool p = predicted_positive[i];
    if (g && p) ++r.true_positives;
    if (!g && p) ++r.false_positives;
    if (g && !p) ++r.false_negatives;
    if (!g && !p) ++r.true_negatives;
  }
  r.precision = Ratio(r.true_positives, r.true_positives + r.false_positives);
  r.recall = Ratio(r.true_positives, r.true_positives + r.false_negatives);
  r.f_score = FScore(r.precision, r.recall);
  r.accuracy = Ratio(r.true_positives + r.true_negatives,
                     static_cast<int64_t>(gold.size()));
  return r;
}

nlohmann::ordered_json BinaryReport::ToJson() const {
  nlohmann::ordered_json out;
  out["instances"] =
      true_positives + false_positives + false_negatives + true_negatives;
  out["precision"] = precision;
  out["recall"] = recall;
  out["f"] = f_score;
  out["accuracy"] = accuracy;
  out["true_positives"] = true_positives;
  out["false_positives"] = false_positives;
  out["false_negatives"] = false_negatives;
  out["true_negatives"] = true_negatives;
  return out;
}

double RandomizationTest(std::span<const Label> gold,
                         std::span<const Label> system_a,
                         std::span<const Label> system_b, int rounds,
                         uint64_t seed) {
  RequireAligned(gold.size(), system_a.size(), "RandomizationTest");
  RequireAligned(gold.size(), system_b.size(), "RandomizationTest");
  if (rounds < 1) throw std::invalid_argument("RandomizationTest: rounds < 1");

  const size_t n = gold.size();
  std::vector<Counts> ca(n), cb(n);
  Counts total_a, total_b;
  for (size_t i = 0; i < n; ++i) {
    ca[i] = Contribution(gold[i], system_a[i]);
    cb[i] = Contribution(gold[i], system_b[i]);
    total_a.tp += ca[i].tp; total_a.fp += ca[i].fp; total_a.fn += ca[i].fn;
    total_b.tp += cb[i].tp; total_b.fp += cb[i].fp; total_b.fn += cb[i].fn;
  }
  const double observed = std::abs(MicroF(total_a) - MicroF(total_b));

  Rng rng(seed);
  int64_t extreme = 0;
  for (int round = 0; round < rounds; ++round) {
    Counts a = total_a, b = total_b;
    for (size_t i = 0; i < n; ++i) {
      if (!rng.Coin()) continue;
      const int64_t dtp = cb[i].tp - ca[i].tp;
      const int64_t dfp = cb[i].fp - ca[i].fp;
      const int64_t dfn = cb[i].fn - ca[i].fn;
      a.tp += dtp; a.fp += dfp; a.fn += dfn;
      b.tp -= dtp; b.fp -= dfp; b.fn -= dfn;
    }
    if (std::abs(MicroF(a) - MicroF(b)) >= observed) ++extreme;
  }
  return static_cast<double>(extreme + 1) / static_cast<double>(rounds + 1);
}

}  // namespace molfuse
