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

#ifndef MOLFUSE_METRICS_H_
#define MOLFUSE_METRICS_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "molfuse/labels.h"

namespace molfuse {

struct EvalReport {
  // Micro-averaged over the four interaction types. A prediction of the
  // wrong positive type is both a false positive and a false negative.
  int64_t true_positives = 0;
  int64_t false_positives = 0;
  int64_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  // One-vs-rest F per type, indexed by Label (Negative excluded).
  std::array<double, kNumPositiveLabels> type_f{};
  double accuracy = 0.0;
  // confusion[gold][predicted].
  std::array<std::array<int64_t, kNumLabels>, kNumLabels> confusion{};
  int64_t count = 0;

  nlohmann::ordered_json ToJson() const;
};

// 2PR / (P + R), or 0 when P + R is 0.
double FScore(double precision, double recall);

// Throws std::invalid_argument on a length mismatch.
EvalReport MicroPrf(std::span<const Label> gold, std::span<const Label> predicted);

struct BinaryReport {
  int64_t true_positives = 0;
  int64_t false_positives = 0;
  int64_t false_negatives = 0;
  int64_t true_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  double accuracy = 0.0;

  nlohmann::ordered_json ToJson() const;
};

// Interaction detection: every positive gold type counts as positive.
BinaryReport BinaryDetectionEval(std::span<const Label> gold,
                                 std::span<const bool> predicted_positive);

// Approximate randomization test on the micro F difference. Each round swaps
// the two systems' predictions per instance with probability 1/2; the
// p-value is (rounds at least as extreme + 1) / (rounds + 1).
double RandomizationTest(std::span<const Label> gold,
                         std::span<const Label> system_a,
                         std::span<const Label> system_b, int rounds,
                         uint64_t seed);

}  // namespace molfuse

#endif  // MOLFUSE_METRICS_H_
