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

#include "molfuse/labels.h"

#include <string>

#include "molfuse/errors.h"
#include "molfuse/tokenizer.h"

namespace molfuse {

const char* LabelName(Label label) {
  switch (label) {
    case Label::kMechanism: return "Mechanism";
    case Label::kEffect: return "Effect";
    case Label::kAdvice: return "Advice";
    case Label::kInt: return "Int";
    case Label::kNegative: return "Negative";
  }
  return "Negative";
}

Label ParseLabel(std::string_view text) {
  const std::string t = ToLower(text);
  if (t == "mechanism") return Label::kMechanism;
  if (t == "effect") return Label::kEffect;
  if (t == "advice" || t == "advise") return Label::kAdvice;
  if (t == "int") return Label::kInt;
  if (t == "negative" || t == "false" || t == "none") return Label::kNegative;
  throw DataError("unknown relation label '" + std::string(text) + "'");
}

Label LabelFromIndex(int index) {
  if (index < 0 || index >= kNumLabels) {
    throw DataError("label index " + std::to_string(index) + " out of range");
  }
  return static_cast<Label>(index);
}

}  // namespace molfuse
