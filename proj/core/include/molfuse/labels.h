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

#ifndef MOLFUSE_LABELS_H_
#define MOLFUSE_LABELS_H_

#include <array>
#include <string>
#include <string_view>

namespace molfuse {

// Text relation classes. The order fixes the softmax output layout and the
// probability columns of prediction files.
enum class Label {
  kMechanism = 0,
  kEffect = 1,
  kAdvice = 2,
  kInt = 3,
  kNegative = 4,
};

inline constexpr int kNumLabels = 5;
inline constexpr int kNumPositiveLabels = 4;
inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::kMechanism, Label::kEffect, Label::kAdvice, Label::kInt,
    Label::kNegative};

inline bool IsPositive(Label label) { return label != Label::kNegative; }
inline int LabelIndex(Label label) { return static_cast<int>(label); }

// "Mechanism", "Effect", "Advice", "Int", "Negative".
const char* LabelName(Label label);

// Case-insensitive. Accepts the class names above plus the corpus spelling
// "advise" and "false"/"none" for Negative. Throws DataError otherwise.
Label ParseLabel(std::string_view text);

Label LabelFromIndex(int index);

}  // namespace molfuse

#endif  // MOLFUSE_LABELS_H_
