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

#ifndef MOLFUSE_TOKENIZER_H_
#define MOLFUSE_TOKENIZER_H_

#include <string>
#include <string_view>
#include <vector>

namespace molfuse {

// Lowercases and splits on whitespace. Runs of letters and digits form one
// token; every other printable byte is a token on its own. Bytes >= 0x80 are
// treated as word characters so UTF-8 sequences stay intact.
std::vector<std::string> Tokenize(std::string_view text);

std::string ToLower(std::string_view text);

}  // namespace molfuse

#endif  // MOLFUSE_TOKENIZER_H_
