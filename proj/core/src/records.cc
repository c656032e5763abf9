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

#include "molfuse/records.h"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "molfuse/errors.h"

namespace molfuse {

namespace {

using nlohmann::ordered_json;

const char kPredictionHeader[] =
    "pair_id\tgold\tpred\tp_mech\tp_eff\tp_adv\tp_int\tp_neg";

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string StripCr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

template <typename T, typename Parse>
std::vector<T> ReadJsonLines(std::istream& in, const char* what, Parse parse) {
  std::vector<T> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(parse(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("{} line {}: {}", what, line_no, e.what()));
    } catch (const DataError& e) {
      throw DataError(fmt::format("{} line {}: {}", what, line_no, e.what()));
    }
  }
  return out;
}

ordered_json OptionalId(const std::optional<std::string>& id) {
  return id ? ordered_json(*id) : ordered_json(nullptr);
}

std::optional<std::string> ReadOptionalId(const nlohmann::json& j,
                                          const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

double ParseDouble(const std::string& text) {
  size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw DataError("not a number: '" + text + "'");
  }
  return value;
}

}  // namespace

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

void WriteInstances(std::ostream& out,
                    const std::vector<MaskedInstance>& items) {
  for (const MaskedInstance& m : items) {
    ordered_json j;
    j["pair_id"] = m.pair_id;
    j["sentence_id"] = m.sentence_id;
    j["tokens"] = m.tokens;
    j["drug1_index"] = m.drug1_index;
    j["drug2_index"] = m.drug2_index;
    j["label"] = LabelName(m.label);
    j["drug1_mention"] = m.drug1_mention;
    j["drug2_mention"] = m.drug2_mention;
    j["drug1_id"] = OptionalId(m.drug1_id);
    j["drug2_id"] = OptionalId(m.drug2_id);
    out << j.dump() << '\n';
  }
}

std::vector<MaskedInstance> ReadInstances(std::istream& in) {
  return ReadJsonLines<MaskedInstance>(in, "instances", [](const nlohmann::json& j) {
    MaskedInstance m;
    m.pair_id = j.at("pair_id").get<std::string>();
    m.sentence_id = j.value("sentence_id", std::string());
    m.tokens = j.at("tokens").get<std::vector<std::string>>();
    m.drug1_index = j.at("drug1_index").get<size_t>();
    m.drug2_index = j.at("drug2_index").get<size_t>();
    if (m.drug1_index >= m.tokens.size() || m.drug2_index >= m.tokens.size()) {
      throw DataError("drug index outside the token list for " + m.pair_id);
    }
    m.label = ParseLabel(j.at("label").get<std::string>());
    m.drug1_mention = j.value("drug1_mention", std::string());
    m.drug2_mention = j.value("drug2_mention", std::string());
    m.drug1_id = ReadOptionalId(j, "drug1_id");
    m.drug2_id = ReadOptionalId(j, "drug2_id");
    return m;
  });
}

void SaveInstances(const std::string& path,
                   const std::vector<MaskedInstance>& items) {
  std::ofstream out = OpenOutput(path);
  WriteInstances(out, items);
}

std::vector<MaskedInstance> LoadInstances(const std::string& path) {
  std::ifstream in = OpenInput(path);
  return ReadInstances(in);
}

void WritePairs(std::ostream& out, const std::vector<PairRecord>& pairs) {
  for (const PairRecord& p : pairs) {
    ordered_json j;
    j["drug1"] = p.drug1;
    j["drug2"] = p.drug2;
    j["label"] = p.positive ? "positive" : "negative";
    j["provenance"] =
        p.provenance == PairProvenance::kDatabase ? "database" : "generated";
    out << j.dump() << '\n';
  }
}

std::vector<PairRecord> ReadPairs(std::istream& in) {
  return ReadJsonLines<PairRecord>(in, "pairs", [](const nlohmann::json& j) {
    PairRecord p;
    p.drug1 = j.at("drug1").get<std::string>();
    p.drug2 = j.at("drug2").get<std::string>();
    const std::string label = j.at("label").get<std::string>();
    if (label != "positive" && label != "negative") {
      throw DataError("pair label must be positive or negative, got " + label);
    }
    p.positive = label == "positive";
    const std::string source = j.value("provenance", std::string("database"));
    if (source != "database" && source != "generated") {
      throw DataError("unknown pair provenance " + source);
    }
    p.provenance = source == "database" ? PairProvenance::kDatabase
                                        : PairProvenance::kGenerated;
    return p;
  });
}

void SavePairs(const std::string& path, const std::vector<PairRecord>& pairs) {
  std::ofstream out = OpenOutput(path);
  WritePairs(out, pairs);
}

std::vector<PairRecord> LoadPairs(const std::string& path) {
  std::ifstream in = OpenInput(path);
  return ReadPairs(in);
}

void WriteVocabulary(std::ostream& out, const Vocabulary& vocab) {
  for (size_t i = 0; i < vocab.tokens().size(); ++i) {
    out << vocab.tokens()[i] << '\t' << i << '\n';
  }
}

Vocabulary ReadVocabulary(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty()) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 2 || fields[1] != std::to_string(tokens.size())) {
      throw DataError(fmt::format("vocabulary line {}: expected token<TAB>{}",
                                  line_no, tokens.size()));
    }
    tokens.push_back(fields[0]);
  }
  if (tokens.empty() || tokens[0] != kUnknownToken) {
    throw DataError("vocabulary must start with the unknown token");
  }
  Vocabulary vocab;
  for (size_t i = 1; i < tokens.size(); ++i) vocab.Add(tokens[i]);
  if (vocab.size() != static_cast<int64_t>(tokens.size())) {
    throw DataError("vocabulary contains duplicate tokens");
  }
  return vocab;
}

void WritePredictions(std::ostream& out,
                      const std::vector<Prediction>& predictions) {
  out << kPredictionHeader << '\n';
  for (const Prediction& p : predictions) {
    out << p.pair_id << '\t' << LabelName(p.gold) << '\t'
        << LabelName(p.predicted);
    for (double v : p.probabilities) out << '\t' << fmt::format("{}", v);
    out << '\n';
  }
}

std::vector<Prediction> ReadPredictions(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kPredictionHeader) {
        throw DataError("predictions: unexpected header '" + line + "'");
      }
      continue;
    }
    const auto fields = SplitTabs(line);
    if (fields.size() != 3 + kNumLabels) {
      throw DataError(fmt::format("predictions line {}: expected {} fields",
                                  line_no, 3 + kNumLabels));
    }
    Prediction p;
    try {
      p.pair_id = fields[0];
      p.gold = ParseLabel(fields[1]);
      p.predicted = ParseLabel(fields[2]);
      for (int k = 0; k < kNumLabels; ++k) {
        p.probabilities[k] = ParseDouble(fields[3 + k]);
      }
    } catch (const DataError& e) {
      throw DataError(fmt::format("predictions line {}: {}", line_no, e.what()));
    }
    out.push_back(std::move(p));
  }
  return out;
}

void SavePredictions(const std::string& path,
                     const std::vector<Prediction>& predictions) {
  std::ofstream out = OpenOutput(path);
  WritePredictions(out, predictions);
}

std::vector<Prediction> LoadPredictions(const std::string& path) {
  std::ifstream in = OpenInput(path);
  return ReadPredictions(in);
}

void WriteBinaryPredictions(std::ostream& out,
                            const std::vector<BinaryPrediction>& predictions) {
  out << kPredictionHeader << '\n';
  for (const BinaryPrediction& p : predictions) {
    const double quarter = p.positive_probability / kNumPositiveLabels;
    out << p.pair_id << '\t' << LabelName(p.gold) << '\t'
        << (p.positive ? "Positive" : "Negative");
    for (int k = 0; k < kNumPositiveLabels; ++k) {
      out << '\t' << fmt::format("{}", quarter);
    }
    out << '\t' << fmt::format("{}", 1.0 - p.positive_probability) << '\n';
  }
}

}  // namespace molfuse
