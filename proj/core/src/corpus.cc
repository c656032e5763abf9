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

#include "molfuse/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "molfuse/errors.h"
#include "molfuse/rng.h"
#include "molfuse/tokenizer.h"

namespace molfuse {

namespace pt = boost::property_tree;

namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> Split(std::string_view text, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t at = text.find(sep, start);
    out.emplace_back(text.substr(start, at == std::string_view::npos
                                            ? std::string_view::npos
                                            : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

std::string Trim(std::string_view text) {
  size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

// Byte offset of every code point, plus the total length at the end.
std::vector<size_t> CodePointOffsets(std::string_view text) {
  std::vector<size_t> offsets;
  for (size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      offsets.push_back(i);
    }
  }
  offsets.push_back(text.size());
  return offsets;
}

std::string Attr(const pt::ptree& node, const std::string& name,
                 const std::string& context) {
  auto value = node.get_optional<std::string>("<xmlattr>." + name);
  if (!value) throw DataError(context + ": missing attribute '" + name + "'");
  return *value;
}

// "12-20" or "12-20;25-30" (inclusive) -> byte range.
std::pair<size_t, size_t> ParseOffsets(const std::string& spec,
                                       const std::vector<size_t>& code_points,
                                       const std::string& context) {
  size_t lo = SIZE_MAX, hi = 0;
  for (const std::string& part : Split(spec, ';')) {
    const size_t dash = part.find('-');
    size_t b, e;
    try {
      if (dash == std::string::npos) throw std::invalid_argument("no dash");
      b = std::stoul(part.substr(0, dash));
      e = std::stoul(part.substr(dash + 1));
    } catch (const std::exception&) {
      throw DataError(context + ": bad charOffset '" + spec + "'");
    }
    if (b > e || e + 1 >= code_points.size()) {
      throw DataError(context + ": charOffset '" + spec +
                      "' outside the sentence");
    }
    lo = std::min(lo, code_points[b]);
    hi = std::max(hi, code_points[e + 1]);
  }
  return {lo, hi};
}

bool Overlaps(const Entity& a, const Entity& b) {
  return a.begin < b.end && b.begin < a.end;
}

}  // namespace

const Entity* Sentence::FindEntity(std::string_view entity_id) const {
  for (const Entity& e : entities) {
    if (e.id == entity_id) return &e;
  }
  return nullptr;
}

std::vector<Sentence> ParseDdiXml(std::string_view xml,
                                  const std::string& source) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw DataError(source + ": malformed XML: " + e.what());
  }
  auto document = tree.get_child_optional("document");
  if (!document) throw DataError(source + ": no <document> root element");

  std::vector<Sentence> sentences;
  for (const auto& [tag, node] : *document) {
    if (tag != "sentence") continue;
    Sentence sentence;
    sentence.id = Attr(node, "id", source + ": sentence");
    sentence.text = Attr(node, "text", source + ": sentence " + sentence.id);
    const std::string context = source + ": sentence " + sentence.id;
    const std::vector<size_t> code_points = CodePointOffsets(sentence.text);
    for (const auto& [child_tag, child] : node) {
      if (child_tag == "entity") {
        Entity e;
        e.id = Attr(child, "id", context);
        e.text = child.get<std::string>("<xmlattr>.text", "");
        e.type = child.get<std::string>("<xmlattr>.type", "");
        std::tie(e.begin, e.end) =
            ParseOffsets(Attr(child, "charOffset", context + " entity " + e.id),
                         code_points, context + " entity " + e.id);
        sentence.entities.push_back(std::move(e));
      } else if (child_tag == "pair") {
        CandidatePair p;
        p.id = Attr(child, "id", context);
        p.entity1 = Attr(child, "e1", context + " pair " + p.id);
        p.entity2 = Attr(child, "e2", context + " pair " + p.id);
        const std::string ddi = ToLower(Attr(child, "ddi", context + " pair " + p.id));
        if (ddi == "true") {
          auto type = child.get_optional<std::string>("<xmlattr>.type");
          if (!type) {
            throw DataError(context + " pair " + p.id +
                            ": positive pair without a type");
          }
          p.label = ParseLabel(*type);
          if (p.label == Label::kNegative) {
            throw DataError(context + " pair " + p.id +
                            ": ddi=\"true\" with a negative type");
          }
        } else if (ddi == "false") {
          p.label = Label::kNegative;
        } else {
          throw DataError(context + " pair " + p.id + ": ddi must be true or false");
        }
        sentence.pairs.push_back(std::move(p));
      }
    }
    for (const CandidatePair& p : sentence.pairs) {
      for (const std::string& ref : {p.entity1, p.entity2}) {
        if (!sentence.FindEntity(ref)) {
          throw DataError(context + " pair " + p.id +
                          " references unknown entity " + ref);
        }
      }
    }
    sentences.push_back(std::move(sentence));
  }
  return sentences;
}

std::vector<Sentence> LoadDdiCorpus(const std::string& path) {
  return ParseDdiXml(ReadFile(path), path);
}

std::optional<MaskedInstance> MaskPair(const Sentence& sentence,
                                       const CandidatePair& pair,
                                       std::string* warning) {
  const Entity* a = sentence.FindEntity(pair.entity1);
  const Entity* b = sentence.FindEntity(pair.entity2);
  if (!a || !b) {
    throw DataError("pair " + pair.id + " references an unknown entity");
  }
  if (a == b || Overlaps(*a, *b)) {
    if (warning) {
      *warning = "pair " + pair.id + ": target mentions overlap; skipped";
    }
    return std::nullopt;
  }
  if (std::tie(b->begin, b->end) < std::tie(a->begin, a->end)) std::swap(a, b);

  struct Span {
    const Entity* entity;
    const char* token;
  };
  std::vector<Span> spans = {{a, kDrug1Token}, {b, kDrug2Token}};
  std::vector<const Entity*> others;
  for (const Entity& e : sentence.entities) {
    if (&e == a || &e == b) continue;
    others.push_back(&e);
  }
  std::sort(others.begin(), others.end(), [](const Entity* x, const Entity* y) {
    return std::tie(x->begin, y->end) < std::tie(y->begin, x->end);
  });
  for (const Entity* e : others) {
    bool clash = false;
    for (const Span& s : spans) clash = clash || Overlaps(*e, *s.entity);
    if (!clash) spans.push_back({e, kDrugOtherToken});
  }
  std::sort(spans.begin(), spans.end(), [](const Span& x, const Span& y) {
    return x.entity->begin < y.entity->begin;
  });

  MaskedInstance inst;
  inst.pair_id = pair.id;
  inst.sentence_id = sentence.id;
  inst.label = pair.label;
  inst.drug1_mention = a->text;
  inst.drug2_mention = b->text;
  const std::string_view text = sentence.text;
  size_t cursor = 0;
  for (const Span& s : spans) {
    for (std::string& t : Tokenize(text.substr(cursor, s.entity->begin - cursor))) {
      inst.tokens.push_back(std::move(t));
    }
    if (s.entity == a) inst.drug1_index = inst.tokens.size();
    if (s.entity == b) inst.drug2_index = inst.tokens.size();
    inst.tokens.emplace_back(s.token);
    cursor = s.entity->end;
  }
  for (std::string& t : Tokenize(text.substr(cursor))) {
    inst.tokens.push_back(std::move(t));
  }
  return inst;
}

std::vector<DrugEntry> ParseDrugTable(std::string_view text,
                                      const std::string& source) {
  std::vector<DrugEntry> entries;
  std::set<std::string> ids;
  size_t line_no = 0;
  for (const std::string& raw : Split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = Split(line, '\t');
    const std::string where = source + ":" + std::to_string(line_no);
    if (entries.empty() && ToLower(Trim(fields[0])) == "id") continue;
    if (fields.size() < 2 || fields.size() > 4) {
      throw DataError(where + ": expected 2 to 4 tab-separated fields");
    }
    DrugEntry entry;
    entry.id = Trim(fields[0]);
    entry.name = Trim(fields[1]);
    if (entry.id.empty() || entry.name.empty()) {
      throw DataError(where + ": drug id and name must be non-empty");
    }
    if (!ids.insert(entry.id).second) {
      throw DataError(where + ": duplicate drug id " + entry.id);
    }
    if (fields.size() > 2) {
      for (const std::string& s : Split(fields[2], ';')) {
        std::string name = Trim(s);
        if (!name.empty()) entry.synonyms.push_back(std::move(name));
      }
    }
    if (fields.size() > 3 && !Trim(fields[3]).empty()) {
      entry.smiles = Trim(fields[3]);
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<DrugEntry> LoadDrugTable(const std::string& path) {
  return ParseDrugTable(ReadFile(path), path);
}

size_t LongestCommonSubstring(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  size_t best = 0;
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

EntityLinker::EntityLinker(const std::vector<DrugEntry>& entries,
                           size_t min_overlap)
    : min_overlap_(min_overlap) {
  for (const DrugEntry& e : entries) {
    Names names{e.id, {ToLower(e.name)}};
    for (const std::string& s : e.synonyms) names.names.push_back(ToLower(s));
    for (const std::string& n : names.names) {
      auto it = exact_.find(n);
      if (it == exact_.end() || e.id < it->second) exact_[n] = e.id;
    }
    entries_.push_back(std::move(names));
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const Names& x, const Names& y) { return x.id < y.id; });
}

std::optional<std::string> EntityLinker::Link(std::string_view mention) const {
  const std::string key = ToLower(Trim(mention));
  if (key.empty()) return std::nullopt;
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  std::optional<std::string> result;
  if (auto it = exact_.find(key); it != exact_.end()) {
    result = it->second;
  } else {
    size_t best = 0;
    for (const Names& entry : entries_) {
      size_t overlap = 0;
      for (const std::string& n : entry.names) {
        overlap = std::max(overlap, LongestCommonSubstring(key, n));
      }
      // Strictly greater keeps the smallest id on ties.
      if (overlap > best) {
        best = overlap;
        result = entry.id;
      }
    }
    if (best < min_overlap_) result.reset();
  }
  cache_[key] = result;
  return result;
}

std::optional<std::string> LinkEntity(std::string_view mention,
                                      const std::vector<DrugEntry>& entries) {
  return EntityLinker(entries).Link(mention);
}

std::pair<std::string, std::string> UnorderedKey(const std::string& a,
                                                 const std::string& b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

std::vector<PairRecord> GenerateNegativePairs(
    const std::vector<PairRecord>& positives,
    const std::vector<std::string>& universe, size_t n,
    const std::set<std::pair<std::string, std::string>>& exclusions,
    uint64_t seed) {
  std::vector<std::string> ids(universe.begin(), universe.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const std::set<std::string> members(ids.begin(), ids.end());

  std::set<std::pair<std::string, std::string>> blocked;
  auto block = [&](const std::string& x, const std::string& y) {
    if (x != y && members.count(x) && members.count(y)) {
      blocked.insert(UnorderedKey(x, y));
    }
  };
  for (const PairRecord& p : positives) block(p.drug1, p.drug2);
  for (const auto& [x, y] : exclusions) block(x, y);

  const size_t total = ids.size() < 2 ? 0 : ids.size() * (ids.size() - 1) / 2;
  const size_t feasible = total - blocked.size();
  if (n > feasible) {
    throw DataError("cannot generate " + std::to_string(n) +
                    " negative pairs; at most " + std::to_string(feasible) +
                    " are available");
  }

  Rng rng(seed);
  std::vector<PairRecord> out;
  out.reserve(n);
  auto emit = [&](const std::pair<std::string, std::string>& key) {
    out.push_back({key.first, key.second, false, PairProvenance::kGenerated});
  };
  if (2 * n <= feasible) {
    // Sparse request: rejection sampling.
    std::set<std::pair<std::string, std::string>> taken;
    while (out.size() < n) {
      const size_t i = rng.UniformInt(ids.size());
      const size_t j = rng.UniformInt(ids.size());
      if (i == j) continue;
      auto key = UnorderedKey(ids[i], ids[j]);
      if (blocked.count(key) || !taken.insert(key).second) continue;
      emit(key);
    }
  } else {
    std::vector<std::pair<std::string, std::string>> candidates;
    candidates.reserve(feasible);
    for (size_t i = 0; i < ids.size(); ++i) {
      for (size_t j = i + 1; j < ids.size(); ++j) {
        std::pair<std::string, std::string> key{ids[i], ids[j]};
        if (!blocked.count(key)) candidates.push_back(std::move(key));
      }
    }
    rng.Shuffle(candidates);
    for (size_t k = 0; k < n; ++k) emit(candidates[k]);
  }
  return out;
}

PairSplit SplitPairs(const std::vector<PairRecord>& records,
                     double train_fraction, uint64_t seed) {
  PairSplit split;
  Rng rng(seed);
  for (bool label : {true, false}) {
    std::vector<PairRecord> group;
    for (const PairRecord& r : records) {
      if (r.positive == label) group.push_back(r);
    }
    rng.Shuffle(group);
    const auto train_count = static_cast<size_t>(
        std::llround(train_fraction * static_cast<double>(group.size())));
    for (size_t i = 0; i < group.size(); ++i) {
      (i < train_count ? split.train : split.test).push_back(group[i]);
    }
  }
  return split;
}

Vocabulary::Vocabulary() {
  tokens_.push_back(kUnknownToken);
  index_[kUnknownToken] = kUnknown;
}

Vocabulary Vocabulary::Build(const std::vector<std::vector<std::string>>& texts,
                             int min_count) {
  std::map<std::string, int> counts;
  for (const auto& tokens : texts) {
    for (const std::string& t : tokens) ++counts[t];
  }
  std::vector<std::string> kept = {kDrug1Token, kDrug2Token, kDrugOtherToken};
  for (const auto& [token, count] : counts) {
    if (count >= min_count) kept.push_back(token);
  }
  return FromTokens(kept);
}

Vocabulary Vocabulary::FromTokens(const std::vector<std::string>& tokens) {
  std::set<std::string> sorted(tokens.begin(), tokens.end());
  sorted.erase(kUnknownToken);
  Vocabulary vocab;
  for (const std::string& t : sorted) vocab.Add(t);
  return vocab;
}

int64_t Vocabulary::Lookup(std::string_view token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnknown : it->second;
}

bool Vocabulary::Contains(std::string_view token) const {
  return index_.find(token) != index_.end();
}

void Vocabulary::Add(const std::string& token) {
  if (index_.count(token)) return;
  index_[token] = static_cast<int64_t>(tokens_.size());
  tokens_.push_back(token);
}

TextInstance Featurize(const MaskedInstance& instance, const Vocabulary& vocab,
                       int position_clip) {
  const size_t n = instance.tokens.size();
  if (instance.drug1_index >= n || instance.drug2_index >= n ||
      instance.drug1_index == instance.drug2_index) {
    throw DataError("instance " + instance.pair_id +
                    " has invalid target positions");
  }
  TextInstance out;
  out.pair_id = instance.pair_id;
  out.label = instance.label;
  out.drug1_id = instance.drug1_id;
  out.drug2_id = instance.drug2_id;
  for (const std::string& t : instance.tokens) out.tokens.push_back(vocab.Lookup(t));
  PositionFeatures positions = BuildPositionFeatures(
      n, instance.drug1_index, instance.drug2_index, position_clip);
  out.position1 = std::move(positions.first);
  out.position2 = std::move(positions.second);
  return out;
}

PretrainedEmbeddings LoadEmbeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings " + path);
  PretrainedEmbeddings out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> values;
    std::string item;
    while (fields >> item) {
      try {
        size_t used = 0;
        values.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": bad number '" + item + "'");
      }
    }
    if (line_no == 1 && values.size() == 1 &&
        word.find_first_not_of("0123456789") == std::string::npos) {
      continue;  // word2vec "count dim" header
    }
    if (out.dim == 0) out.dim = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != out.dim || out.dim == 0) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(out.dim) + " values");
    }
    out.vectors[word] = std::move(values);
  }
  if (out.vectors.empty()) throw DataError(path + ": no embeddings");
  // Sum in sorted order so the mean does not depend on hash iteration.
  std::vector<const std::string*> words;
  for (const auto& [w, v] : out.vectors) words.push_back(&w);
  std::sort(words.begin(), words.end(),
            [](const std::string* x, const std::string* y) { return *x < *y; });
  out.mean.assign(out.dim, 0.0);
  for (const std::string* w : words) {
    const auto& v = out.vectors[*w];
    for (int j = 0; j < out.dim; ++j) out.mean[j] += v[j];
  }
  for (double& m : out.mean) m /= static_cast<double>(words.size());
  return out;
}

void InitializeWordEmbeddings(Tensor& table, const Vocabulary& vocab,
                              const PretrainedEmbeddings& pretrained) {
  if (table.rows() != vocab.size() || table.cols() != pretrained.dim) {
    throw DataError("word table " + ShapeToString(table.shape()) +
                    " does not match vocabulary " +
                    std::to_string(vocab.size()) + " x embedding dim " +
                    std::to_string(pretrained.dim));
  }
  const auto* drug = pretrained.vectors.count("drug")
                         ? &pretrained.vectors.at("drug")
                         : nullptr;
  auto values = table.mutable_data();
  for (int64_t row = 0; row < vocab.size(); ++row) {
    const std::string& token = vocab.tokens()[row];
    const std::vector<double>* source = &pretrained.mean;
    if ((token == kDrug1Token || token == kDrug2Token) && drug) {
      source = drug;
    } else if (auto it = pretrained.vectors.find(token);
               it != pretrained.vectors.end()) {
      source = &it->second;
    }
    std::copy(source->begin(), source->end(),
              values.begin() + row * pretrained.dim);
  }
}

uint64_t StableHash(std::string_view text) {
  uint64_t h = 14695981039346656037ull;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

bool InHeldOutSplit(std::string_view pair_id) {
  return StableHash(pair_id) % 10 == 0;
}

}  // namespace molfuse
