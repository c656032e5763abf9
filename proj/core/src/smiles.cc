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
#include "molfuse/smiles.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <stdexcept>
#include <utility>

namespace molfuse {

namespace {

constexpr std::array<std::string_view, 118> kElements = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg",
    "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr",
    "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr",
    "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf",
    "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
    "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs",
    "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

// Aromatic spellings allowed inside brackets.
constexpr std::array<std::string_view, 9> kAromaticBracket = {
    "se", "as", "te", "b", "c", "n", "o", "p", "s"};

uint64_t PairKey(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

struct PendingBond {
  std::optional<BondType> type;
  size_t offset = 0;
};

struct RingOpening {
  int atom = 0;
  std::optional<BondType> type;
  size_t offset = 0;
};

struct RawBond {
  int begin = 0;
  int end = 0;
  std::optional<BondType> type;
};

class Parser {
 public:
  Parser(std::string_view text, const SmilesOptions& options)
      : text_(text), options_(options) {}

  MolGraph Parse() {
    if (text_.empty()) {
      throw SmilesError(SmilesErrorKind::kEmpty, 0, "empty SMILES string");
    }
    while (pos_ < text_.size()) Step();
    if (pending_) {
      throw SmilesError(SmilesErrorKind::kDanglingBond, pending_->offset,
                        "bond symbol at end of input");
    }
    if (!branches_.empty()) {
      throw SmilesError(SmilesErrorKind::kUnclosedBranch,
                        branches_.back().second, "unclosed branch");
    }
    if (!rings_.empty()) {
      // Report the earliest unmatched opening.
      size_t first = text_.size();
      int label = 0;
      for (const auto& [num, open] : rings_) {
        if (open.offset < first) {
          first = open.offset;
          label = num;
        }
      }
      throw SmilesError(SmilesErrorKind::kUnmatchedRingClosure, first,
                        "ring bond " + std::to_string(label) +
                            " is never closed");
    }
    return Finish();
  }

 private:
  char Peek(size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  [[noreturn]] void Fail(SmilesErrorKind kind, const std::string& detail) {
    throw SmilesError(kind, pos_, detail);
  }

  void Step() {
    const char c = Peek();
    switch (c) {
      case '(': OpenBranch(); return;
      case ')': CloseBranch(); return;
      case '-': SetBond(BondType::kSingle); return;
      case '=': SetBond(BondType::kDouble); return;
      case '#': SetBond(BondType::kTriple); return;
      case ':': SetBond(BondType::kAromatic); return;
      case '/':
      case '\\':
        SetBond(BondType::kSingle);
        return;
      case '.': Dot(); return;
      case '[': BracketAtom(); return;
      case '%': RingClosure(); return;
      case '+':
        Fail(SmilesErrorKind::kChargeOutsideBracket,
             "charge outside a bracket atom");
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      RingClosure();
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '*') {
      OrganicAtom();
    } else {
      Fail(SmilesErrorKind::kUnexpectedCharacter,
           std::string("unexpected character '") + c + "'");
    }
  }

  void OpenBranch() {
    if (previous_ < 0) {
      Fail(SmilesErrorKind::kUnexpectedCharacter, "branch without an atom");
    }
    if (pending_) {
      Fail(SmilesErrorKind::kDanglingBond, "bond symbol before '('");
    }
    if (static_cast<int>(branches_.size()) >= options_.max_depth) {
      Fail(SmilesErrorKind::kDepthLimit,
           "branch nesting exceeds " + std::to_string(options_.max_depth));
    }
    branches_.emplace_back(previous_, pos_);
    ++pos_;
  }

  void CloseBranch() {
    if (branches_.empty()) {
      Fail(SmilesErrorKind::kUnmatchedCloseBranch, "')' without '('");
    }
    if (pending_) {
      Fail(SmilesErrorKind::kDanglingBond, "bond symbol before ')'");
    }
    previous_ = branches_.back().first;
    branches_.pop_back();
    ++pos_;
  }

  void SetBond(BondType type) {
    if (pending_) {
      Fail(SmilesErrorKind::kUnexpectedCharacter, "two consecutive bonds");
    }
    if (previous_ < 0) {
      Fail(SmilesErrorKind::kDanglingBond, "bond without a preceding atom");
    }
    pending_ = PendingBond{type, pos_};
    ++pos_;
  }

  void Dot() {
    if (pending_) {
      Fail(SmilesErrorKind::kDanglingBond, "bond symbol before '.'");
    }
    previous_ = -1;
    ++pos_;
  }

  void RingClosure() {
    const size_t start = pos_;
    int label;
    if (Peek() == '%') {
      if (!std::isdigit(static_cast<unsigned char>(Peek(1))) ||
          !std::isdigit(static_cast<unsigned char>(Peek(2)))) {
        Fail(SmilesErrorKind::kUnexpectedCharacter,
             "'%' must be followed by two digits");
      }
      label = (Peek(1) - '0') * 10 + (Peek(2) - '0');
      pos_ += 3;
    } else {
      label = Peek() - '0';
      pos_ += 1;
    }
    if (previous_ < 0) {
      throw SmilesError(SmilesErrorKind::kUnexpectedCharacter, start,
                        "ring bond without an atom");
    }
    std::optional<BondType> type;
    if (pending_) type = pending_->type;
    pending_.reset();

    auto it = rings_.find(label);
    if (it == rings_.end()) {
      if (static_cast<int>(rings_.size()) >= options_.max_depth) {
        throw SmilesError(SmilesErrorKind::kDepthLimit, start,
                          "open ring bonds exceed " +
                              std::to_string(options_.max_depth));
      }
      rings_[label] = RingOpening{previous_, type, start};
      return;
    }
    const RingOpening open = it->second;
    rings_.erase(it);
    if (open.type && type && *open.type != *type) {
      throw SmilesError(SmilesErrorKind::kInvalidRingBond, start,
                        "conflicting bond symbols on ring bond " +
                            std::to_string(label));
    }
    if (open.atom == previous_) {
      throw SmilesError(SmilesErrorKind::kInvalidRingBond, start,
                        "ring bond " + std::to_string(label) +
                            " closes on its own atom");
    }
    if (!edges_.insert(PairKey(open.atom, previous_)).second) {
      throw SmilesError(SmilesErrorKind::kInvalidRingBond, start,
                        "ring bond " + std::to_string(label) +
                            " duplicates an existing bond");
    }
    bonds_.push_back(RawBond{open.atom, previous_, type ? type : open.type});
  }

  void OrganicAtom() {
    const size_t start = pos_;
    const char c = Peek();
    std::string symbol(1, c);
    if ((c == 'C' && Peek(1) == 'l') || (c == 'B' && Peek(1) == 'r')) {
      symbol += Peek(1);
    }
    static const std::set<std::string, std::less<>> kOrganic = {
        "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I",
        "b", "c", "n", "o", "p", "s"};
    if (!kOrganic.count(symbol)) {
      throw SmilesError(SmilesErrorKind::kUnknownElement, start,
                        "'" + symbol +
                            "' is not an organic-subset atom outside brackets");
    }
    pos_ += symbol.size();
    const bool aromatic = std::islower(static_cast<unsigned char>(c)) != 0;
    AddAtom(Atom{symbol, aromatic, 0});
  }

  void BracketAtom() {
    const size_t open = pos_;
    const size_t close = text_.find(']', pos_);
    if (close == std::string_view::npos) {
      Fail(SmilesErrorKind::kUnclosedBracket, "'[' without ']'");
    }
    if (close == open + 1) {
      Fail(SmilesErrorKind::kEmptyBracket, "empty bracket atom");
    }
    ++pos_;
    while (pos_ < close && std::isdigit(static_cast<unsigned char>(Peek()))) {
      ++pos_;  // isotope
    }
    const size_t symbol_at = pos_;
    std::string symbol;
    bool aromatic = false;
    const std::string_view rest = text_.substr(pos_, close - pos_);
    if (!rest.empty() && std::isupper(static_cast<unsigned char>(rest[0]))) {
      if (rest.size() >= 2 &&
          std::islower(static_cast<unsigned char>(rest[1])) &&
          IsElementSymbol(rest.substr(0, 2))) {
        symbol = std::string(rest.substr(0, 2));
      } else if (IsElementSymbol(rest.substr(0, 1))) {
        symbol = std::string(rest.substr(0, 1));
      }
    } else {
      for (std::string_view form : kAromaticBracket) {
        if (rest.substr(0, form.size()) == form) {
          symbol = std::string(form);
          aromatic = true;
          break;
        }
      }
    }
    if (symbol.empty()) {
      throw SmilesError(SmilesErrorKind::kUnknownElement, symbol_at,
                        "unknown element in '[" + std::string(rest) + "]'");
    }
    pos_ += symbol.size();
    // Chirality: @, @@, @TH1, @SP2, @TB10, @OH25, @AL1.
    if (Peek() == '@') {
      while (Peek() == '@') ++pos_;
      if (std::isupper(static_cast<unsigned char>(Peek())) && Peek() != 'H' &&
          std::isupper(static_cast<unsigned char>(Peek(1)))) {
        pos_ += 2;
        while (std::isdigit(static_cast<unsigned char>(Peek()))) ++pos_;
      }
    }
    if (Peek() == 'H') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(Peek()))) ++pos_;
    }
    int charge = 0;
    if (Peek() == '+' || Peek() == '-') {
      const char sign = Peek();
      const int unit = sign == '+' ? 1 : -1;
      ++pos_;
      if (std::isdigit(static_cast<unsigned char>(Peek()))) {
        int magnitude = 0;
        while (std::isdigit(static_cast<unsigned char>(Peek()))) {
          magnitude = magnitude * 10 + (Peek() - '0');
          ++pos_;
        }
        charge = unit * magnitude;
      } else {
        charge = unit;
        while (Peek() == sign) {
          charge += unit;
          ++pos_;
        }
      }
    }
    if (Peek() == ':') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(Peek()))) ++pos_;
    }
    if (pos_ != close) {
      Fail(SmilesErrorKind::kUnexpectedCharacter,
           std::string("unexpected '") + Peek() + "' in bracket atom");
    }
    pos_ = close + 1;
    AddAtom(Atom{symbol, aromatic, charge});
  }

  void AddAtom(Atom atom) {
    const int index = static_cast<int>(atoms_.size());
    atoms_.push_back(std::move(atom));
    if (previous_ >= 0) {
      edges_.insert(PairKey(previous_, index));
      bonds_.push_back(RawBond{previous_, index,
                               pending_ ? pending_->type : std::nullopt});
    }
    pending_.reset();
    previous_ = index;
  }

  // True if begin and end stay connected once the bond at skip is removed.
  bool InRing(size_t skip, const std::vector<std::vector<std::pair<int, size_t>>>&
                               adjacency) const {
    const int from = bonds_[skip].begin, to = bonds_[skip].end;
    std::vector<bool> seen(atoms_.size(), false);
    std::vector<int> stack = {from};
    seen[from] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      for (const auto& [w, bond] : adjacency[v]) {
        if (bond == skip || seen[w]) continue;
        seen[w] = true;
        stack.push_back(w);
      }
    }
    return false;
  }

  MolGraph Finish() {
    std::vector<std::vector<std::pair<int, size_t>>> adjacency(atoms_.size());
    for (size_t b = 0; b < bonds_.size(); ++b) {
      adjacency[bonds_[b].begin].emplace_back(bonds_[b].end, b);
      adjacency[bonds_[b].end].emplace_back(bonds_[b].begin, b);
    }
    std::vector<Bond> bonds;
    bonds.reserve(bonds_.size());
    for (size_t b = 0; b < bonds_.size(); ++b) {
      const RawBond& raw = bonds_[b];
      BondType type = BondType::kSingle;
      if (raw.type) {
        type = *raw.type;
      } else if (atoms_[raw.begin].aromatic && atoms_[raw.end].aromatic &&
                 InRing(b, adjacency)) {
        type = BondType::kAromatic;
      }
      bonds.push_back(Bond{raw.begin, raw.end, type});
    }
    std::vector<bool> has_aromatic_bond(atoms_.size(), false);
    for (const Bond& b : bonds) {
      if (b.type == BondType::kAromatic) {
        has_aromatic_bond[b.begin] = has_aromatic_bond[b.end] = true;
      }
    }
    for (size_t a = 0; a < atoms_.size(); ++a) {
      if (atoms_[a].aromatic && !has_aromatic_bond[a]) {
        throw SmilesError(SmilesErrorKind::kAromaticOutsideRing, 0,
                          "aromatic atom " + std::to_string(a) + " ('" +
                              atoms_[a].symbol + "') has no aromatic bond");
      }
    }
    return MolGraph(std::move(atoms_), std::move(bonds));
  }

  std::string_view text_;
  SmilesOptions options_;
  size_t pos_ = 0;
  int previous_ = -1;
  std::optional<PendingBond> pending_;
  // (atom before '(', offset of '(').
  std::vector<std::pair<int, size_t>> branches_;
  std::map<int, RingOpening> rings_;
  std::vector<Atom> atoms_;
  std::vector<RawBond> bonds_;
  std::set<uint64_t> edges_;
};

}  // namespace

const char* BondTypeName(BondType type) {
  switch (type) {
    case BondType::kSingle: return "single";
    case BondType::kDouble: return "double";
    case BondType::kTriple: return "triple";
    case BondType::kAromatic: return "aromatic";
  }
  return "single";
}

const char* SmilesErrorKindName(SmilesErrorKind kind) {
  switch (kind) {
    case SmilesErrorKind::kEmpty: return "empty";
    case SmilesErrorKind::kUnclosedBranch: return "unclosed-branch";
    case SmilesErrorKind::kUnmatchedCloseBranch: return "unmatched-close-branch";
    case SmilesErrorKind::kUnmatchedRingClosure: return "unmatched-ring-closure";
    case SmilesErrorKind::kUnknownElement: return "unknown-element";
    case SmilesErrorKind::kChargeOutsideBracket: return "charge-outside-bracket";
    case SmilesErrorKind::kEmptyBracket: return "empty-bracket";
    case SmilesErrorKind::kUnclosedBracket: return "unclosed-bracket";
    case SmilesErrorKind::kUnexpectedCharacter: return "unexpected-character";
    case SmilesErrorKind::kDanglingBond: return "dangling-bond";
    case SmilesErrorKind::kInvalidRingBond: return "invalid-ring-bond";
    case SmilesErrorKind::kAromaticOutsideRing: return "aromatic-outside-ring";
    case SmilesErrorKind::kDepthLimit: return "depth-limit";
  }
  return "unknown";
}

SmilesError::SmilesError(SmilesErrorKind kind, size_t offset,
                         const std::string& detail)
    : DataError(std::string("SMILES ") + SmilesErrorKindName(kind) +
                " at byte " + std::to_string(offset) + ": " + detail),
      kind_(kind),
      offset_(offset) {}

MolGraph::MolGraph(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  degree_.assign(atoms_.size(), 0);
  std::set<uint64_t> seen;
  const int n = num_atoms();
  for (const Bond& b : bonds_) {
    if (b.begin < 0 || b.end < 0 || b.begin >= n || b.end >= n ||
        b.begin == b.end) {
      throw DataError("bond endpoints " + std::to_string(b.begin) + "-" +
                      std::to_string(b.end) + " are invalid");
    }
    if (!seen.insert(PairKey(b.begin, b.end)).second) {
      throw DataError("duplicate bond " + std::to_string(b.begin) + "-" +
                      std::to_string(b.end));
    }
    ++degree_[b.begin];
    ++degree_[b.end];
  }
}

int MolGraph::Degree(int atom) const { return degree_.at(atom); }

int MolGraph::NumComponents() const {
  std::vector<int> parent(atoms_.size());
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = num_atoms();
  for (const Bond& b : bonds_) {
    const int x = find(b.begin), y = find(b.end);
    if (x != y) {
      parent[x] = y;
      --components;
    }
  }
  return components;
}

int MolGraph::NumAromaticBonds() const {
  return static_cast<int>(
      std::count_if(bonds_.begin(), bonds_.end(), [](const Bond& b) {
        return b.type == BondType::kAromatic;
      }));
}

MolGraph MolGraph::Relabeled(const std::vector<int>& permutation) const {
  if (permutation.size() != atoms_.size()) {
    throw std::invalid_argument("Relabeled: permutation size mismatch");
  }
  std::vector<bool> seen(atoms_.size(), false);
  for (int target : permutation) {
    if (target < 0 || target >= num_atoms() || seen[target]) {
      throw std::invalid_argument("Relabeled: not a permutation");
    }
    seen[target] = true;
  }
  std::vector<Atom> atoms(atoms_.size());
  for (size_t i = 0; i < atoms_.size(); ++i) atoms[permutation[i]] = atoms_[i];
  std::vector<Bond> bonds;
  for (const Bond& b : bonds_) {
    bonds.push_back(Bond{permutation[b.begin], permutation[b.end], b.type});
  }
  return MolGraph(std::move(atoms), std::move(bonds));
}

MolGraph MolGraph::WithBondOrder(const std::vector<int>& order) const {
  if (order.size() != bonds_.size()) {
    throw std::invalid_argument("WithBondOrder: order size mismatch");
  }
  std::vector<Bond> bonds;
  for (int i : order) bonds.push_back(bonds_.at(i));
  return MolGraph(atoms_, std::move(bonds));
}

MolGraph ParseSmiles(std::string_view text, const SmilesOptions& options) {
  return Parser(text, options).Parse();
}

bool IsElementSymbol(std::string_view symbol) {
  return std::find(kElements.begin(), kElements.end(), symbol) !=
         kElements.end();
}

std::string CanonicalElement(std::string_view symbol) {
  std::string out(symbol);
  if (!out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

AtomVocabulary AtomVocabulary::Build(const std::vector<const MolGraph*>& graphs) {
  std::set<std::string> symbols;
  for (const MolGraph* g : graphs) {
    for (const Atom& a : g->atoms()) symbols.insert(CanonicalElement(a.symbol));
  }
  return FromSymbols({symbols.begin(), symbols.end()});
}

AtomVocabulary AtomVocabulary::FromSymbols(
    const std::vector<std::string>& symbols) {
  AtomVocabulary vocab;
  std::set<std::string> sorted;
  for (const std::string& s : symbols) sorted.insert(CanonicalElement(s));
  for (const std::string& s : sorted) {
    vocab.index_[s] = static_cast<int>(vocab.symbols_.size()) + 1;
    vocab.symbols_.push_back(s);
  }
  return vocab;
}

int AtomVocabulary::Index(std::string_view symbol, bool strict) const {
  auto it = index_.find(CanonicalElement(symbol));
  if (it != index_.end()) return it->second;
  if (strict) {
    throw DataError("element '" + std::string(symbol) +
                    "' is not in the atom vocabulary");
  }
  return kUnknown;
}

}  // namespace molfuse
