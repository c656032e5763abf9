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
// SMILES reader producing heavy-atom molecular graphs.
//
// Supported grammar: organic-subset atoms (B C N O P S F Cl Br I and the
// aromatic b c n o p s), bracket atoms with isotope, element, chirality,
// hydrogen count, charge and atom class, branches, ring closures (digits and
// %nn), '.' component separators, and the bond symbols - = # : / \.
// Isotopes, chirality, hydrogen counts, atom classes and cis/trans marks are
// read and dropped; hydrogens never become nodes unless written as their own
// bracket atom.

#ifndef MOLFUSE_SMILES_H_
#define MOLFUSE_SMILES_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "molfuse/errors.h"

namespace molfuse {

enum class BondType { kSingle = 0, kDouble = 1, kTriple = 2, kAromatic = 3 };
inline constexpr int kNumBondTypes = 4;

const char* BondTypeName(BondType type);

struct Atom {
  // Element symbol as written, e.g. "C", "c", "Cl", "se".
  std::string symbol;
  bool aromatic = false;
  int charge = 0;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondType type = BondType::kSingle;
};

class MolGraph {
 public:
  MolGraph() = default;
  // Validates the graph invariants; throws DataError.
  MolGraph(std::vector<Atom> atoms, std::vector<Bond> bonds);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  bool empty() const { return atoms_.empty(); }

  int Degree(int atom) const;
  int NumComponents() const;
  int NumAromaticBonds() const;

  // Copy with atom i moved to position permutation[i].
  MolGraph Relabeled(const std::vector<int>& permutation) const;
  // Copy with bonds listed in the given order.
  MolGraph WithBondOrder(const std::vector<int>& order) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<int> degree_;
};

enum class SmilesErrorKind {
  kEmpty,
  kUnclosedBranch,
  kUnmatchedCloseBranch,
  kUnmatchedRingClosure,
  kUnknownElement,
  kChargeOutsideBracket,
  kEmptyBracket,
  kUnclosedBracket,
  kUnexpectedCharacter,
  kDanglingBond,
  kInvalidRingBond,
  kAromaticOutsideRing,
  kDepthLimit,
};

const char* SmilesErrorKindName(SmilesErrorKind kind);

class SmilesError : public DataError {
 public:
  SmilesError(SmilesErrorKind kind, size_t offset, const std::string& detail);

  SmilesErrorKind kind() const { return kind_; }
  // Byte offset into the input where the problem was detected.
  size_t offset() const { return offset_; }

 private:
  SmilesErrorKind kind_;
  size_t offset_;
};

struct SmilesOptions {
  // Maximum branch nesting and maximum simultaneously open ring closures.
  int max_depth = 100;
};

MolGraph ParseSmiles(std::string_view text, const SmilesOptions& options = {});

// True if symbol names a chemical element (case-sensitive, e.g. "Cl").
bool IsElementSymbol(std::string_view symbol);

// Element symbol with aromatic lowercase spelling folded, e.g. "c" -> "C",
// "se" -> "Se".
std::string CanonicalElement(std::string_view symbol);

// Element -> row index for atom embeddings. Index 0 is reserved for elements
// never seen while building the vocabulary.
class AtomVocabulary {
 public:
  static constexpr int kUnknown = 0;

  AtomVocabulary() = default;
  static AtomVocabulary Build(const std::vector<const MolGraph*>& graphs);
  static AtomVocabulary FromSymbols(const std::vector<std::string>& symbols);

  // Index of the atom's element. Unseen elements map to kUnknown unless
  // strict, in which case DataError is thrown.
  int Index(std::string_view symbol, bool strict = false) const;
  // Number of rows including the unknown slot.
  int size() const { return static_cast<int>(symbols_.size()) + 1; }
  // Known symbols in index order (index = position + 1).
  const std::vector<std::string>& symbols() const { return symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, int, std::less<>> index_;
};

}  // namespace molfuse

#endif  // MOLFUSE_SMILES_H_
