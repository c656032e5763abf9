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

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "molfuse/rng.h"
#include "testing/synthetic.h"

namespace molfuse {
namespace {

SmilesErrorKind KindOf(const std::string& text, const SmilesOptions& options = {}) {
  try {
    ParseSmiles(text, options);
  } catch (const SmilesError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "'" << text << "' parsed without error";
  return SmilesErrorKind::kEmpty;
}

TEST(SmilesTest, SingleAtom) {
  const MolGraph g = ParseSmiles("C");
  EXPECT_EQ(g.num_atoms(), 1);
  EXPECT_EQ(g.num_bonds(), 0);
  EXPECT_EQ(g.atoms()[0].symbol, "C");
}

TEST(SmilesTest, DoubleBond) {
  const MolGraph g = ParseSmiles("C=O");
  ASSERT_EQ(g.num_bonds(), 1);
  EXPECT_EQ(g.bonds()[0].type, BondType::kDouble);
}

TEST(SmilesTest, BenzeneIsAnAromaticCycle) {
  const MolGraph g = ParseSmiles("c1ccccc1");
  EXPECT_EQ(g.num_atoms(), 6);
  EXPECT_EQ(g.num_bonds(), 6);
  EXPECT_EQ(g.NumAromaticBonds(), 6);
  for (const Atom& a : g.atoms()) EXPECT_TRUE(a.aromatic);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(g.Degree(i), 2);
}

TEST(SmilesTest, Aspirin) {
  const MolGraph g = ParseSmiles("CC(=O)Oc1ccccc1C(=O)O");
  EXPECT_EQ(g.num_atoms(), 13);
  EXPECT_EQ(g.num_bonds(), 13);
  EXPECT_EQ(g.NumAromaticBonds(), 6);
}

TEST(SmilesTest, SaltHasTwoComponents) {
  const MolGraph g = ParseSmiles("[Na+].[Cl-]");
  EXPECT_EQ(g.num_atoms(), 2);
  EXPECT_EQ(g.num_bonds(), 0);
  EXPECT_EQ(g.NumComponents(), 2);
  EXPECT_EQ(g.atoms()[0].charge, 1);
  EXPECT_EQ(g.atoms()[1].charge, -1);
}

TEST(SmilesTest, BracketAtomDetails) {
  const MolGraph g = ParseSmiles("[13CH3][NH3+].[Fe+3].[O--]");
  ASSERT_EQ(g.num_atoms(), 4);
  EXPECT_EQ(g.atoms()[0].symbol, "C");
  EXPECT_EQ(g.atoms()[1].charge, 1);
  EXPECT_EQ(g.atoms()[2].symbol, "Fe");
  EXPECT_EQ(g.atoms()[2].charge, 3);
  EXPECT_EQ(g.atoms()[3].charge, -2);
  EXPECT_EQ(g.num_bonds(), 1);
}

TEST(SmilesTest, ChiralityAndStereoBondsDiscarded) {
  const MolGraph g = ParseSmiles("F/C=C/[C@@H](Cl)Br");
  EXPECT_EQ(g.num_atoms(), 6);
  EXPECT_EQ(g.bonds()[0].type, BondType::kSingle);
  EXPECT_EQ(g.bonds()[1].type, BondType::kDouble);
}

TEST(SmilesTest, ExplicitBondSymbolsOverride) {
  const MolGraph g = ParseSmiles("C#CC-C");
  EXPECT_EQ(g.bonds()[0].type, BondType::kTriple);
  EXPECT_EQ(g.bonds()[2].type, BondType::kSingle);
  const MolGraph aromatic = ParseSmiles("C1:C:C:C:C:C:1");
  EXPECT_EQ(aromatic.NumAromaticBonds(), 6);
}

TEST(SmilesTest, BondBetweenAromaticRingsIsSingle) {
  const MolGraph biphenyl = ParseSmiles("c1ccccc1-c1ccccc1");
  EXPECT_EQ(biphenyl.num_bonds(), 13);
  EXPECT_EQ(biphenyl.NumAromaticBonds(), 12);
  const MolGraph implicit = ParseSmiles("c1ccccc1c1ccccc1");
  EXPECT_EQ(implicit.NumAromaticBonds(), 12);
}

TEST(SmilesTest, PercentRingLabels) {
  const MolGraph g = ParseSmiles("C%10CCC%10");
  EXPECT_EQ(g.num_atoms(), 4);
  EXPECT_EQ(g.num_bonds(), 4);
}

TEST(SmilesTest, RingLabelsCanBeReused) {
  const MolGraph g = ParseSmiles("C1CC1C1CC1");
  EXPECT_EQ(g.num_atoms(), 6);
  EXPECT_EQ(g.num_bonds(), 7);
}

TEST(SmilesTest, RingBondSymbolOnEitherSide) {
  EXPECT_EQ(ParseSmiles("C=1CCCC1").bonds().back().type, BondType::kDouble);
  EXPECT_EQ(ParseSmiles("C1CCCC=1").bonds().back().type, BondType::kDouble);
}

TEST(SmilesTest, ErrorKinds) {
  EXPECT_EQ(KindOf(""), SmilesErrorKind::kEmpty);
  EXPECT_EQ(KindOf("CC(C"), SmilesErrorKind::kUnclosedBranch);
  EXPECT_EQ(KindOf("CC)C"), SmilesErrorKind::kUnmatchedCloseBranch);
  EXPECT_EQ(KindOf("C1CC"), SmilesErrorKind::kUnmatchedRingClosure);
  EXPECT_EQ(KindOf("[Xx]"), SmilesErrorKind::kUnknownElement);
  EXPECT_EQ(KindOf("Q"), SmilesErrorKind::kUnknownElement);
  EXPECT_EQ(KindOf("C+"), SmilesErrorKind::kChargeOutsideBracket);
  EXPECT_EQ(KindOf("C[]"), SmilesErrorKind::kEmptyBracket);
  EXPECT_EQ(KindOf("[NH4+"), SmilesErrorKind::kUnclosedBracket);
  EXPECT_EQ(KindOf("C?C"), SmilesErrorKind::kUnexpectedCharacter);
  EXPECT_EQ(KindOf("CC="), SmilesErrorKind::kDanglingBond);
  EXPECT_EQ(KindOf("C11"), SmilesErrorKind::kInvalidRingBond);
  EXPECT_EQ(KindOf("C12CC12"), SmilesErrorKind::kInvalidRingBond);
  EXPECT_EQ(KindOf("c"), SmilesErrorKind::kAromaticOutsideRing);
  EXPECT_EQ(KindOf("Cc"), SmilesErrorKind::kAromaticOutsideRing);
}

TEST(SmilesTest, ErrorsCarryByteOffsets) {
  try {
    ParseSmiles("CCC+");
    FAIL();
  } catch (const SmilesError& e) {
    EXPECT_EQ(e.offset(), 3u);
  }
  try {
    ParseSmiles("CC(C");
    FAIL();
  } catch (const SmilesError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
}

TEST(SmilesTest, DepthLimitIsAnErrorNotACrash) {
  std::string deep = "C";
  for (int i = 0; i < 5000; ++i) deep += "(C";
  deep += std::string(5000, ')');
  EXPECT_EQ(KindOf(deep), SmilesErrorKind::kDepthLimit);
  SmilesOptions shallow;
  shallow.max_depth = 2;
  EXPECT_EQ(KindOf("C(C(C(C)))", shallow), SmilesErrorKind::kDepthLimit);
  EXPECT_NO_THROW(ParseSmiles("C(C(C))", shallow));
}

TEST(SmilesTest, GoldenFile) {
  std::ifstream in(std::string(MOLFUSE_TEST_DATA_DIR) + "/golden_smiles.tsv");
  ASSERT_TRUE(in);
  int count = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string smiles;
    int atoms, bonds, aromatic;
    std::getline(fields, smiles, '\t');
    fields >> atoms >> bonds >> aromatic;
    const MolGraph g = ParseSmiles(smiles);
    EXPECT_EQ(g.num_atoms(), atoms) << smiles;
    EXPECT_EQ(g.num_bonds(), bonds) << smiles;
    EXPECT_EQ(g.NumAromaticBonds(), aromatic) << smiles;
    ++count;
  }
  EXPECT_EQ(count, 20);
}

TEST(SmilesTest, ParsingIsDeterministic) {
  const MolGraph a = ParseSmiles("CC(=O)Oc1ccccc1C(=O)O");
  const MolGraph b = ParseSmiles("CC(=O)Oc1ccccc1C(=O)O");
  ASSERT_EQ(a.num_bonds(), b.num_bonds());
  for (int i = 0; i < a.num_bonds(); ++i) {
    EXPECT_EQ(a.bonds()[i].begin, b.bonds()[i].begin);
    EXPECT_EQ(a.bonds()[i].end, b.bonds()[i].end);
    EXPECT_EQ(a.bonds()[i].type, b.bonds()[i].type);
  }
}

// Every generated string parses to a graph that satisfies the invariants,
// with bonds = atoms - components + ring closures.
TEST(SmilesTest, RandomStringsYieldValidGraphs) {
  Rng rng(17);
  for (int i = 0; i < 300; ++i) {
    const std::string smiles = testing::RandomSmiles(rng);
    MolGraph g;
    ASSERT_NO_THROW(g = ParseSmiles(smiles)) << smiles;
    EXPECT_NO_THROW(MolGraph(g.atoms(), g.bonds())) << smiles;
    EXPECT_GE(g.num_bonds(), g.num_atoms() - g.NumComponents()) << smiles;
    for (const Atom& atom : g.atoms()) {
      EXPECT_TRUE(IsElementSymbol(CanonicalElement(atom.symbol))) << smiles;
    }
  }
}

TEST(MolGraphTest, ValidatesInvariants) {
  const std::vector<Atom> atoms = {{"C", false, 0}, {"O", false, 0}};
  EXPECT_THROW(MolGraph(atoms, {{0, 0, BondType::kSingle}}), DataError);
  EXPECT_THROW(MolGraph(atoms, {{0, 2, BondType::kSingle}}), DataError);
  EXPECT_THROW(MolGraph(atoms, {{0, 1, BondType::kSingle}, {1, 0, BondType::kDouble}}),
               DataError);
  EXPECT_NO_THROW(MolGraph(atoms, {{0, 1, BondType::kSingle}}));
}

TEST(MolGraphTest, RelabeledKeepsStructure) {
  const MolGraph g = ParseSmiles("CCO");
  const MolGraph r = g.Relabeled({2, 0, 1});
  EXPECT_EQ(r.atoms()[0].symbol, "C");
  EXPECT_EQ(r.atoms()[1].symbol, "O");
  EXPECT_EQ(r.atoms()[2].symbol, "C");
  EXPECT_EQ(r.Degree(0), 2);
  EXPECT_EQ(r.Degree(1), 1);
  EXPECT_EQ(r.num_bonds(), 2);
  EXPECT_THROW(g.Relabeled({0, 0, 1}), std::invalid_argument);
  EXPECT_THROW(g.Relabeled({0, 1}), std::invalid_argument);
}

TEST(AtomVocabularyTest, SortedWithReservedUnknown) {
  const MolGraph co = ParseSmiles("CO");
  const AtomVocabulary vocab = AtomVocabulary::Build({&co});
  EXPECT_EQ(vocab.size(), 3);
  EXPECT_EQ(vocab.Index("C"), 1);
  EXPECT_EQ(vocab.Index("O"), 2);
  EXPECT_EQ(vocab.Index("Fe"), AtomVocabulary::kUnknown);
  EXPECT_THROW(vocab.Index("Fe", /*strict=*/true), DataError);
}

TEST(AtomVocabularyTest, AromaticAndAliphaticShareIndex) {
  const MolGraph benzene = ParseSmiles("c1ccccc1");
  const MolGraph aspirin = ParseSmiles("CC(=O)Oc1ccccc1C(=O)O");
  const AtomVocabulary vocab = AtomVocabulary::Build({&benzene, &aspirin});
  EXPECT_EQ(vocab.Index("c"), vocab.Index("C"));
  EXPECT_EQ(vocab.symbols(), (std::vector<std::string>{"C", "O"}));
}

TEST(ElementTest, SymbolsAndCanonicalForms) {
  EXPECT_TRUE(IsElementSymbol("Cl"));
  EXPECT_TRUE(IsElementSymbol("Og"));
  EXPECT_FALSE(IsElementSymbol("Xx"));
  EXPECT_FALSE(IsElementSymbol("cl"));
  EXPECT_EQ(CanonicalElement("c"), "C");
  EXPECT_EQ(CanonicalElement("se"), "Se");
  EXPECT_EQ(CanonicalElement("Br"), "Br");
}

}  // namespace
}  // namespace molfuse
