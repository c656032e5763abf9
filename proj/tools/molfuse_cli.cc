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

#include "molfuse_cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "molfuse/config.h"
#include "molfuse/corpus.h"
#include "molfuse/errors.h"
#include "molfuse/fusion.h"
#include "molfuse/metrics.h"
#include "molfuse/mol_encoder.h"
#include "molfuse/records.h"
#include "molfuse/smiles.h"
#include "molfuse/text_encoder.h"

namespace molfuse {
namespace cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Common {
  std::string config_path;
  uint64_t seed = 0;
  CLI::Option* seed_option = nullptr;

  ExperimentConfig Load() const {
    ExperimentConfig config;
    if (!config_path.empty()) config = ExperimentConfig::Load(config_path);
    if (seed_option && seed_option->count() > 0) config.seed = seed;
    config.Validate();
    return config;
  }
};

void AddCommon(CLI::App* command, Common* common) {
  command->add_option("--config", common->config_path,
                      "JSON experiment configuration");
  common->seed_option =
      command->add_option("--seed", common->seed, "Overrides the config seed");
}

void WriteJson(const std::string& path, const ordered_json& json) {
  std::ofstream out = OpenOutput(path);
  out << json.dump(2) << '\n';
}

// XML files named directly, plus every *.xml inside named directories in
// sorted order.
std::vector<Sentence> LoadSentences(const std::vector<std::string>& paths) {
  std::vector<Sentence> sentences;
  for (const std::string& path : paths) {
    std::vector<std::string> files;
    if (fs::is_directory(path)) {
      for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml") {
          files.push_back(entry.path().string());
        }
      }
      std::sort(files.begin(), files.end());
    } else {
      files.push_back(path);
    }
    for (const std::string& file : files) {
      std::vector<Sentence> part = LoadDdiCorpus(file);
      sentences.insert(sentences.end(), std::make_move_iterator(part.begin()),
                       std::make_move_iterator(part.end()));
    }
  }
  return sentences;
}

struct MaskingStats {
  size_t mentions = 0;
  size_t linked_mentions = 0;
  size_t pairs = 0;
  size_t skipped = 0;

  ordered_json ToJson() const {
    ordered_json j;
    j["mentions"] = mentions;
    j["linked_mentions"] = linked_mentions;
    j["link_rate"] = mentions ? static_cast<double>(linked_mentions) / mentions : 0.0;
    j["pairs"] = pairs;
    j["skipped_overlapping"] = skipped;
    return j;
  }
};

std::vector<MaskedInstance> MaskAll(const std::vector<Sentence>& sentences,
                                    const EntityLinker& linker,
                                    MaskingStats* stats, std::ostream& err) {
  std::vector<MaskedInstance> out;
  for (const Sentence& sentence : sentences) {
    for (const Entity& entity : sentence.entities) {
      ++stats->mentions;
      if (linker.Link(entity.text)) ++stats->linked_mentions;
    }
    for (const CandidatePair& pair : sentence.pairs) {
      ++stats->pairs;
      std::string warning;
      std::optional<MaskedInstance> masked = MaskPair(sentence, pair, &warning);
      if (!masked) {
        err << "warning: " << warning << '\n';
        ++stats->skipped;
        continue;
      }
      masked->drug1_id = linker.Link(masked->drug1_mention);
      masked->drug2_id = linker.Link(masked->drug2_mention);
      out.push_back(std::move(*masked));
    }
  }
  return out;
}

// Drug id -> molecular graph for every entry whose SMILES parses. Entries
// without a usable structure are reported and later read as zero vectors.
std::map<std::string, MolGraph> ParseGraphs(const std::vector<DrugEntry>& drugs,
                                            const ExperimentConfig& config,
                                            std::ostream& err) {
  std::map<std::string, MolGraph> graphs;
  SmilesOptions options;
  options.max_depth = config.smiles_max_depth;
  for (const DrugEntry& drug : drugs) {
    if (!drug.smiles) continue;
    try {
      graphs.emplace(drug.id, ParseSmiles(*drug.smiles, options));
    } catch (const SmilesError& e) {
      err << "warning: drug " << drug.id << ": " << e.what() << '\n';
    }
  }
  return graphs;
}

std::vector<std::pair<std::string, std::string>> LoadInteractions(
    const std::string& path) {
  std::ifstream in = OpenInput(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string a, b;
    if (!std::getline(fields, a, '\t') || !std::getline(fields, b, '\t') ||
        a.empty() || b.empty()) {
      throw DataError(fmt::format("{}:{}: expected two tab-separated drug ids",
                                  path, line_no));
    }
    if (line_no == 1 && (a == "drug1" || a == "id")) continue;
    out.emplace_back(a, b);
  }
  return out;
}

void Prepare(const Common& common, const std::vector<std::string>& train_xml,
             const std::vector<std::string>& test_xml,
             const std::string& drugs_path, const std::string& interactions_path,
             const std::string& out_dir, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = common.Load();
  const std::vector<DrugEntry> drugs = LoadDrugTable(drugs_path);
  const EntityLinker linker(drugs, config.link_min_overlap);

  MaskingStats train_stats, test_stats;
  const std::vector<MaskedInstance> train =
      MaskAll(LoadSentences(train_xml), linker, &train_stats, err);
  const std::vector<MaskedInstance> test =
      MaskAll(LoadSentences(test_xml), linker, &test_stats, err);

  std::vector<std::vector<std::string>> texts;
  for (const MaskedInstance& m : train) texts.push_back(m.tokens);
  Vocabulary vocab = Vocabulary::Build(texts, config.min_word_count);
  size_t pretrained_added = 0;
  if (!config.embeddings_path.empty()) {
    const PretrainedEmbeddings pretrained = LoadEmbeddings(config.embeddings_path);
    std::set<std::string> extra;
    for (const MaskedInstance& m : test) {
      for (const std::string& token : m.tokens) {
        if (!vocab.Contains(token) && pretrained.vectors.count(token)) {
          extra.insert(token);
        }
      }
    }
    for (const std::string& token : extra) vocab.Add(token);
    pretrained_added = extra.size();
  }

  const std::map<std::string, MolGraph> graphs = ParseGraphs(drugs, config, err);
  std::vector<std::string> universe;
  for (const auto& [id, graph] : graphs) universe.push_back(id);

  std::set<std::pair<std::string, std::string>> test_mentioned;
  for (const MaskedInstance& m : test) {
    if (m.drug1_id && m.drug2_id && *m.drug1_id != *m.drug2_id) {
      test_mentioned.insert(UnorderedKey(*m.drug1_id, *m.drug2_id));
    }
  }
  std::vector<PairRecord> positives;
  std::set<std::pair<std::string, std::string>> seen;
  size_t dropped_structure = 0, dropped_test = 0;
  for (const auto& [a, b] : LoadInteractions(interactions_path)) {
    if (a == b) continue;
    const auto key = UnorderedKey(a, b);
    if (!seen.insert(key).second) continue;
    if (!graphs.count(a) || !graphs.count(b)) {
      ++dropped_structure;
      continue;
    }
    if (test_mentioned.count(key)) {
      ++dropped_test;
      continue;
    }
    positives.push_back({key.first, key.second, true, PairProvenance::kDatabase});
  }
  const size_t num_negatives = static_cast<size_t>(
      std::llround(config.negative_ratio * static_cast<double>(positives.size())));
  std::vector<PairRecord> pairs = positives;
  const std::vector<PairRecord> negatives = GenerateNegativePairs(
      positives, universe, num_negatives, test_mentioned, config.seed);
  pairs.insert(pairs.end(), negatives.begin(), negatives.end());
  const PairSplit split = SplitPairs(pairs, config.train_fraction, config.seed);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  SaveInstances((dir / "train_instances.jsonl").string(), train);
  SaveInstances((dir / "test_instances.jsonl").string(), test);
  {
    std::ofstream vocab_out = OpenOutput((dir / "vocab.tsv").string());
    WriteVocabulary(vocab_out, vocab);
  }
  SavePairs((dir / "mol_train_pairs.jsonl").string(), split.train);
  SavePairs((dir / "mol_test_pairs.jsonl").string(), split.test);

  ordered_json report;
  report["train"] = train_stats.ToJson();
  report["test"] = test_stats.ToJson();
  report["vocabulary_size"] = vocab.size();
  report["vocabulary_pretrained_additions"] = pretrained_added;
  report["drugs"] = drugs.size();
  report["drugs_with_structure"] = graphs.size();
  report["positive_pairs"] = positives.size();
  report["negative_pairs"] = negatives.size();
  report["positives_without_structure"] = dropped_structure;
  report["positives_mentioned_in_test"] = dropped_test;
  report["mol_train_pairs"] = split.train.size();
  report["mol_test_pairs"] = split.test.size();
  WriteJson((dir / "prepare_report.json").string(), report);
  out << report.dump(2) << '\n';
}

std::vector<MolPairExample> ToExamples(const std::vector<PairRecord>& pairs,
                                       const std::map<std::string, MolGraph>& graphs,
                                       std::ostream& err) {
  std::vector<MolPairExample> out;
  size_t skipped = 0;
  for (const PairRecord& p : pairs) {
    auto a = graphs.find(p.drug1);
    auto b = graphs.find(p.drug2);
    if (a == graphs.end() || b == graphs.end()) {
      ++skipped;
      continue;
    }
    out.push_back({&a->second, &b->second, p.positive});
  }
  if (skipped > 0) {
    err << "warning: " << skipped << " pairs skipped for missing structures\n";
  }
  return out;
}

void WriteLog(const std::string& path, const TrainingLog& log) {
  if (path.empty()) return;
  std::ofstream out = OpenOutput(path);
  WriteTrainingLog(out, log);
}

void TrainMol(const Common& common, const std::string& pairs_path,
              const std::string& eval_path, const std::string& drugs_path,
              const std::string& out_path, const std::string& log_path,
              const std::string& report_path, std::ostream& out,
              std::ostream& err) {
  const ExperimentConfig config = common.Load();
  const std::map<std::string, MolGraph> graphs =
      ParseGraphs(LoadDrugTable(drugs_path), config, err);
  const std::vector<MolPairExample> train =
      ToExamples(LoadPairs(pairs_path), graphs, err);
  std::vector<MolPairExample> heldout;
  if (!eval_path.empty()) heldout = ToExamples(LoadPairs(eval_path), graphs, err);

  std::set<const MolGraph*> used;
  for (const MolPairExample& e : train) used.insert({e.first, e.second});
  std::vector<const MolGraph*> vocab_graphs;
  for (const auto& [id, graph] : graphs) {
    if (used.count(&graph)) vocab_graphs.push_back(&graph);
  }
  const MolTrainResult result = TrainMolecular(
      train, heldout, AtomVocabulary::Build(vocab_graphs), config, &err);
  result.model.Save(out_path);
  WriteLog(log_path, result.log);

  ordered_json report;
  report["encoder"] = EncoderKindName(config.encoder);
  report["train_pairs"] = train.size();
  report["train"] = EvaluateMolecular(result.model, train).report.ToJson();
  if (!heldout.empty()) {
    report["eval_pairs"] = heldout.size();
    report["eval"] = EvaluateMolecular(result.model, heldout).report.ToJson();
  }
  if (!report_path.empty()) WriteJson(report_path, report);
  out << report.dump(2) << '\n';
}

Vocabulary LoadVocabulary(const std::string& path) {
  std::ifstream in = OpenInput(path);
  return ReadVocabulary(in);
}

std::vector<TextInstance> FeaturizeAll(const std::vector<MaskedInstance>& masked,
                                       const Vocabulary& vocab, int clip) {
  std::vector<TextInstance> out;
  out.reserve(masked.size());
  for (const MaskedInstance& m : masked) out.push_back(Featurize(m, vocab, clip));
  return out;
}

std::string Resolve(const std::string& flag, const std::string& fallback) {
  return flag.empty() ? fallback : flag;
}

// The stage-1 model for modes that use molecule features. Checks it agrees
// with the configuration.
MolecularModel LoadMolModel(const ExperimentConfig& config,
                            const std::string& path) {
  if (path.empty()) {
    throw ConfigError(std::string("mode ") + ModeName(config.mode) +
                      " needs a molecular checkpoint (--mol-model or "
                      "mol_checkpoint)");
  }
  MolecularModel model = MolecularModel::Load(path);
  if (model.config().encoder != config.encoder) {
    throw ConfigError(fmt::format("checkpoint {} uses the {} encoder but the "
                                  "configuration asks for {}",
                                  path, EncoderKindName(model.config().encoder),
                                  EncoderKindName(config.encoder)));
  }
  if (model.config().dim != config.mol_dim) {
    throw ConfigError(fmt::format("checkpoint {} has dimension {}, configuration "
                                  "has mol_dim {}",
                                  path, model.config().dim, config.mol_dim));
  }
  return model;
}

const std::string& RequireDrugs(const std::string& path) {
  if (path.empty()) {
    throw ConfigError("molecule features need the drug table (--drugs)");
  }
  return path;
}

void TrainTextCommand(const Common& common, const std::string& train_path,
                      const std::string& vocab_path, const std::string& drugs_path,
                      const std::string& mol_path, const std::string& out_path,
                      const std::string& log_path, std::ostream& out,
                      std::ostream& err) {
  const ExperimentConfig config = common.Load();
  if (config.mode == Mode::kMolBinary) {
    throw ConfigError("mode mol-binary has no text model; use train-mol and "
                      "predict");
  }
  const Vocabulary vocab = LoadVocabulary(vocab_path);
  const std::vector<TextInstance> instances =
      FeaturizeAll(LoadInstances(train_path), vocab, config.position_clip);

  std::optional<MolecularModel> mol;
  std::optional<MoleculeFeatures> features;
  if (config.MoleculeFeatureDim() > 0) {
    mol.emplace(LoadMolModel(config, Resolve(mol_path, config.mol_checkpoint)));
    features.emplace(MoleculeFeatures::Compute(
        *mol, ParseGraphs(LoadDrugTable(RequireDrugs(drugs_path)), config, err)));
  }

  Rng rng(config.seed);
  TextModel initial(config.TextConfig(vocab.size()), rng);
  if (!config.embeddings_path.empty()) {
    Tensor table = initial.weights().word_embedding;
    InitializeWordEmbeddings(table, vocab, LoadEmbeddings(config.embeddings_path));
  }
  TextTrainResult result =
      TrainText(instances, std::move(initial), features ? &*features : nullptr,
                config, mol ? &*mol : nullptr, &err);

  ordered_json extra;
  extra["mode"] = ModeName(config.mode);
  extra["encoder"] = EncoderKindName(config.encoder);
  result.model.Save(out_path, extra);
  WriteLog(log_path, result.log);

  ordered_json summary;
  summary["mode"] = ModeName(config.mode);
  summary["instances"] = instances.size();
  summary["epochs"] = config.text_epochs;
  summary["negative_offset"] = result.model.negative_offset();
  if (!result.log.empty()) {
    const EpochRecord& last = result.log.back();
    summary["final_" + last.split + "_f"] = last.f_score;
  }
  out << summary.dump(2) << '\n';
}

void PredictCommand(const Common& common, const std::string& instances_path,
                    const std::string& vocab_path, const std::string& model_path,
                    const std::string& drugs_path, const std::string& mol_path,
                    const std::string& out_path, std::ostream& out,
                    std::ostream& err) {
  const ExperimentConfig config = common.Load();
  const std::vector<MaskedInstance> masked = LoadInstances(instances_path);
  std::ofstream file = OpenOutput(out_path);

  if (config.mode == Mode::kMolBinary) {
    const MolecularModel mol =
        LoadMolModel(config, Resolve(mol_path, config.mol_checkpoint));
    const auto graphs =
        ParseGraphs(LoadDrugTable(RequireDrugs(drugs_path)), config, err);
    std::vector<TextInstance> instances;
    for (const MaskedInstance& m : masked) {
      TextInstance t;
      t.pair_id = m.pair_id;
      t.label = m.label;
      t.drug1_id = m.drug1_id;
      t.drug2_id = m.drug2_id;
      instances.push_back(std::move(t));
    }
    const auto predictions = PredictBinary(instances, mol, graphs);
    WriteBinaryPredictions(file, predictions);
    out << predictions.size() << " binary predictions written to " << out_path
        << '\n';
    return;
  }

  const std::string text_path = Resolve(model_path, config.text_checkpoint);
  if (text_path.empty()) {
    throw ConfigError("predict needs a text checkpoint (--model or "
                      "text_checkpoint)");
  }
  ordered_json extra;
  const TextModel model = TextModel::Load(text_path, &extra);
  if (extra.contains("mode") && extra["mode"] != ModeName(config.mode)) {
    throw ConfigError(fmt::format("checkpoint {} was trained in mode {}, "
                                  "configuration says {}",
                                  text_path, extra["mode"].get<std::string>(),
                                  ModeName(config.mode)));
  }
  const Vocabulary vocab = LoadVocabulary(vocab_path);
  if (vocab.size() != model.config().vocab_size) {
    throw DataError(fmt::format("vocabulary has {} rows, checkpoint expects {}",
                                vocab.size(), model.config().vocab_size));
  }
  const std::vector<TextInstance> instances =
      FeaturizeAll(masked, vocab, model.config().position_clip);
  std::optional<MoleculeFeatures> features;
  if (model.config().molecule_dim > 0) {
    const MolecularModel mol =
        LoadMolModel(config, Resolve(mol_path, config.mol_checkpoint));
    features.emplace(MoleculeFeatures::Compute(
        mol, ParseGraphs(LoadDrugTable(RequireDrugs(drugs_path)), config, err)));
  }
  const auto predictions =
      PredictText(instances, model, features ? &*features : nullptr);
  WritePredictions(file, predictions);
  out << predictions.size() << " predictions written to " << out_path << '\n';
}

struct PredictionRow {
  std::string pair_id;
  Label gold = Label::kNegative;
  std::string predicted;
};

// Reads either prediction layout; pred is kept as text.
std::vector<PredictionRow> ReadPredictionRows(const std::string& path) {
  std::ifstream in = OpenInput(path);
  std::vector<PredictionRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("pair_id\t", 0) == 0) continue;
    std::vector<std::string> fields;
    std::istringstream split(line);
    for (std::string f; std::getline(split, f, '\t');) fields.push_back(f);
    if (fields.size() < 3) {
      throw DataError(fmt::format("{}:{}: expected pair_id, gold and pred",
                                  path, line_no));
    }
    rows.push_back({fields[0], ParseLabel(fields[1]), fields[2]});
  }
  return rows;
}

bool IsBinaryPrediction(const std::string& pred) {
  return pred == "Positive";
}

ordered_json EvaluateRows(const std::vector<PredictionRow>& rows) {
  const bool binary = std::any_of(rows.begin(), rows.end(), [](const auto& r) {
    return IsBinaryPrediction(r.predicted);
  });
  std::vector<Label> gold;
  std::vector<uint8_t> positive;
  std::vector<Label> predicted;
  for (const PredictionRow& r : rows) {
    gold.push_back(r.gold);
    if (binary) {
      if (r.predicted != "Positive" && r.predicted != "Negative") {
        throw DataError("mixed binary and typed predictions for " + r.pair_id);
      }
      positive.push_back(r.predicted == "Positive");
    } else {
      predicted.push_back(ParseLabel(r.predicted));
      positive.push_back(IsPositive(predicted.back()));
    }
  }
  const std::unique_ptr<bool[]> flags(new bool[positive.size()]);
  std::copy(positive.begin(), positive.end(), flags.get());
  ordered_json report;
  report["instances"] = rows.size();
  report["kind"] = binary ? "binary" : "typed";
  if (!binary) report["micro"] = MicroPrf(gold, predicted).ToJson();
  report["detection"] =
      BinaryDetectionEval(gold, {flags.get(), positive.size()}).ToJson();
  return report;
}

void EvalCommand(const Common& common, const std::string& predictions_path,
                 const std::string& out_path, std::ostream& out) {
  common.Load();
  const ordered_json report = EvaluateRows(ReadPredictionRows(predictions_path));
  if (!out_path.empty()) WriteJson(out_path, report);
  out << report.dump(2) << '\n';
}

void SignificanceCommand(const Common& common, const std::string& a_path,
                         const std::string& b_path, int rounds,
                         const std::string& out_path, std::ostream& out) {
  const ExperimentConfig config = common.Load();
  if (rounds <= 0) rounds = config.randomization_rounds;
  const std::vector<Prediction> a = LoadPredictions(a_path);
  const std::vector<Prediction> b = LoadPredictions(b_path);
  if (a.size() != b.size()) {
    throw DataError(fmt::format("{} has {} predictions, {} has {}", a_path,
                                a.size(), b_path, b.size()));
  }
  std::vector<Label> gold, pa, pb;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].pair_id != b[i].pair_id || a[i].gold != b[i].gold) {
      throw DataError(fmt::format("prediction files disagree at row {} ({} vs {})",
                                  i + 1, a[i].pair_id, b[i].pair_id));
    }
    gold.push_back(a[i].gold);
    pa.push_back(a[i].predicted);
    pb.push_back(b[i].predicted);
  }
  ordered_json report;
  report["instances"] = a.size();
  report["rounds"] = rounds;
  report["seed"] = config.seed;
  report["f_a"] = MicroPrf(gold, pa).f_score;
  report["f_b"] = MicroPrf(gold, pb).f_score;
  report["p_value"] = RandomizationTest(gold, pa, pb, rounds, config.seed);
  if (!out_path.empty()) WriteJson(out_path, report);
  out << report.dump(2) << '\n';
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app("Drug-drug interaction extraction with text and molecule "
               "encoders",
               "molfuse");
  app.require_subcommand(1);

  Common common;
  std::string drugs, out_path, log_path, report_path, mol_path, vocab_path;

  std::vector<std::string> train_xml, test_xml;
  std::string interactions;
  CLI::App* prepare = app.add_subcommand(
      "prepare", "Corpus XML and drug tables to instance, pair and vocabulary files");
  AddCommon(prepare, &common);
  prepare->add_option("--train-xml", train_xml, "Training XML files or directories")
      ->required();
  prepare->add_option("--test-xml", test_xml, "Test XML files or directories")
      ->required();
  prepare->add_option("--drugs", drugs, "Drug table TSV")->required();
  prepare->add_option("--interactions", interactions, "Known interacting pairs TSV")
      ->required();
  prepare->add_option("--out", out_path, "Output directory")->required();

  std::string pairs_path, eval_pairs;
  CLI::App* train_mol =
      app.add_subcommand("train-mol", "Train the molecular pair classifier");
  AddCommon(train_mol, &common);
  train_mol->add_option("--pairs", pairs_path, "Training pairs")->required();
  train_mol->add_option("--eval-pairs", eval_pairs, "Evaluation pairs");
  train_mol->add_option("--drugs", drugs, "Drug table TSV")->required();
  train_mol->add_option("--out", out_path, "Checkpoint to write")->required();
  train_mol->add_option("--log", log_path, "Per-epoch log TSV");
  train_mol->add_option("--report", report_path, "Evaluation report JSON");

  std::string train_path;
  CLI::App* train_text =
      app.add_subcommand("train-text", "Train the text (or fused) classifier");
  AddCommon(train_text, &common);
  train_text->add_option("--train", train_path, "Training instances")->required();
  train_text->add_option("--vocab", vocab_path, "Vocabulary TSV")->required();
  train_text->add_option("--drugs", drugs, "Drug table TSV");
  train_text->add_option("--mol-model", mol_path, "Molecular checkpoint");
  train_text->add_option("--out", out_path, "Checkpoint to write")->required();
  train_text->add_option("--log", log_path, "Per-epoch log TSV");

  std::string instances_path, model_path;
  CLI::App* predict = app.add_subcommand("predict", "Write a prediction file");
  AddCommon(predict, &common);
  predict->add_option("--instances", instances_path, "Instances to label")
      ->required();
  predict->add_option("--vocab", vocab_path, "Vocabulary TSV");
  predict->add_option("--model", model_path, "Text checkpoint");
  predict->add_option("--drugs", drugs, "Drug table TSV");
  predict->add_option("--mol-model", mol_path, "Molecular checkpoint");
  predict->add_option("--out", out_path, "Prediction TSV")->required();

  std::string predictions_path;
  CLI::App* eval = app.add_subcommand("eval", "Score a prediction file");
  AddCommon(eval, &common);
  eval->add_option("--predictions", predictions_path, "Prediction TSV")->required();
  eval->add_option("--out", out_path, "Report JSON");

  std::string a_path, b_path;
  int rounds = 0;
  CLI::App* significance = app.add_subcommand(
      "significance", "Approximate randomization test between two systems");
  AddCommon(significance, &common);
  significance->add_option("--a", a_path, "Predictions of system A")->required();
  significance->add_option("--b", b_path, "Predictions of system B")->required();
  significance->add_option("--rounds", rounds, "Rounds (default from config)");
  significance->add_option("--out", out_path, "Report JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfigError;
  }

  try {
    if (prepare->parsed()) {
      Prepare(common, train_xml, test_xml, drugs, interactions, out_path, out, err);
    } else if (train_mol->parsed()) {
      TrainMol(common, pairs_path, eval_pairs, drugs, out_path, log_path,
               report_path, out, err);
    } else if (train_text->parsed()) {
      if (vocab_path.empty()) throw ConfigError("--vocab is required");
      TrainTextCommand(common, train_path, vocab_path, drugs, mol_path, out_path,
                       log_path, out, err);
    } else if (predict->parsed()) {
      PredictCommand(common, instances_path, vocab_path, model_path, drugs,
                     mol_path, out_path, out, err);
    } else if (eval->parsed()) {
      EvalCommand(common, predictions_path, out_path, out);
    } else if (significance->parsed()) {
      SignificanceCommand(common, a_path, b_path, rounds, out_path, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace cli
}  // namespace molfuse
