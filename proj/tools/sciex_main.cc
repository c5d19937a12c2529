// Copyright 2026 The sciex Authors.
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

// sciex: command-line front end for the extraction toolkit.
//
//   sciex [--config run.json] [--seed N] [--threads N] [--format json|text]
//         <command> [options]
//
// The config file is a JSON object. Top-level keys set global options and
// an object keyed by a command name sets that command's options, e.g.
//   {"seed": 7, "train-ner": {"epochs": 30, "source": "sparse-features"}}
// Flags given on the command line win over the config file.
//
// Exit status: 0 success, 1 usage or validation error, 2 I/O or format
// error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sciex/active.h"
#include "sciex/corpus.h"
#include "sciex/corpus_io.h"
#include "sciex/crf.h"
#include "sciex/errors.h"
#include "sciex/eval.h"
#include "sciex/relation.h"
#include "sciex/schema_map.h"

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

// Reads CLI11 configuration from JSON. Nested objects become sections.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App *app, bool default_also, bool,
                        std::string) const override {
    ordered_json j;
    for (const CLI::Option *opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames()[0];
      if (opt->count() > 0) {
        j[name] = opt->as<std::string>();
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream &input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception &e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) {
      throw CLI::ConversionError("config file must hold a JSON object");
    }
    std::vector<CLI::ConfigItem> items;
    Flatten(j, {}, items);
    return items;
  }

 private:
  static void Flatten(const nlohmann::json &j,
                      const std::vector<std::string> &parents,
                      std::vector<CLI::ConfigItem> &items) {
    for (const auto &[key, value] : j.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        Flatten(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto &v : value) item.inputs.push_back(Scalar(v));
      } else {
        item.inputs.push_back(Scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string Scalar(const nlohmann::json &v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("unsupported config value " + v.dump());
  }
};

struct Globals {
  std::uint64_t seed = 13;
  int threads = 1;
  std::string format = "json";
};

// Every option of `sub` with its effective value, for provenance.
ordered_json EffectiveConfig(const CLI::App *sub) {
  ordered_json j = ordered_json::object();
  for (const CLI::Option *opt : sub->get_options({})) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames()[0];
    if (name == "help") continue;
    std::vector<std::string> values = opt->results();
    if (values.empty()) {
      std::string def = opt->get_default_str();
      if (def.empty()) continue;
      if (def.size() >= 2 && def.front() == '[' && def.back() == ']') {
        std::stringstream items(def.substr(1, def.size() - 2));
        for (std::string item; std::getline(items, item, ',');) {
          values.push_back(item);
        }
        if (opt->get_expected_max() > 1) {
          j[name] = values;
          continue;
        }
      } else {
        values = {def};
      }
    }
    if (opt->get_expected_max() > 1) {
      j[name] = values;
      continue;
    }
    ordered_json parsed = ordered_json::array();
    for (const auto &v : values) {
      auto as_json = ordered_json::parse(v, nullptr, false);
      if (as_json.is_discarded() || as_json.is_object() || as_json.is_array()) {
        parsed.push_back(v);
      } else {
        parsed.push_back(as_json);
      }
    }
    j[name] = parsed.size() == 1 ? parsed[0] : parsed;
  }
  return j;
}

ordered_json Meta(const CLI::App *sub, const Globals &g) {
  ordered_json meta;
  meta["tool_version"] = sciex::kToolVersion;
  meta["command"] = sub->get_name();
  meta["config"] = EffectiveConfig(sub);
  meta["seed"] = g.seed;
  return meta;
}

void WriteJson(const std::string &path, const ordered_json &j) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    sciex::WriteFile(path, text);
  }
}

std::ofstream OpenOut(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sciex::IoError("cannot write " + path);
  return out;
}

void PrintDiagnostics(const sciex::Diagnostics &d) {
  for (const auto &w : d.warnings) std::cerr << "warning: " << w << "\n";
}

ordered_json DiagnosticsJson(const sciex::Diagnostics &d) {
  return {{"ignored_lines", d.ignored_lines},
          {"surface_mismatches", d.surface_mismatches},
          {"cross_sentence_relations", d.cross_sentence_relations},
          {"clipped_entities", d.clipped_entities},
          {"empty_entities", d.empty_entities},
          {"overlapping_entities", d.overlapping_entities},
          {"orphaned_relations", d.orphaned_relations}};
}

std::vector<sciex::AnnotatedSentence> ToSentences(
    const std::vector<sciex::Document> &docs, sciex::Diagnostics *diag) {
  std::vector<sciex::AnnotatedSentence> out;
  for (const auto &doc : docs) {
    auto s = sciex::SentenceSplitAndTokenize(doc, diag);
    out.insert(out.end(), std::make_move_iterator(s.begin()),
               std::make_move_iterator(s.end()));
  }
  return out;
}

std::vector<sciex::AnnotatedSentence> LoadBrat(const std::string &dir,
                                               bool byte_offsets,
                                               sciex::Diagnostics *diag) {
  sciex::ParseOptions options;
  if (byte_offsets) options.offsets = sciex::OffsetUnit::kByte;
  std::vector<sciex::Document> docs;
  for (const auto &raw : sciex::ReadBratDirectory(dir, options, diag)) {
    docs.push_back(sciex::Canonicalize(raw));
  }
  return ToSentences(docs, diag);
}

// Options shared by the two training commands.
struct SourceOptions {
  std::string source = "sparse-features";
  int dim = 64;
  std::string store;

  void Add(CLI::App *sub) {
    sub->add_option("--source", source,
                    "representation: sparse-features, trainable-embeddings, store")
        ->capture_default_str();
    sub->add_option("--dim", dim, "representation width")->capture_default_str();
    sub->add_option("--store", store, "TKV1 embedding file for --source store");
  }

  sciex::SourceConfig Config() const {
    sciex::SourceConfig c;
    c.kind = sciex::ParseSourceKind(source);
    c.dim = dim;
    c.store_path = store;
    if (c.kind == sciex::SourceKind::kStore && store.empty()) {
      throw sciex::ValidationError("--source store requires --store");
    }
    return c;
  }
};

struct OptimOptions {
  int epochs = 50;
  int batch_size = 8;
  int patience = 5;
  double lr = 1e-3;
  bool mixer = false;

  void Add(CLI::App *sub) {
    sub->add_option("--epochs", epochs, "maximum epochs")->capture_default_str();
    sub->add_option("--batch-size", batch_size, "sentences per update (0: full batch)")
        ->capture_default_str();
    sub->add_option("--patience", patience, "early-stopping patience")
        ->capture_default_str();
    sub->add_option("--lr", lr, "Adam step size")->capture_default_str();
    sub->add_flag("--mixer", mixer, "enable the 3-token window mixing layer");
  }
};

void WriteEpochLog(const std::string &path, const ordered_json &meta,
                   const std::vector<std::pair<double, double>> &epochs,
                   int best_epoch) {
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    std::cerr << "epoch " << (i + 1) << " loss " << epochs[i].first
              << " dev_f1 " << epochs[i].second << "\n";
  }
  std::cerr << "best epoch " << best_epoch << "\n";
  if (path.empty()) return;
  std::ofstream out = OpenOut(path);
  out << ordered_json{{"meta", meta}}.dump() << "\n";
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    ordered_json j;
    j["epoch"] = i + 1;
    j["loss"] = epochs[i].first;
    if (std::isnan(epochs[i].second)) {
      j["dev_f1"] = nullptr;
    } else {
      j["dev_f1"] = epochs[i].second;
    }
    out << j.dump() << "\n";
  }
}

std::vector<sciex::AnnotatedSentence> ReadOptional(const std::string &path) {
  if (path.empty()) return {};
  return sciex::ReadCorpusJsonl(fs::path(path));
}

std::string ReportText(const sciex::EvalReport &r) {
  std::ostringstream out;
  out << "entities (" << sciex::RegimeName(r.regime) << ", "
      << (r.labeled ? "labeled" : "unlabeled") << ")\n"
      << "  COR " << r.counts.cor << "  INC " << r.counts.inc << "  PAR "
      << r.counts.par << "  MIS " << r.counts.mis << "  SPU " << r.counts.spu
      << "\n  P " << r.precision << "  R " << r.recall << "  F1 " << r.f1
      << "\n";
  return out.str();
}

std::string ReportText(const sciex::RelationReport &r) {
  std::ostringstream out;
  out << "relations (" << (r.labeled ? "labeled" : "unlabeled") << ")\n"
      << "  TP " << r.counts.tp << "  FP " << r.counts.fp << "  FN "
      << r.counts.fn << "\n  P " << r.precision << "  R " << r.recall
      << "  F1 " << r.f1 << "\n";
  return out.str();
}

std::map<std::string, int> TypeCounts(
    const std::vector<sciex::AnnotatedSentence> &sentences, bool relations) {
  const auto stats = sciex::ComputeCorpusStats(sentences);
  return relations ? stats.relation_types : stats.entity_types;
}

int Run(int argc, char **argv) {
  CLI::App app{"Scientific-abstract information extraction toolkit", "sciex"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON run configuration");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", sciex::kToolVersion);

  Globals g;
  app.add_option("--seed", g.seed, "seed for every random choice")
      ->capture_default_str();
  app.add_option("--threads", g.threads, "maximum worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--format", g.format, "report format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();

  // convert
  auto *convert = app.add_subcommand("convert", "BRAT directory to JSON Lines corpus");
  std::string brat_dir, out_path, conll_path;
  bool byte_offsets = false;
  convert->add_option("--brat", brat_dir, "directory of .txt/.ann pairs")
      ->required()
      ->check(CLI::ExistingDirectory);
  convert->add_option("--out", out_path, "output corpus (.jsonl)")->required();
  convert->add_option("--conll", conll_path, "also write token/tag columns");
  convert->add_flag("--byte-offsets", byte_offsets,
                    "interpret standoff offsets as UTF-8 bytes");

  // stats
  auto *stats = app.add_subcommand("stats", "corpus statistics");
  std::string stats_in, stats_brat, stats_out;
  auto *stats_in_opt = stats->add_option("--in", stats_in, "corpus (.jsonl)");
  stats->add_option("--brat", stats_brat, "BRAT directory")->excludes(stats_in_opt);
  stats->add_option("--out", stats_out, "report path (default stdout)");
  stats->add_flag("--byte-offsets", byte_offsets,
                  "interpret standoff offsets as UTF-8 bytes");

  // split
  auto *split = app.add_subcommand("split", "seeded 50/25/25 split by abstract");
  std::string split_in, split_dir;
  split->add_option("--in", split_in, "corpus (.jsonl)")->required();
  split->add_option("--out-dir", split_dir,
                    "directory for train/dev/test.jsonl (default: next to --in)");

  // train-ner
  auto *train_ner = app.add_subcommand("train-ner", "train the CRF entity tagger");
  std::string train_path, dev_path, model_out, log_path;
  SourceOptions ner_source;
  OptimOptions ner_optim;
  bool no_boundary = false;
  train_ner->add_option("--train", train_path, "training corpus")->required();
  train_ner->add_option("--dev", dev_path, "dev corpus for early stopping");
  train_ner->add_option("--out", model_out, "model file (.json)")->required();
  train_ner->add_option("--log", log_path, "per-epoch training log (.jsonl)");
  train_ner->add_flag("--no-boundary", no_boundary, "disable begin/end scores");
  ner_source.Add(train_ner);
  ner_optim.Add(train_ner);

  // train-rel
  auto *train_rel = app.add_subcommand("train-rel", "train the relation classifier");
  SourceOptions rel_source;
  OptimOptions rel_optim;
  double none_ratio = 5.0;
  double threshold = 0.5;
  train_rel->add_option("--train", train_path, "training corpus")->required();
  train_rel->add_option("--dev", dev_path, "dev corpus for early stopping");
  train_rel->add_option("--out", model_out, "model file (.json)")->required();
  train_rel->add_option("--log", log_path, "per-epoch training log (.jsonl)");
  train_rel->add_option("--none-ratio", none_ratio,
                        "NONE pairs kept per related pair each epoch (<= 0: all)")
      ->capture_default_str();
  train_rel->add_option("--threshold", threshold, "decoding threshold for dev scoring")
      ->capture_default_str();
  rel_source.Add(train_rel);
  rel_optim.Add(train_rel);

  // predict
  auto *predict = app.add_subcommand("predict", "tag entities and/or relations");
  std::string predict_in, ner_model, rel_model, predict_out, relations_out;
  double predict_threshold = 0.5;
  predict->add_option("--in", predict_in, "corpus (.jsonl)")->required();
  predict->add_option("--ner-model", ner_model, "CRF model; omit to keep input entities");
  predict->add_option("--rel-model", rel_model, "relation model");
  predict->add_option("--out", predict_out, "predicted corpus (.jsonl)")->required();
  predict->add_option("--relations-out", relations_out,
                      "relation predictions with probabilities (.jsonl)");
  predict->add_option("--threshold", predict_threshold, "relation threshold")
      ->capture_default_str();

  // eval
  auto *eval = app.add_subcommand("eval", "score predictions against gold");
  std::string gold_path, pred_path, regime = "exact", eval_out, train_counts,
                                    dev_counts;
  bool labeled = false, unlabeled = false, with_relations = false,
       breakdown = false;
  int min_count = 20;
  eval->add_option("--gold", gold_path, "gold corpus")->required();
  eval->add_option("--pred", pred_path, "predicted corpus")->required();
  eval->add_option("--regime", regime, "exact, relaxed or overlap")
      ->check(CLI::IsMember({"exact", "relaxed", "overlap"}))
      ->capture_default_str();
  auto *labeled_opt = eval->add_flag("--labeled", labeled, "require type match (default)");
  eval->add_flag("--unlabeled", unlabeled, "ignore types")->excludes(labeled_opt);
  eval->add_flag("--relations", with_relations, "also score relations");
  eval->add_flag("--breakdown", breakdown, "per-type table");
  eval->add_option("--train-corpus", train_counts, "train split for breakdown counts");
  eval->add_option("--dev-corpus", dev_counts, "dev split for breakdown counts");
  eval->add_option("--min-count", min_count, "breakdown occurrence threshold")
      ->capture_default_str();
  eval->add_option("--out", eval_out, "report path (default stdout)");

  // map-schema
  auto *map_schema = app.add_subcommand("map-schema", "relabel a foreign corpus");
  std::string preset, mapping_path, map_out, dropped_path, map_brat;
  map_schema->add_option("--brat", map_brat, "BRAT directory in the source schema")
      ->required()
      ->check(CLI::ExistingDirectory);
  auto *preset_opt = map_schema->add_option("--preset", preset, "built-in mapping");
  map_schema->add_option("--mapping", mapping_path, "mapping JSON file")
      ->excludes(preset_opt);
  map_schema->add_option("--out", map_out, "mapped corpus (.jsonl)")->required();
  map_schema->add_option("--dropped", dropped_path, "audit log of dropped items (.jsonl)");
  map_schema->add_flag("--byte-offsets", byte_offsets,
                       "interpret standoff offsets as UTF-8 bytes");

  // select
  auto *select = app.add_subcommand("select", "choose sentences to annotate");
  std::string select_in, strategy = "AL", uncertainty = "entropy", worklist_out,
                         plan_out;
  double ratio = 0.4;
  int cycle = 0;
  select->add_option("--in", select_in, "corpus of the cycle's abstracts")->required();
  select->add_option("--strategy", strategy, "FULL, RAND or AL")->capture_default_str();
  select->add_option("--ratio", ratio, "fraction of sentences per abstract")
      ->capture_default_str();
  select->add_option("--ner-model", ner_model, "CRF model (AL)");
  select->add_option("--rel-model", rel_model,
                     "relation model whose uncertainty is added (AL)");
  select->add_option("--uncertainty", uncertainty, "entropy or viterbi")
      ->capture_default_str();
  select->add_option("--cycle", cycle, "cycle number recorded in the plan")
      ->capture_default_str();
  select->add_option("--out", worklist_out, "worklist (.jsonl)")->required();
  select->add_option("--plan", plan_out, "selection plan (.json)");

  // curve
  auto *curve = app.add_subcommand("curve", "simulate annotation learning curves");
  std::vector<std::string> strategies = {"FULL", "RAND", "AL"};
  int num_seeds = 1;
  int cycle_size = 4;
  bool curve_relations = false, shuffle_abstracts = false,
       relation_uncertainty = false;
  std::string curve_out;
  SourceOptions curve_source;
  OptimOptions curve_optim;
  curve->add_option("--train", train_path, "fully annotated pool")->required();
  curve->add_option("--dev", dev_path, "dev corpus")->required();
  curve->add_option("--strategy", strategies, "strategies to simulate")
      ->capture_default_str();
  curve->add_option("--seeds", num_seeds, "number of seeds (seed, seed+1, ...)")
      ->capture_default_str();
  curve->add_option("--cycle-size", cycle_size, "abstracts per cycle")
      ->capture_default_str();
  curve->add_option("--ratio", ratio, "selection ratio")->capture_default_str();
  curve->add_option("--uncertainty", uncertainty, "entropy or viterbi")
      ->capture_default_str();
  curve->add_flag("--relations", curve_relations, "also train and score relations");
  curve->add_flag("--relation-uncertainty", relation_uncertainty,
                  "AL adds mean relation entropy (needs --relations)");
  curve->add_flag("--shuffle-abstracts", shuffle_abstracts,
                  "consume abstracts in seeded order instead of corpus order");
  curve->add_option("--out", curve_out, "curve (.csv)")->required();
  curve_source.Add(curve);
  curve_optim.Add(curve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e, std::cerr, std::cerr);
    return 1;
  }

  const bool text = g.format == "text";

  if (convert->parsed()) {
    sciex::Diagnostics diag;
    const auto sentences = LoadBrat(brat_dir, byte_offsets, &diag);
    PrintDiagnostics(diag);
    ordered_json meta = Meta(convert, g);
    meta["diagnostics"] = DiagnosticsJson(diag);
    sciex::WriteCorpusJsonl(fs::path(out_path), sentences, meta);
    if (!conll_path.empty()) {
      std::ofstream out = OpenOut(conll_path);
      sciex::WriteConll(out, sentences);
    }
    std::cerr << "wrote " << sentences.size() << " sentences to " << out_path << "\n";
    return 0;
  }

  if (stats->parsed()) {
    if (stats_in.empty() && stats_brat.empty()) {
      throw sciex::ValidationError("stats needs --in or --brat");
    }
    sciex::Diagnostics diag;
    const auto sentences = stats_in.empty()
                               ? LoadBrat(stats_brat, byte_offsets, &diag)
                               : sciex::ReadCorpusJsonl(fs::path(stats_in));
    const auto s = sciex::ComputeCorpusStats(sentences);
    if (text) {
      std::ostringstream out;
      out << "abstracts " << s.abstracts << "\nsentences " << s.sentences
          << "\ntokens " << s.tokens << "\nentities " << s.entities
          << "\nrelations " << s.relations << "\n";
      for (const auto &[t, n] : s.entity_types) out << "entity " << t << " " << n << "\n";
      for (const auto &[t, n] : s.relation_types) out << "relation " << t << " " << n << "\n";
      if (stats_out.empty()) {
        std::cout << out.str();
      } else {
        sciex::WriteFile(stats_out, out.str());
      }
      return 0;
    }
    ordered_json j;
    j["meta"] = Meta(stats, g);
    j["abstracts"] = s.abstracts;
    j["sentences"] = s.sentences;
    j["tokens"] = s.tokens;
    j["entities"] = s.entities;
    j["relations"] = s.relations;
    j["entity_types"] = s.entity_types;
    j["relation_types"] = s.relation_types;
    if (!stats_brat.empty()) j["diagnostics"] = DiagnosticsJson(diag);
    WriteJson(stats_out, j);
    return 0;
  }

  if (split->parsed()) {
    const auto sentences = sciex::ReadCorpusJsonl(fs::path(split_in));
    const auto parts = sciex::SplitCorpus(sentences, g.seed);
    const fs::path dir = split_dir.empty() ? fs::path(split_in).parent_path()
                                           : fs::path(split_dir);
    if (!dir.empty()) fs::create_directories(dir);
    const ordered_json meta = Meta(split, g);
    const std::pair<const char *, const std::vector<sciex::AnnotatedSentence> *>
        outputs[] = {{"train", &parts.train}, {"dev", &parts.dev}, {"test", &parts.test}};
    for (const auto &[name, part] : outputs) {
      ordered_json m = meta;
      m["part"] = name;
      sciex::WriteCorpusJsonl(dir / (std::string(name) + ".jsonl"), *part, m);
      std::cerr << name << ": " << sciex::DocumentOrder(*part).size()
                << " abstracts, " << part->size() << " sentences\n";
    }
    return 0;
  }

  if (train_ner->parsed()) {
    const auto train = sciex::ReadCorpusJsonl(fs::path(train_path));
    const auto dev = ReadOptional(dev_path);
    sciex::NerTrainConfig config;
    config.source = ner_source.Config();
    config.adam.step = ner_optim.lr;
    config.batch_size = ner_optim.batch_size;
    config.max_epochs = ner_optim.epochs;
    config.patience = ner_optim.patience;
    config.use_mixer = ner_optim.mixer;
    config.boundary = !no_boundary;
    sciex::NerTrainLog log;
    sciex::CrfModel model = sciex::TrainNer(train, dev, config, g.seed, &log);
    const ordered_json meta = Meta(train_ner, g);
    model.training_config["run"] = meta;
    model.Save(model_out);
    std::vector<std::pair<double, double>> epochs;
    for (const auto &e : log.epochs) epochs.emplace_back(e.loss, e.dev_f1);
    WriteEpochLog(log_path, meta, epochs, log.best_epoch);
    return 0;
  }

  if (train_rel->parsed()) {
    const auto train = sciex::ReadCorpusJsonl(fs::path(train_path));
    const auto dev = ReadOptional(dev_path);
    sciex::RelTrainConfig config;
    config.source = rel_source.Config();
    config.adam.step = rel_optim.lr;
    config.batch_size = rel_optim.batch_size;
    config.max_epochs = rel_optim.epochs;
    config.patience = rel_optim.patience;
    config.use_mixer = rel_optim.mixer;
    config.none_ratio = none_ratio;
    config.threshold = threshold;
    sciex::RelTrainLog log;
    sciex::RelModel model = sciex::TrainRel(train, dev, config, g.seed, &log);
    const ordered_json meta = Meta(train_rel, g);
    model.training_config["run"] = meta;
    model.Save(model_out);
    std::vector<std::pair<double, double>> epochs;
    for (const auto &e : log.epochs) epochs.emplace_back(e.loss, e.dev_f1);
    WriteEpochLog(log_path, meta, epochs, log.best_epoch);
    return 0;
  }

  if (predict->parsed()) {
    if (ner_model.empty() && rel_model.empty()) {
      throw sciex::ValidationError("predict needs --ner-model and/or --rel-model");
    }
    auto sentences = sciex::ReadCorpusJsonl(fs::path(predict_in));
    if (!ner_model.empty()) {
      const sciex::CrfModel model = sciex::CrfModel::Load(ner_model);
      auto entities = sciex::PredictCorpusEntities(model, sentences, g.threads);
      for (std::size_t i = 0; i < sentences.size(); ++i) {
        sentences[i].entities = std::move(entities[i]);
        sentences[i].relations.clear();
      }
    }
    std::vector<std::vector<sciex::RelationPrediction>> rels;
    if (!rel_model.empty()) {
      const sciex::RelModel model = sciex::RelModel::Load(rel_model);
      rels = sciex::PredictCorpusRelations(model, sentences, predict_threshold,
                                           g.threads);
      for (std::size_t i = 0; i < sentences.size(); ++i) {
        sentences[i].relations = sciex::ToRelations(rels[i]);
      }
    }
    const ordered_json meta = Meta(predict, g);
    sciex::WriteCorpusJsonl(fs::path(predict_out), sentences, meta);
    if (!relations_out.empty()) {
      std::ofstream out = OpenOut(relations_out);
      out << ordered_json{{"meta", meta}}.dump() << "\n";
      for (const auto &sentence_preds : rels) {
        for (const auto &p : sentence_preds) out << p.ToJson().dump() << "\n";
      }
    }
    return 0;
  }

  if (eval->parsed()) {
    const auto gold = sciex::ReadCorpusJsonl(fs::path(gold_path));
    const auto pred = sciex::ReadCorpusJsonl(fs::path(pred_path));
    const bool is_labeled = !unlabeled;
    const auto entity_report = sciex::EvaluateEntities(
        gold, pred, sciex::ParseRegime(regime), is_labeled);
    std::optional<sciex::RelationReport> relation_report;
    if (with_relations) {
      relation_report = sciex::EvaluateRelations(gold, pred, is_labeled);
    }
    std::vector<sciex::BreakdownRow> entity_rows, relation_rows;
    if (breakdown) {
      const auto train = ReadOptional(train_counts);
      const auto dev = ReadOptional(dev_counts);
      entity_rows = sciex::BreakdownByType(
          sciex::F1ByType(entity_report), TypeCounts(gold, false),
          TypeCounts(dev, false), TypeCounts(train, false), min_count);
      if (relation_report) {
        relation_rows = sciex::BreakdownByType(
            sciex::F1ByType(*relation_report), TypeCounts(gold, true),
            TypeCounts(dev, true), TypeCounts(train, true), min_count);
      }
    }
    if (text) {
      std::string out = ReportText(entity_report);
      if (relation_report) out += ReportText(*relation_report);
      if (breakdown) {
        out += "\nentity breakdown\n" + sciex::FormatBreakdown(entity_rows);
        if (relation_report) {
          out += "\nrelation breakdown\n" + sciex::FormatBreakdown(relation_rows);
        }
      }
      if (eval_out.empty()) {
        std::cout << out;
      } else {
        sciex::WriteFile(eval_out, out);
      }
      return 0;
    }
    ordered_json j = entity_report.ToJson();
    j["meta"] = Meta(eval, g);
    if (relation_report) j["relations"] = relation_report->ToJson();
    if (breakdown) {
      j["breakdown"] = {{"entities", sciex::BreakdownToJson(entity_rows)}};
      if (relation_report) {
        j["breakdown"]["relations"] = sciex::BreakdownToJson(relation_rows);
      }
    }
    WriteJson(eval_out, j);
    return 0;
  }

  if (map_schema->parsed()) {
    if (preset.empty() == mapping_path.empty()) {
      throw sciex::ValidationError("map-schema needs exactly one of --preset, --mapping");
    }
    const sciex::Mapping mapping = preset.empty() ? sciex::LoadMapping(mapping_path)
                                                  : sciex::PresetMapping(preset);
    sciex::ParseOptions options;
    if (byte_offsets) options.offsets = sciex::OffsetUnit::kByte;
    sciex::Diagnostics diag;
    const auto raw = sciex::ReadBratDirectory(map_brat, options, &diag);
    sciex::RetentionStats retention;
    const auto docs = sciex::ApplyMapping(raw, mapping, &retention);
    const auto sentences = ToSentences(docs, &diag);
    PrintDiagnostics(diag);
    ordered_json meta = Meta(map_schema, g);
    meta["mapping"] = mapping.ToJson();
    sciex::WriteCorpusJsonl(fs::path(map_out), sentences, meta);
    if (!dropped_path.empty()) {
      std::ofstream out = OpenOut(dropped_path);
      out << ordered_json{{"meta", meta}}.dump() << "\n";
      for (const auto &d : retention.dropped) {
        out << ordered_json{{"doc_id", d.doc_id},
                            {"id", d.id},
                            {"label", d.label},
                            {"reason", d.reason}}
                   .dump()
            << "\n";
      }
    }
    if (text) {
      std::cout << "entities kept " << retention.entities.kept << "/"
                << retention.entities.total << " (" << retention.entities.ratio()
                << ")\nrelations kept " << retention.relations.kept << "/"
                << retention.relations.total << " (" << retention.relations.ratio()
                << ")\n";
    } else {
      ordered_json j = retention.ToJson();
      j.erase("dropped");
      j["meta"] = meta;
      WriteJson("", j);
    }
    return 0;
  }

  if (select->parsed()) {
    const auto sentences = sciex::ReadCorpusJsonl(fs::path(select_in));
    const sciex::Strategy s = sciex::ParseStrategy(strategy);
    std::optional<sciex::CrfModel> model;
    if (!ner_model.empty()) model = sciex::CrfModel::Load(ner_model);
    std::optional<sciex::RelModel> rel;
    if (!rel_model.empty()) rel = sciex::RelModel::Load(rel_model);
    const auto plan = sciex::Select(sentences, s, ratio, model ? &*model : nullptr,
                                    g.seed, cycle, sciex::ParseUncertainty(uncertainty),
                                    rel ? &*rel : nullptr);
    const ordered_json meta = Meta(select, g);
    {
      std::ofstream out = OpenOut(worklist_out);
      out << ordered_json{{"meta", meta}}.dump() << "\n";
      sciex::WriteWorklist(out, plan, sentences);
    }
    if (!plan_out.empty()) {
      ordered_json j = plan.ToJson();
      j["meta"] = meta;
      WriteJson(plan_out, j);
    }
    std::cerr << "selected " << plan.chosen.size() << " sentences, "
              << plan.cost_tokens << " tokens\n";
    return 0;
  }

  if (curve->parsed()) {
    const auto train = sciex::ReadCorpusJsonl(fs::path(train_path));
    const auto dev = sciex::ReadCorpusJsonl(fs::path(dev_path));
    sciex::CurveConfig config;
    config.cycle_size = cycle_size;
    config.ratio = ratio;
    config.uncertainty = sciex::ParseUncertainty(uncertainty);
    config.relation = curve_relations;
    config.relation_uncertainty = relation_uncertainty;
    config.ner.source = curve_source.Config();
    config.ner.adam.step = curve_optim.lr;
    config.ner.batch_size = curve_optim.batch_size;
    config.ner.max_epochs = curve_optim.epochs;
    config.ner.patience = curve_optim.patience;
    config.ner.use_mixer = curve_optim.mixer;
    config.rel.source = config.ner.source;
    config.rel.adam = config.ner.adam;
    config.rel.batch_size = config.ner.batch_size;
    config.rel.max_epochs = config.ner.max_epochs;
    config.rel.patience = config.ner.patience;
    config.rel.use_mixer = config.ner.use_mixer;
    if (shuffle_abstracts) config.shuffle_seed = g.seed;
    if (num_seeds < 1) throw sciex::ValidationError("--seeds must be >= 1");
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < num_seeds; ++i) seeds.push_back(g.seed + static_cast<std::uint64_t>(i));
    std::vector<sciex::CurvePoint> points;
    for (const auto &name : strategies) {
      const auto part = sciex::SimulateCurves(train, dev, sciex::ParseStrategy(name),
                                              config, seeds, g.threads);
      points.insert(points.end(), part.begin(), part.end());
    }
    std::ofstream out = OpenOut(curve_out);
    sciex::WriteCurveCsv(out, points, Meta(curve, g).dump());
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char **argv) {
  try {
    return Run(argc, argv);
  } catch (const sciex::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sciex::FormatError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sciex::IoError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sciex::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception &e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
