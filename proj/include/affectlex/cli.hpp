// Command-line front end. Subcommands wire the library into reproducible
// batch steps; every file written carries the hash of the invocation (or
// resolved experiment config) and the seeds that drove it.
//
// Exit codes: 0 success, 1 usage error, 2 data/runtime error.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "affectlex/analysis.hpp"
#include "affectlex/corpus.hpp"
#include "affectlex/eval.hpp"
#include "affectlex/experiment.hpp"
#include "affectlex/features.hpp"
#include "affectlex/learner.hpp"
#include "affectlex/lexicon.hpp"
#include "affectlex/synthetic.hpp"
#include "affectlex/util.hpp"

namespace affectlex::cli {

namespace detail {

inline std::string invocation_hash(const std::vector<std::string>& args) {
  std::uint64_t h = fnv1a64("affectlex-cli");
  for (const std::string& arg : args) {
    h = fnv1a64(arg, h);
    h = fnv1a64("\x1f", h);
  }
  return hex64(h);
}

struct FeatureFlags {
  std::string sets;
  std::string categories_lex;
  std::string fine_emo_lex;
  std::string basic_emo_lex;
  std::string osgood_lex;
  std::string ic_lex;
  std::string aic_mode = "both";

  void attach(CLI::App* cmd) {
    cmd->add_option("--sets", sets,
                    "'+'-joined feature sets (baseline, unigram, aic[:mode], "
                    "coarse_aff[:dim], basic_emo, fine_emo)")
        ->required();
    cmd->add_option("--categories-lex", categories_lex,
                    "category lexicon set for baseline features");
    cmd->add_option("--fine-emo-lex", fine_emo_lex,
                    "fine emotion PMI lexicon");
    cmd->add_option("--basic-emo-lex", basic_emo_lex,
                    "basic emotion binary lexicon");
    cmd->add_option("--osgood-lex", osgood_lex, "Osgood dimension lexicon");
    cmd->add_option("--ic-lex", ic_lex, "information content lexicon");
    cmd->add_option("--aic-mode", aic_mode, "aic mode: nouns, verbs or both");
  }

  FeatureConfig config() const {
    FeatureConfig cfg = parse_feature_spec(sets);
    if (cfg.aic_mode == AicMode::both)
      cfg.aic_mode = aic_mode_from_string(aic_mode);
    return cfg;
  }

  LexiconBundle load(const FeatureConfig& cfg) const {
    LexiconBundle bundle;
    if (cfg.baseline && !categories_lex.empty())
      bundle.categories = std::make_shared<CategoryLexiconSet>(
          load_category_lexicon(categories_lex));
    if (cfg.fine_emo && !fine_emo_lex.empty())
      bundle.fine_emo = std::make_shared<AffectLexicon>(
          load_affect_lexicon(fine_emo_lex, LexiconKind::pmi_association));
    if (cfg.basic_emo && !basic_emo_lex.empty())
      bundle.basic_emo = std::make_shared<AffectLexicon>(load_affect_lexicon(
          basic_emo_lex, LexiconKind::binary_association));
    if (cfg.coarse_aff && !osgood_lex.empty())
      bundle.osgood = std::make_shared<AffectLexicon>(
          load_affect_lexicon(osgood_lex, LexiconKind::osgood_dimension));
    if (cfg.aic && !ic_lex.empty())
      bundle.ic = std::make_shared<AffectLexicon>(
          load_affect_lexicon(ic_lex, LexiconKind::information_content));
    return bundle;
  }
};

}  // namespace detail

inline int run(const std::vector<std::string>& args) {
  CLI::App app{"affect and specificity lexicons, features, trait classifiers"};
  app.require_subcommand(1);
  const std::string cfg_hash = detail::invocation_hash(args);

  // --- build-lexicon -------------------------------------------------------
  auto* build = app.add_subcommand(
      "build-lexicon", "build a word-emotion PMI lexicon from labeled tweets");
  struct {
    std::string tweets, inventory, out;
    long long min_word_freq = 1;  // library default is 5; the CLI favors
                                  // small fixture corpora
    bool keep_nonpositive = false;
  } bl;
  build->add_option("--tweets", bl.tweets, "tweet file, one tweet per line")
      ->required();
  build->add_option("--inventory", bl.inventory,
                    "emotion hashtag inventory, one name per line")
      ->required();
  build->add_option("--out", bl.out, "output lexicon TSV")->required();
  build->add_option("--min-word-freq", bl.min_word_freq,
                    "drop words seen in fewer tweets");
  build->add_flag("--keep-nonpositive", bl.keep_nonpositive,
                  "keep entries with score <= 0");
  build->callback([&] {
    const auto inventory = load_inventory(bl.inventory);
    const auto tweets = load_tweets(bl.tweets, inventory);
    const CountTable counts = count_cooccurrences(tweets);
    AffectLexicon lex = build_pmi_lexicon(
        counts, static_cast<std::size_t>(bl.min_word_freq),
        bl.keep_nonpositive);
    lex.metadata.emplace_back("config", cfg_hash);
    lex.metadata.emplace_back("seeds", "");
    save_affect_lexicon(lex, bl.out);
    std::cout << "wrote " << bl.out << " (" << lex.categories.size()
              << " categories, " << lex.entry_count() << " entries)\n";
  });

  // --- build-ic-lexicon ----------------------------------------------------
  auto* build_ic = app.add_subcommand(
      "build-ic-lexicon",
      "build an information content lexicon from synset tables");
  struct {
    std::string ic, index, out;
  } bic;
  build_ic->add_option("--ic", bic.ic, "synset information content TSV")
      ->required();
  build_ic->add_option("--index", bic.index, "word-to-synset index TSV")
      ->required();
  build_ic->add_option("--out", bic.out, "output lexicon TSV")->required();
  build_ic->callback([&] {
    const SynsetICTable table = load_synset_ic_table(bic.ic, bic.index);
    AffectLexicon lex = build_ic_lexicon(table);
    lex.metadata.emplace_back("config", cfg_hash);
    lex.metadata.emplace_back("seeds", "");
    save_affect_lexicon(lex, bic.out);
    std::cout << "wrote " << bic.out << " (" << lex.entry_count()
              << " entries)\n";
  });

  // --- extract -------------------------------------------------------------
  auto* extract = app.add_subcommand(
      "extract", "extract a feature matrix from a document table");
  struct {
    std::string dataset, out;
    detail::FeatureFlags features;
  } ex;
  extract->add_option("--dataset", ex.dataset, "document CSV")->required();
  extract->add_option("--out", ex.out, "output feature matrix TSV")
      ->required();
  ex.features.attach(extract);
  extract->callback([&] {
    const std::vector<Document> docs = load_essays(ex.dataset);
    const FeatureConfig cfg = ex.features.config();
    const LexiconBundle bundle = ex.features.load(cfg);
    // Standalone extraction builds the vocabulary from the whole dataset;
    // fold-local vocabularies only exist inside cross-validation.
    std::shared_ptr<const Vocabulary> vocab;
    if (cfg.unigram)
      vocab = std::make_shared<Vocabulary>(Vocabulary::build(docs));
    FeatureExtractor extractor(cfg, bundle, vocab);
    FeatureMatrix matrix;
    for (const auto& item : extractor.schema().items)
      matrix.names.push_back(item.name);
    for (const Document& doc : docs) {
      matrix.ids.push_back(doc.id);
      matrix.labels.push_back(doc.labels);
      matrix.rows.push_back(extractor.extract(doc).values);
    }
    save_feature_matrix(matrix, ex.out,
                        {"config=" + cfg_hash, "seeds=",
                         "features=" + cfg.describe(),
                         "schema=" + hex64(extractor.schema().hash())});
    std::cout << "wrote " << ex.out << " (" << matrix.n_rows() << " x "
              << matrix.n_cols() << ")\n";
  });

  // --- train ---------------------------------------------------------------
  auto* train = app.add_subcommand("train",
                                   "train a trait classifier on a matrix");
  struct {
    std::string matrix, trait, out;
    double c = 1.0;
    long long epochs = 200;
    long long polish_rounds = 400;
    long long seed = 1;
    bool no_standardize = false;
    bool majority = false;
  } tr;
  train->add_option("--matrix", tr.matrix, "labeled feature matrix TSV")
      ->required();
  train->add_option("--trait", tr.trait, "EXT, NEU, AGR, CON or OPN")
      ->required();
  train->add_option("--out", tr.out, "output model file")->required();
  train->add_option("--c", tr.c, "SVM cost parameter");
  train->add_option("--epochs", tr.epochs, "stochastic training epochs");
  train->add_option("--polish-rounds", tr.polish_rounds,
                    "full-batch refinement rounds");
  train->add_option("--seed", tr.seed, "shuffling seed");
  train->add_flag("--no-standardize", tr.no_standardize,
                  "train on raw feature values");
  train->add_flag("--majority", tr.majority,
                  "train the majority baseline instead of an SVM");
  train->callback([&] {
    const FeatureMatrix matrix = load_feature_matrix(tr.matrix);
    const Trait trait = trait_from_string(tr.trait);
    const std::vector<bool> y = matrix.labels_for(trait);
    const std::uint64_t schema =
        FeatureSchema::from_names(matrix.names).hash();
    TrainedModel model;
    if (tr.majority) {
      model = train_majority(y, schema);
    } else {
      SvmOptions options;
      options.c = tr.c;
      options.epochs = static_cast<std::size_t>(tr.epochs);
      options.polish_rounds = static_cast<std::size_t>(tr.polish_rounds);
      options.seed = static_cast<std::uint64_t>(tr.seed);
      options.standardize = !tr.no_standardize;
      model = train_svm(matrix.rows, y, matrix.names, schema, options);
    }
    model.trait = trait_name(trait);
    model.extras.emplace_back("config", cfg_hash);
    model.extras.emplace_back("seeds", std::to_string(tr.seed));
    save_model(model, tr.out);
    std::cout << "wrote " << tr.out;
    if (!tr.majority)
      std::cout << " (objective " << fmt_double(model.objective) << ")";
    std::cout << "\n";
  });

  // --- predict -------------------------------------------------------------
  auto* predict = app.add_subcommand(
      "predict", "apply a trained model to a feature matrix");
  struct {
    std::string matrix, model, out;
  } pr;
  predict->add_option("--matrix", pr.matrix, "feature matrix TSV")
      ->required();
  predict->add_option("--model", pr.model, "model file")->required();
  predict->add_option("--out", pr.out, "output predictions TSV")->required();
  predict->callback([&] {
    const FeatureMatrix matrix = load_feature_matrix(pr.matrix);
    const TrainedModel model = load_model(pr.model);
    if (model.kind == TrainedModel::Kind::svm) {
      const std::uint64_t schema =
          FeatureSchema::from_names(matrix.names).hash();
      if (schema != model.schema_hash)
        throw Error("predict: matrix feature schema does not match model");
    }
    std::ofstream out(pr.out, std::ios::binary);
    if (!out) throw Error("predict: cannot open " + pr.out);
    out << "#config=" << cfg_hash << "\n#seeds=\n";
    const bool labeled =
        !matrix.labels.empty() && matrix.labels.front().has_value();
    std::optional<Trait> trait;
    if (labeled && !model.trait.empty())
      trait = trait_from_string(model.trait);
    out << "id\tprediction\tmargin";
    if (trait) out << "\tgold";
    out << "\n";
    std::vector<bool> gold, pred;
    for (std::size_t i = 0; i < matrix.n_rows(); ++i) {
      const bool yes = model.predict(matrix.rows[i]);
      out << matrix.ids[i] << "\t" << (yes ? "y" : "n") << "\t"
          << fmt_double(model.margin(matrix.rows[i]));
      if (trait) {
        const bool g =
            (*matrix.labels[i])[static_cast<std::size_t>(*trait)];
        out << "\t" << (g ? "y" : "n");
        gold.push_back(g);
        pred.push_back(yes);
      }
      out << "\n";
    }
    if (!out) throw Error("predict: write failed: " + pr.out);
    std::cout << "wrote " << pr.out << "\n";
    if (trait)
      std::cout << "macro_f1 " << fmt_double(macro_f1(gold, pred)) << "\n";
  });

  // --- evaluate ------------------------------------------------------------
  auto* evaluate = app.add_subcommand(
      "evaluate", "run the experiment described by a config file");
  struct {
    std::string config;
    long long jobs = 1;
  } ev;
  evaluate->add_option("--config", ev.config, "experiment config file")
      ->required();
  evaluate->add_option("--jobs", ev.jobs, "worker threads");
  evaluate->callback([&] {
    const ExperimentConfig config = parse_experiment_config(ev.config);
    const ExperimentResult result =
        run_experiment(config, static_cast<std::size_t>(
                                   ev.jobs < 1 ? 1 : ev.jobs));
    std::cout << "wrote " << result.report_tsv_path << "\n";
    std::cout << "wrote " << result.report_txt_path << "\n";
  });

  // --- rank-features -------------------------------------------------------
  auto* rank = app.add_subcommand(
      "rank-features", "rank matrix columns by information gain");
  struct {
    std::string matrix, trait, out, out_dir;
    long long top = 10;
  } rk;
  rank->add_option("--matrix", rk.matrix, "labeled feature matrix TSV")
      ->required();
  rank->add_option("--trait", rk.trait, "EXT, NEU, AGR, CON, OPN or all")
      ->required();
  rank->add_option("--top", rk.top, "rows to keep");
  rank->add_option("--out", rk.out, "output file (single trait)");
  rank->add_option("--out-dir", rk.out_dir, "output directory (--trait all)");
  rank->callback([&] {
    const FeatureMatrix matrix = load_feature_matrix(rk.matrix);
    const std::vector<std::string> header = {"config=" + cfg_hash, "seeds="};
    if (rk.trait == "all") {
      if (rk.out_dir.empty())
        throw Error("rank-features: --trait all needs --out-dir");
      std::filesystem::create_directories(rk.out_dir);
      for (std::size_t t = 0; t < kTraitCount; ++t) {
        const GainRanking ranking = rank_features(
            matrix, static_cast<Trait>(t), static_cast<std::size_t>(rk.top));
        const std::string path =
            (std::filesystem::path(rk.out_dir) /
             ("ranking_" + std::string(kTraitNames[t]) + ".tsv"))
                .string();
        save_gain_ranking(ranking, path, header);
        std::cout << "wrote " << path << "\n";
      }
    } else {
      if (rk.out.empty()) throw Error("rank-features: missing --out");
      const GainRanking ranking =
          rank_features(matrix, trait_from_string(rk.trait),
                        static_cast<std::size_t>(rk.top));
      save_gain_ranking(ranking, rk.out, header);
      std::cout << "wrote " << rk.out << "\n";
    }
  });

  // --- top-terms -----------------------------------------------------------
  auto* terms = app.add_subcommand(
      "top-terms", "print the highest scoring terms of a lexicon category");
  struct {
    std::string lexicon, category;
    long long n = 5;
  } tt;
  terms->add_option("--lexicon", tt.lexicon, "lexicon TSV")->required();
  terms->add_option("--category", tt.category, "category name")->required();
  terms->add_option("--n", tt.n, "number of terms");
  terms->callback([&] {
    const AffectLexicon lex = load_affect_lexicon(tt.lexicon);
    for (const auto& [term, score] :
         top_terms(lex, tt.category, static_cast<std::size_t>(tt.n)))
      std::cout << term << "\t" << fmt_double(score) << "\n";
  });

  // --- synth ---------------------------------------------------------------
  auto* synth = app.add_subcommand(
      "synth", "generate a seeded synthetic corpus with a planted lexicon");
  struct {
    std::string out_dir;
    long long seed = 7;
    long long docs = 300;
    long long categories = 20;
    double signal = 6.0;
    long long tokens = 60;
  } sy;
  synth->add_option("--out-dir", sy.out_dir, "output directory")->required();
  synth->add_option("--seed", sy.seed, "generator seed");
  synth->add_option("--docs", sy.docs, "number of documents (>= 30)");
  synth->add_option("--categories", sy.categories,
                    "number of emotion categories (>= 2)");
  synth->add_option("--signal", sy.signal, "logistic signal strength");
  synth->add_option("--tokens", sy.tokens, "tokens per document");
  synth->callback([&] {
    SynthParams params;
    params.seed = static_cast<std::uint64_t>(sy.seed);
    params.n_docs = static_cast<std::size_t>(sy.docs);
    params.n_categories = static_cast<std::size_t>(sy.categories);
    params.signal_strength = sy.signal;
    params.tokens_per_doc = static_cast<std::size_t>(sy.tokens);
    SyntheticCorpus corpus = generate_synthetic(params);
    namespace fs = std::filesystem;
    fs::create_directories(sy.out_dir);
    const std::string seeds = std::to_string(params.seed);
    const std::string corpus_path =
        (fs::path(sy.out_dir) / "corpus.csv").string();
    const std::string lex_path =
        (fs::path(sy.out_dir) / "lexicon.tsv").string();
    const std::string meta_path =
        (fs::path(sy.out_dir) / "meta.tsv").string();
    save_essays(corpus.docs, corpus_path,
                {"config=" + cfg_hash, "seeds=" + seeds});
    corpus.lexicon.metadata.emplace_back("config", cfg_hash);
    corpus.lexicon.metadata.emplace_back("seeds", seeds);
    save_affect_lexicon(corpus.lexicon, lex_path);
    std::ofstream meta(meta_path, std::ios::binary);
    if (!meta) throw Error("synth: cannot open " + meta_path);
    meta << "#config=" << cfg_hash << "\n#seeds=" << seeds << "\n";
    for (const auto& [key, value] : corpus.meta)
      meta << key << "\t" << value << "\n";
    if (!meta) throw Error("synth: write failed: " + meta_path);
    std::cout << "wrote " << corpus_path << "\n";
    std::cout << "wrote " << lex_path << "\n";
    std::cout << "wrote " << meta_path << "\n";
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints help itself; --help parses as a "success" error.
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

inline int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace affectlex::cli
