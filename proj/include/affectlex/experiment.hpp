// Batch experiment driver: a key=value config file declares a dataset, the
// lexicons, and a list of named runs (feature specs or "majority"); every run
// is evaluated with repeated stratified CV and compared against a designated
// baseline run with a paired t-test. Reports are written as a tab-separated
// file plus a rendered text table.
#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "affectlex/analysis.hpp"
#include "affectlex/corpus.hpp"
#include "affectlex/eval.hpp"
#include "affectlex/features.hpp"
#include "affectlex/learner.hpp"
#include "affectlex/lexicon.hpp"
#include "affectlex/rng.hpp"
#include "affectlex/util.hpp"

namespace affectlex {

struct ExperimentConfig {
  std::string dataset;
  std::string out_dir = "results";
  std::size_t k = 3;
  std::size_t repetitions = 10;
  double c = 1.0;
  std::size_t epochs = 200;
  std::size_t polish_rounds = 400;
  std::uint64_t base_seed = 7;
  std::vector<std::uint64_t> explicit_seeds;  // from `seeds = ...`, optional
  AicMode aic_mode = AicMode::both;
  std::string lex_fine_emo;
  std::string lex_basic_emo;
  std::string lex_osgood;
  std::string lex_ic;
  std::string lex_categories;
  std::vector<std::pair<std::string, std::string>> runs;  // name -> spec
  std::string compare;  // run name the others are tested against, optional

  // Repetition seeds: explicit list if given, otherwise a splitmix stream
  // from base_seed. AFFECTLEX_SEED replaces base_seed and discards the
  // explicit list so a smoke run can redirect every seed at once.
  std::vector<std::uint64_t> seeds() const {
    if (!explicit_seeds.empty()) {
      if (explicit_seeds.size() != repetitions)
        throw Error("experiment config: seeds lists " +
                    std::to_string(explicit_seeds.size()) +
                    " values but repetitions = " +
                    std::to_string(repetitions));
      return explicit_seeds;
    }
    std::vector<std::uint64_t> out(repetitions);
    Rng rng(base_seed);
    for (auto& s : out) s = rng.next_u64();
    return out;
  }

  // Canonical resolved form; its hash marks every output file.
  std::string canonical() const {
    std::ostringstream out;
    out << "dataset=" << dataset << "\n";
    out << "out_dir=" << out_dir << "\n";
    out << "k=" << k << "\n";
    out << "repetitions=" << repetitions << "\n";
    out << "c=" << fmt_double(c) << "\n";
    out << "epochs=" << epochs << "\n";
    out << "polish_rounds=" << polish_rounds << "\n";
    out << "aic_mode=" << aic_mode_name(aic_mode) << "\n";
    out << "lexicon.fine_emo=" << lex_fine_emo << "\n";
    out << "lexicon.basic_emo=" << lex_basic_emo << "\n";
    out << "lexicon.osgood=" << lex_osgood << "\n";
    out << "lexicon.ic=" << lex_ic << "\n";
    out << "lexicon.categories=" << lex_categories << "\n";
    for (const auto& [name, spec] : runs)
      out << "run." << name << "=" << spec << "\n";
    out << "compare=" << compare << "\n";
    out << "seeds=" << seed_list_string() << "\n";
    return out.str();
  }
  std::uint64_t config_hash() const { return fnv1a64(canonical()); }
  std::string seed_list_string() const {
    std::string out;
    for (std::uint64_t s : seeds()) {
      if (!out.empty()) out += ",";
      out += std::to_string(s);
    }
    return out;
  }
};

inline ExperimentConfig parse_experiment_config_stream(
    std::istream& in, const std::string& what) {
  ExperimentConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = what + ": line " + std::to_string(line_no);
    const std::size_t eq = t.find('=');
    if (eq == std::string_view::npos)
      throw Error(where + ": expected key = value");
    const std::string key{trim(t.substr(0, eq))};
    const std::string value{trim(t.substr(eq + 1))};
    if (key.empty()) throw Error(where + ": empty key");
    if (key == "dataset") config.dataset = value;
    else if (key == "out_dir") config.out_dir = value;
    else if (key == "k") config.k = static_cast<std::size_t>(parse_int(value, where));
    else if (key == "repetitions")
      config.repetitions = static_cast<std::size_t>(parse_int(value, where));
    else if (key == "c") config.c = parse_double(value, where);
    else if (key == "epochs")
      config.epochs = static_cast<std::size_t>(parse_int(value, where));
    else if (key == "polish_rounds")
      config.polish_rounds = static_cast<std::size_t>(parse_int(value, where));
    else if (key == "base_seed")
      config.base_seed = static_cast<std::uint64_t>(parse_int(value, where));
    else if (key == "seeds") {
      config.explicit_seeds.clear();
      for (const std::string& part : split(value, ','))
        config.explicit_seeds.push_back(
            static_cast<std::uint64_t>(parse_int(trim(part), where)));
    } else if (key == "aic_mode") {
      config.aic_mode = aic_mode_from_string(value);
    } else if (key == "lexicon.fine_emo") config.lex_fine_emo = value;
    else if (key == "lexicon.basic_emo") config.lex_basic_emo = value;
    else if (key == "lexicon.osgood") config.lex_osgood = value;
    else if (key == "lexicon.ic") config.lex_ic = value;
    else if (key == "lexicon.categories") config.lex_categories = value;
    else if (starts_with(key, "run.")) {
      const std::string name = key.substr(4);
      if (name.empty()) throw Error(where + ": run entry without a name");
      for (const auto& [existing, spec] : config.runs)
        if (existing == name)
          throw Error(where + ": duplicate run '" + name + "'");
      if (value.empty()) throw Error(where + ": run '" + name + "' is empty");
      config.runs.emplace_back(name, value);
    } else if (key == "compare") {
      config.compare = value;
    } else {
      throw Error(where + ": unknown key '" + key + "'");
    }
  }
  if (config.dataset.empty()) throw Error(what + ": missing dataset");
  if (config.runs.empty()) throw Error(what + ": no run.<name> entries");
  if (config.k < 2) throw Error(what + ": k must be at least 2");
  if (config.repetitions < 2)
    throw Error(what + ": repetitions must be at least 2");
  if (!config.compare.empty()) {
    bool found = false;
    for (const auto& [name, spec] : config.runs)
      if (name == config.compare) found = true;
    if (!found)
      throw Error(what + ": compare names unknown run '" + config.compare +
                  "'");
  }
  const char* env = std::getenv("AFFECTLEX_SEED");
  if (env != nullptr) {
    config.base_seed = static_cast<std::uint64_t>(
        parse_int(env, "AFFECTLEX_SEED"));
    config.explicit_seeds.clear();
  }
  return config;
}

inline ExperimentConfig parse_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("experiment config: cannot open " + path);
  return parse_experiment_config_stream(in, "experiment config(" + path + ")");
}

// ---------------------------------------------------------------------------
// Runner

struct ExperimentRun {
  std::string name;
  std::string spec;
  LearnerSpec learner;
  FeatureConfig features;  // unused for majority runs
  EvalReport report;
  // Significance vs. the compare run (absent for the compare run itself or
  // when no compare target is configured).
  std::optional<std::array<SignificanceResult, kTraitCount>> significance;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::uint64_t> seeds;
  std::vector<ExperimentRun> runs;
  std::string report_tsv_path;
  std::string report_txt_path;
};

namespace detail {

// Runs fn(0..n-1) on up to `jobs` threads. Results must land in preallocated
// slots so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  if (n == 0) return;
  if (jobs <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min(jobs, n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

inline std::string fixed3(double v) { return fmt_fixed(v, 3); }

}  // namespace detail

inline void write_experiment_reports(ExperimentResult& result) {
  namespace fs = std::filesystem;
  const ExperimentConfig& config = result.config;
  fs::create_directories(config.out_dir);
  result.report_tsv_path =
      (fs::path(config.out_dir) / "report.tsv").string();
  result.report_txt_path =
      (fs::path(config.out_dir) / "report.txt").string();

  const std::string config_line = "config=" + hex64(config.config_hash());
  const std::string seeds_line = "seeds=" + config.seed_list_string();

  std::ofstream tsv(result.report_tsv_path, std::ios::binary);
  if (!tsv)
    throw Error("experiment: cannot open " + result.report_tsv_path);
  tsv << "#" << config_line << "\n#" << seeds_line << "\n";
  tsv << "#dataset=" << config.dataset << "\n";
  tsv << "run\tspec\ttrait\tmean_macro_f1\trep_means\tt\tdf\tp\t"
         "significant_99\n";
  for (const ExperimentRun& run : result.runs) {
    for (std::size_t t = 0; t < kTraitCount; ++t) {
      const Trait trait = static_cast<Trait>(t);
      tsv << run.name << "\t" << run.spec << "\t" << trait_name(trait) << "\t"
          << fmt_double(run.report.mean_score(trait)) << "\t";
      const std::vector<double> means = run.report.repetition_means(trait);
      for (std::size_t r = 0; r < means.size(); ++r) {
        if (r > 0) tsv << ",";
        tsv << fmt_double(means[r]);
      }
      if (run.significance) {
        const SignificanceResult& sig = (*run.significance)[t];
        tsv << "\t" << fmt_double(sig.t) << "\t" << fmt_double(sig.df) << "\t"
            << fmt_double(sig.p) << "\t" << (sig.significant_at_99 ? "y" : "n")
            << "\n";
      } else {
        tsv << "\t-\t-\t-\t-\n";
      }
    }
  }
  if (!tsv)
    throw Error("experiment: write failed: " + result.report_tsv_path);
  tsv.close();

  // Text table: runs as rows, traits as columns; '*' marks differences from
  // the compare run that are significant at 99%.
  std::ofstream txt(result.report_txt_path, std::ios::binary);
  if (!txt)
    throw Error("experiment: cannot open " + result.report_txt_path);
  txt << "#" << config_line << "\n#" << seeds_line << "\n";
  txt << "Mean macro-F1 over " << config.repetitions << " repetitions of "
      << config.k << "-fold stratified CV";
  if (!config.compare.empty())
    txt << " (* = differs from '" << config.compare << "' at 99%)";
  txt << "\n\n";
  std::size_t name_width = 4;
  for (const ExperimentRun& run : result.runs)
    name_width = std::max(name_width, run.name.size());
  txt << std::string(name_width, ' ');
  for (std::size_t t = 0; t < kTraitCount; ++t)
    txt << "  " << kTraitNames[t] << "   ";
  txt << "\n";
  for (const ExperimentRun& run : result.runs) {
    txt << run.name << std::string(name_width - run.name.size(), ' ');
    for (std::size_t t = 0; t < kTraitCount; ++t) {
      const Trait trait = static_cast<Trait>(t);
      txt << "  " << detail::fixed3(run.report.mean_score(trait));
      const bool starred =
          run.significance && (*run.significance)[t].significant_at_99;
      txt << (starred ? "*" : " ");
    }
    txt << "\n";
  }
  if (!txt)
    throw Error("experiment: write failed: " + result.report_txt_path);
}

inline ExperimentResult run_experiment(const ExperimentConfig& config,
                                       std::size_t jobs = 1,
                                       bool write_reports = true) {
  ExperimentResult result;
  result.config = config;
  result.seeds = config.seeds();

  const std::vector<Document> docs = load_essays(config.dataset);

  // Resolve per-run feature configs first so missing lexicon paths fail
  // before any work happens.
  LexiconBundle bundle;
  bool need_vocab_note = false;
  for (const auto& [name, spec] : config.runs) {
    ExperimentRun run;
    run.name = name;
    run.spec = spec;
    if (spec == "majority") {
      run.learner.kind = LearnerSpec::Kind::majority;
    } else {
      run.learner.kind = LearnerSpec::Kind::svm;
      run.learner.svm.c = config.c;
      run.learner.svm.epochs = config.epochs;
      run.learner.svm.polish_rounds = config.polish_rounds;
      run.features = parse_feature_spec(spec);
      if (run.features.aic_mode == AicMode::both)
        run.features.aic_mode = config.aic_mode;
      auto need = [&](bool enabled, const std::string& path,
                      const char* set, const char* key) {
        if (enabled && path.empty())
          throw Error("experiment config: run '" + name +
                      "' enables feature set '" + set + "' but lexicon." +
                      key + " is not set");
      };
      need(run.features.baseline, config.lex_categories, "baseline",
           "categories");
      need(run.features.aic, config.lex_ic, "aic", "ic");
      need(run.features.coarse_aff, config.lex_osgood, "coarse_aff",
           "osgood");
      need(run.features.basic_emo, config.lex_basic_emo, "basic_emo",
           "basic_emo");
      need(run.features.fine_emo, config.lex_fine_emo, "fine_emo",
           "fine_emo");
      if (run.features.unigram) need_vocab_note = true;
    }
    result.runs.push_back(std::move(run));
  }
  (void)need_vocab_note;

  // Load each needed lexicon once; runs share them read-only.
  auto want = [&](auto member) {
    for (const ExperimentRun& run : result.runs)
      if (run.learner.kind == LearnerSpec::Kind::svm && run.features.*member)
        return true;
    return false;
  };
  if (want(&FeatureConfig::baseline))
    bundle.categories = std::make_shared<CategoryLexiconSet>(
        load_category_lexicon(config.lex_categories));
  if (want(&FeatureConfig::fine_emo))
    bundle.fine_emo = std::make_shared<AffectLexicon>(load_affect_lexicon(
        config.lex_fine_emo, LexiconKind::pmi_association));
  if (want(&FeatureConfig::basic_emo))
    bundle.basic_emo = std::make_shared<AffectLexicon>(load_affect_lexicon(
        config.lex_basic_emo, LexiconKind::binary_association));
  if (want(&FeatureConfig::coarse_aff))
    bundle.osgood = std::make_shared<AffectLexicon>(load_affect_lexicon(
        config.lex_osgood, LexiconKind::osgood_dimension));
  if (want(&FeatureConfig::aic))
    bundle.ic = std::make_shared<AffectLexicon>(load_affect_lexicon(
        config.lex_ic, LexiconKind::information_content));

  // Evaluate every (run, trait, repetition) cell; cells are independent.
  for (ExperimentRun& run : result.runs) {
    run.report.config = run.spec;
    run.report.seeds = result.seeds;
    run.report.k = config.k;
    for (std::size_t t = 0; t < kTraitCount; ++t)
      run.report.scores[t].resize(result.seeds.size());
  }
  struct Cell {
    std::size_t run, trait, rep;
  };
  std::vector<Cell> cells;
  cells.reserve(result.runs.size() * kTraitCount * result.seeds.size());
  for (std::size_t r = 0; r < result.runs.size(); ++r)
    for (std::size_t t = 0; t < kTraitCount; ++t)
      for (std::size_t rep = 0; rep < result.seeds.size(); ++rep)
        cells.push_back({r, t, rep});
  detail::parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const Cell& cell = cells[i];
    ExperimentRun& run = result.runs[cell.run];
    run.report.scores[cell.trait][cell.rep] = cross_validate(
        docs, static_cast<Trait>(cell.trait), run.features, bundle,
        run.learner, config.k, result.seeds[cell.rep]);
  });

  if (!config.compare.empty()) {
    const ExperimentRun* baseline = nullptr;
    for (const ExperimentRun& run : result.runs)
      if (run.name == config.compare) baseline = &run;
    for (ExperimentRun& run : result.runs) {
      if (run.name == config.compare) continue;
      run.significance = repeat_and_test(run.report, baseline->report);
    }
  }

  if (write_reports) write_experiment_reports(result);
  return result;
}

}  // namespace affectlex
