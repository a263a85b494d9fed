// Evaluation harness: stratified k-fold cross-validation with macro-averaged
// F1 of the yes/no labels, repeated runs, and paired t-test significance
// against a baseline configuration. Every Document access inside
// cross_validate is routed through a phase-tagged counter so tests can prove
// that vocabulary construction, scaling, and training never touch held-out
// rows.
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affectlex/corpus.hpp"
#include "affectlex/features.hpp"
#include "affectlex/learner.hpp"
#include "affectlex/rng.hpp"
#include "affectlex/stats.hpp"
#include "affectlex/util.hpp"

namespace affectlex {

// ---------------------------------------------------------------------------
// Fold plans

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignments;  // document position -> fold index

  std::vector<std::size_t> test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
      if (assignments[i] == fold) out.push_back(i);
    return out;
  }
  std::vector<std::size_t> train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
      if (assignments[i] != fold) out.push_back(i);
    return out;
  }
};

// Within each class, document positions are shuffled by the seed and dealt
// round-robin to folds, so per-fold class counts differ by at most 1.
inline FoldPlan stratified_folds(const std::vector<bool>& labels,
                                 std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error("stratified_folds: k must be at least 2");
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(labels.size(), 0);
  Rng rng(seed);
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[labels[i] ? 0 : 1].push_back(i);
  for (auto& members : by_class) {
    if (members.size() < k)
      throw Error("stratified_folds: class with " +
                  std::to_string(members.size()) +
                  " members is smaller than k=" + std::to_string(k));
    rng.shuffle(members);
    for (std::size_t pos = 0; pos < members.size(); ++pos)
      plan.assignments[members[pos]] = pos % k;
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Macro-averaged F1

// Unweighted mean of F1(yes) and F1(no); an F1 whose precision + recall
// denominator is zero counts as 0.
inline double macro_f1(const std::vector<bool>& gold,
                       const std::vector<bool>& pred) {
  if (gold.size() != pred.size())
    throw Error("macro_f1: length mismatch: " + std::to_string(gold.size()) +
                " vs " + std::to_string(pred.size()));
  if (gold.empty()) throw Error("macro_f1: empty inputs");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] && pred[i]) ++tp;
    else if (!gold[i] && pred[i]) ++fp;
    else if (gold[i] && !pred[i]) ++fn;
    else ++tn;
  }
  auto f1 = [](std::size_t tpos, std::size_t fpos, std::size_t fneg) {
    const std::size_t den = 2 * tpos + fpos + fneg;
    return den == 0 ? 0.0
                    : 2.0 * static_cast<double>(tpos) /
                          static_cast<double>(den);
  };
  return (f1(tp, fp, fn) + f1(tn, fn, fp)) / 2.0;
}

// ---------------------------------------------------------------------------
// Cross-validation

struct LearnerSpec {
  enum class Kind { svm, majority };
  Kind kind = Kind::svm;
  SvmOptions svm;

  std::string describe() const {
    if (kind == Kind::majority) return "majority";
    return "svm(c=" + fmt_double(svm.c) + ")";
  }
};

// Phase-tagged Document read counters. The no-leak contract is that the
// phases that may influence the model (vocabulary, train extraction,
// training/scaling) record zero reads of test-fold documents.
struct LeakAudit {
  enum Phase : std::size_t {
    vocab = 0,
    train_extract,
    train,
    test_extract,
    predict,
    kPhaseCount
  };
  std::array<std::array<std::size_t, 2>, kPhaseCount> reads{};  // [phase][is_test]

  void record(Phase phase, bool is_test) {
    ++reads[phase][is_test ? 1 : 0];
  }
  std::size_t test_reads(Phase phase) const { return reads[phase][1]; }
  std::size_t train_reads(Phase phase) const { return reads[phase][0]; }
  bool clean() const {
    return test_reads(vocab) == 0 && test_reads(train_extract) == 0 &&
           test_reads(train) == 0;
  }
};

struct CrossValResult {
  std::vector<double> fold_scores;
  double mean = 0.0;
};

// One stratified CV run for one trait. Per fold: vocabulary (if unigrams are
// enabled) and all training inputs come from training folds only; the learner
// standardizes internally from the rows it is given.
inline CrossValResult cross_validate(const std::vector<Document>& docs,
                                     Trait trait,
                                     const FeatureConfig& features,
                                     const LexiconBundle& lexicons,
                                     const LearnerSpec& learner,
                                     std::size_t k, std::uint64_t seed,
                                     LeakAudit* audit = nullptr) {
  if (docs.empty()) throw Error("cross_validate: no documents");
  std::vector<bool> labels;
  labels.reserve(docs.size());
  for (const Document& doc : docs) {
    if (!doc.labels)
      throw Error("cross_validate: document " + doc.id + " has no labels");
    labels.push_back((*doc.labels)[static_cast<std::size_t>(trait)]);
  }
  const FoldPlan plan = stratified_folds(labels, k, seed);

  auto read_doc = [&](std::size_t i, LeakAudit::Phase phase,
                      std::size_t fold) -> const Document& {
    if (audit) audit->record(phase, plan.assignments[i] == fold);
    return docs[i];
  };

  const bool is_majority = learner.kind == LearnerSpec::Kind::majority;
  CrossValResult result;
  result.fold_scores.reserve(k);
  for (std::size_t fold = 0; fold < k; ++fold) {
    const std::vector<std::size_t> train_idx = plan.train_indices(fold);
    const std::vector<std::size_t> test_idx = plan.test_indices(fold);

    // Majority needs no features at all; everything else builds its
    // extraction pipeline from training-fold documents only.
    std::optional<FeatureExtractor> extractor;
    if (!is_majority) {
      std::shared_ptr<const Vocabulary> vocab;
      if (features.unigram) {
        std::vector<const Document*> train_docs;
        train_docs.reserve(train_idx.size());
        for (std::size_t i : train_idx)
          train_docs.push_back(&read_doc(i, LeakAudit::vocab, fold));
        vocab = std::make_shared<Vocabulary>(Vocabulary::build(train_docs));
      }
      extractor.emplace(features, lexicons, vocab);
    }

    std::vector<std::vector<double>> train_x;
    std::vector<bool> train_y;
    train_x.reserve(train_idx.size());
    train_y.reserve(train_idx.size());
    for (std::size_t i : train_idx) {
      if (extractor)
        train_x.push_back(
            extractor->extract(read_doc(i, LeakAudit::train_extract, fold))
                .values);
      // Label reads happen inside the training phase.
      train_y.push_back(
          (*read_doc(i, LeakAudit::train, fold).labels)
              [static_cast<std::size_t>(trait)]);
    }

    TrainedModel model;
    if (is_majority) {
      model = train_majority(train_y);
    } else {
      std::vector<std::string> names;
      names.reserve(extractor->schema().size());
      for (const auto& item : extractor->schema().items)
        names.push_back(item.name);
      model = train_svm(train_x, train_y, std::move(names),
                        extractor->schema().hash(), learner.svm);
    }

    std::vector<bool> gold;
    std::vector<bool> pred;
    gold.reserve(test_idx.size());
    pred.reserve(test_idx.size());
    for (std::size_t i : test_idx) {
      if (extractor) {
        const FeatureVector fv =
            extractor->extract(read_doc(i, LeakAudit::test_extract, fold));
        pred.push_back(model.predict(fv.values));
      } else {
        pred.push_back(model.predict({}));
      }
      gold.push_back(
          (*read_doc(i, LeakAudit::predict, fold).labels)
              [static_cast<std::size_t>(trait)]);
    }
    result.fold_scores.push_back(macro_f1(gold, pred));
  }
  result.mean = mean_of(result.fold_scores);
  return result;
}

// ---------------------------------------------------------------------------
// Repeated runs and significance

struct SignificanceResult {
  Trait trait = Trait::EXT;
  double mean_diff = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  bool significant_at_99 = false;
};

struct EvalReport {
  std::string config;  // descriptor of the evaluated configuration
  std::vector<std::uint64_t> seeds;
  std::size_t k = 0;
  // scores[trait][repetition]
  std::array<std::vector<CrossValResult>, kTraitCount> scores;

  std::vector<double> repetition_means(Trait trait) const {
    const auto& reps = scores[static_cast<std::size_t>(trait)];
    std::vector<double> means;
    means.reserve(reps.size());
    for (const CrossValResult& rep : reps) means.push_back(rep.mean);
    return means;
  }
  double mean_score(Trait trait) const {
    return mean_of(repetition_means(trait));
  }
};

// Runs one configuration for all five traits across the given seeds
// (repetition r uses seeds[r] for its fold plan).
inline EvalReport evaluate_config(const std::vector<Document>& docs,
                                  const FeatureConfig& features,
                                  const LexiconBundle& lexicons,
                                  const LearnerSpec& learner, std::size_t k,
                                  std::span<const std::uint64_t> seeds,
                                  std::string descriptor = {}) {
  EvalReport report;
  report.config = descriptor.empty()
                      ? (learner.kind == LearnerSpec::Kind::majority
                             ? learner.describe()
                             : features.describe())
                      : std::move(descriptor);
  report.seeds.assign(seeds.begin(), seeds.end());
  report.k = k;
  for (std::size_t t = 0; t < kTraitCount; ++t) {
    report.scores[t].reserve(seeds.size());
    for (std::uint64_t seed : seeds)
      report.scores[t].push_back(cross_validate(
          docs, static_cast<Trait>(t), features, lexicons, learner, k, seed));
  }
  return report;
}

// Paired comparison of two evaluated configurations: the per-repetition mean
// macro-F1 sequences are differenced per trait. Both reports must have been
// produced with the same seed list so that repetition r is a matched pair.
inline std::array<SignificanceResult, kTraitCount> repeat_and_test(
    const EvalReport& a, const EvalReport& b) {
  if (a.seeds != b.seeds)
    throw Error("repeat_and_test: configurations were run on different seeds");
  if (a.seeds.size() < 2)
    throw Error("repeat_and_test: need at least 2 repetitions");
  std::array<SignificanceResult, kTraitCount> results;
  for (std::size_t t = 0; t < kTraitCount; ++t) {
    const std::vector<double> ma = a.repetition_means(static_cast<Trait>(t));
    const std::vector<double> mb = b.repetition_means(static_cast<Trait>(t));
    const PairedTTest test = paired_t_test(ma, mb);
    SignificanceResult& r = results[t];
    r.trait = static_cast<Trait>(t);
    r.mean_diff = test.mean_diff;
    r.t = test.t;
    r.df = test.df;
    r.p = test.p;
    r.significant_at_99 = test.significant_at(0.01);
  }
  return results;
}

}  // namespace affectlex
