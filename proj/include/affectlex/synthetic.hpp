// Seeded synthetic corpus generator: a desk-scale stand-in for a labeled
// essay collection. Documents mix category-specific words with filler; trait
// labels are drawn from a logistic model over the realized category rates, so
// the Bayes-optimal accuracy of each trait is known and recorded.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "affectlex/corpus.hpp"
#include "affectlex/lexicon.hpp"
#include "affectlex/rng.hpp"
#include "affectlex/util.hpp"

namespace affectlex {

struct SynthParams {
  std::uint64_t seed = 7;
  std::size_t n_docs = 300;
  std::size_t n_categories = 20;
  double signal_strength = 6.0;
  std::size_t tokens_per_doc = 60;
  std::size_t words_per_category = 5;
  std::size_t n_filler_words = 100;
  double category_active_prob = 0.3;
  double category_token_prob = 0.5;
};

struct SyntheticCorpus {
  std::vector<Document> docs;
  AffectLexicon lexicon;  // one category per planted emotion, scores all 1
  // Generator parameters and realized statistics (Bayes accuracy per trait,
  // class balance) for the meta file.
  std::vector<std::pair<std::string, std::string>> meta;
};

namespace detail {

inline std::string padded_index(std::size_t i, std::size_t width) {
  std::string s = std::to_string(i);
  while (s.size() < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace detail

inline SyntheticCorpus generate_synthetic(const SynthParams& params) {
  if (params.n_docs < 30)
    throw Error("generate_synthetic: n_docs must be at least 30");
  if (params.n_categories < 2)
    throw Error("generate_synthetic: n_categories must be at least 2");
  if (params.signal_strength < 0.0)
    throw Error("generate_synthetic: signal_strength must be non-negative");
  if (params.tokens_per_doc == 0 || params.words_per_category == 0 ||
      params.n_filler_words == 0)
    throw Error("generate_synthetic: sizes must be positive");

  const std::size_t k = params.n_categories;
  const std::size_t cat_width = std::to_string(k - 1).size();

  SyntheticCorpus corpus;
  corpus.lexicon.kind = LexiconKind::pmi_association;
  std::vector<std::vector<std::string>> cat_words(k);
  for (std::size_t c = 0; c < k; ++c) {
    const std::string cat = "emo" + detail::padded_index(c, cat_width);
    const std::size_t ci = corpus.lexicon.add_category(cat);
    cat_words[c].reserve(params.words_per_category);
    for (std::size_t wi = 0; wi < params.words_per_category; ++wi) {
      std::string word = cat + "w" + std::to_string(wi);
      corpus.lexicon.entries[ci].emplace(word, 1.0);
      cat_words[c].push_back(std::move(word));
    }
  }
  std::vector<std::string> filler(params.n_filler_words);
  const std::size_t fill_width =
      std::to_string(params.n_filler_words - 1).size();
  for (std::size_t i = 0; i < filler.size(); ++i)
    filler[i] = "fill" + detail::padded_index(i, fill_width);

  Rng rng(params.seed);

  // Per-trait Rademacher weights over categories.
  std::vector<std::vector<double>> trait_weights(
      kTraitCount, std::vector<double>(k, 0.0));
  for (std::size_t t = 0; t < kTraitCount; ++t)
    for (std::size_t c = 0; c < k; ++c)
      trait_weights[t][c] = rng.next_double() < 0.5 ? -1.0 : 1.0;

  // Document bodies.
  const std::size_t n = params.n_docs;
  const std::size_t doc_width = std::to_string(n - 1).size();
  std::vector<std::vector<double>> rates(n, std::vector<double>(k, 0.0));
  std::vector<std::string> texts(n);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    active.clear();
    for (std::size_t c = 0; c < k; ++c)
      if (rng.next_double() < params.category_active_prob) active.push_back(c);
    std::string text;
    for (std::size_t j = 0; j < params.tokens_per_doc; ++j) {
      const std::string* word;
      if (!active.empty() && rng.next_double() < params.category_token_prob) {
        const std::size_t c = active[rng.bounded(active.size())];
        word = &cat_words[c][rng.bounded(cat_words[c].size())];
        rates[i][c] += 1.0;
      } else {
        word = &filler[rng.bounded(filler.size())];
      }
      if (j > 0) text += ' ';
      text += *word;
    }
    texts[i] = std::move(text);
    for (double& r : rates[i]) r /= static_cast<double>(params.tokens_per_doc);
  }

  // Standardize the realized rates so the logistic weights act on comparable
  // scales; a category that never fired contributes nothing.
  std::vector<double> mean(k, 0.0), stdev(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < n; ++i) mean[c] += rates[i][c];
    mean[c] /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = rates[i][c] - mean[c];
      var += d * d;
    }
    stdev[c] = std::sqrt(var / static_cast<double>(n));
  }

  const double scale =
      params.signal_strength / std::sqrt(static_cast<double>(k));
  std::vector<std::vector<double>> p_yes(n,
                                         std::vector<double>(kTraitCount));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < kTraitCount; ++t) {
      double logit = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        if (stdev[c] == 0.0) continue;
        logit += trait_weights[t][c] * (rates[i][c] - mean[c]) / stdev[c];
      }
      logit *= scale;
      p_yes[i][t] = 1.0 / (1.0 + std::exp(-logit));
    }
  }

  // Labels are drawn doc-major, trait-minor; Bayes accuracy is the mean of
  // max(p, 1-p) over documents.
  std::vector<double> bayes(kTraitCount, 0.0);
  std::vector<std::size_t> yes_count(kTraitCount, 0);
  corpus.docs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    TraitLabels labels{};
    for (std::size_t t = 0; t < kTraitCount; ++t) {
      const double p = p_yes[i][t];
      labels[t] = rng.next_double() < p;
      if (labels[t]) ++yes_count[t];
      bayes[t] += p >= 0.5 ? p : 1.0 - p;
    }
    corpus.docs.push_back(make_document(
        "doc" + detail::padded_index(i, doc_width), texts[i], labels));
  }
  for (double& b : bayes) b /= static_cast<double>(n);

  auto put = [&corpus](std::string key, std::string value) {
    corpus.meta.emplace_back(std::move(key), std::move(value));
  };
  put("seed", std::to_string(params.seed));
  put("n_docs", std::to_string(params.n_docs));
  put("n_categories", std::to_string(params.n_categories));
  put("signal_strength", fmt_double(params.signal_strength));
  put("tokens_per_doc", std::to_string(params.tokens_per_doc));
  put("words_per_category", std::to_string(params.words_per_category));
  put("n_filler_words", std::to_string(params.n_filler_words));
  put("category_active_prob", fmt_double(params.category_active_prob));
  put("category_token_prob", fmt_double(params.category_token_prob));
  for (std::size_t t = 0; t < kTraitCount; ++t) {
    const std::string trait = kTraitNames[t];
    put("bayes_accuracy_" + trait, fmt_double(bayes[t]));
    put("yes_count_" + trait, std::to_string(yes_count[t]));
  }
  corpus.lexicon.metadata.emplace_back("source", "synthetic");
  corpus.lexicon.metadata.emplace_back("seed",
                                       std::to_string(params.seed));
  return corpus;
}

}  // namespace affectlex
