// Feature analysis: single-split information gain per feature (C4.5-style
// supervised discretization), per-trait gain rankings, and top-terms queries
// against a lexicon category.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "affectlex/corpus.hpp"
#include "affectlex/features.hpp"
#include "affectlex/lexicon.hpp"
#include "affectlex/util.hpp"

namespace affectlex {

// Entropy in bits of a yes/no count pair; 0 log 0 = 0.
inline double entropy_bits(std::size_t yes, std::size_t no) {
  if (yes == 0 || no == 0) return 0.0;
  const double n = static_cast<double>(yes + no);
  const double p = static_cast<double>(yes) / n;
  const double q = static_cast<double>(no) / n;
  return -(p * std::log2(p) + q * std::log2(q));
}

struct SplitGain {
  double gain = 0.0;
  double threshold = 0.0;
};

// Best binary threshold split: candidates are midpoints of consecutive
// distinct sorted values; gain is the entropy of the labels minus the
// weighted conditional entropy of the two sides. Ties pick the smallest
// threshold; a constant feature yields gain 0 at the constant.
inline SplitGain information_gain(const std::vector<double>& values,
                                  const std::vector<bool>& labels) {
  if (values.size() != labels.size())
    throw Error("information_gain: length mismatch: " +
                std::to_string(values.size()) + " vs " +
                std::to_string(labels.size()));
  if (values.size() < 2)
    throw Error("information_gain: need at least 2 instances");

  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::size_t total_yes = 0;
  for (bool y : labels)
    if (y) ++total_yes;
  const std::size_t total_no = n - total_yes;
  const double h = entropy_bits(total_yes, total_no);

  SplitGain best;
  best.threshold = values[order[0]];
  if (values[order[0]] == values[order[n - 1]]) return best;  // constant

  double best_cond = h;
  bool found = false;
  std::size_t left_yes = 0;
  std::size_t left_no = 0;
  for (std::size_t pos = 0; pos + 1 < n; ++pos) {
    if (labels[order[pos]]) ++left_yes;
    else ++left_no;
    const double a = values[order[pos]];
    const double b = values[order[pos + 1]];
    if (a == b) continue;
    const std::size_t left = pos + 1;
    const std::size_t right = n - left;
    const double cond =
        (static_cast<double>(left) / static_cast<double>(n)) *
            entropy_bits(left_yes, left_no) +
        (static_cast<double>(right) / static_cast<double>(n)) *
            entropy_bits(total_yes - left_yes, total_no - left_no);
    if (!found || cond < best_cond) {
      found = true;
      best_cond = cond;
      best.threshold = (a + b) / 2.0;
    }
  }
  best.gain = std::max(0.0, h - best_cond);
  return best;
}

struct GainRanking {
  struct Row {
    std::string feature;
    double gain = 0.0;
    double threshold = 0.0;
  };
  Trait trait = Trait::EXT;
  std::vector<Row> rows;  // gain descending, ties by feature name ascending
};

// Ranks matrix columns by information gain against the trait labels and
// keeps the top_k (clamped to the column count).
inline GainRanking rank_features(const FeatureMatrix& matrix, Trait trait,
                                 std::size_t top_k) {
  if (matrix.n_rows() < 2)
    throw Error("rank_features: need at least 2 documents");
  const std::vector<bool> labels = matrix.labels_for(trait);
  GainRanking ranking;
  ranking.trait = trait;
  ranking.rows.reserve(matrix.n_cols());
  std::vector<double> column(matrix.n_rows());
  for (std::size_t j = 0; j < matrix.n_cols(); ++j) {
    for (std::size_t i = 0; i < matrix.n_rows(); ++i)
      column[i] = matrix.rows[i][j];
    const SplitGain split = information_gain(column, labels);
    ranking.rows.push_back({matrix.names[j], split.gain, split.threshold});
  }
  std::sort(ranking.rows.begin(), ranking.rows.end(),
            [](const GainRanking::Row& a, const GainRanking::Row& b) {
              if (a.gain != b.gain) return a.gain > b.gain;
              return a.feature < b.feature;
            });
  if (ranking.rows.size() > top_k) ranking.rows.resize(top_k);
  return ranking;
}

// The n highest-scoring terms of a category, score descending, ties by term
// ascending; asking for more than the category holds returns the whole
// category.
inline std::vector<std::pair<std::string, double>> top_terms(
    const AffectLexicon& lex, const std::string& category, std::size_t n) {
  const std::size_t c = lex.require_category(category);
  std::vector<std::pair<std::string, double>> terms(lex.entries[c].begin(),
                                                    lex.entries[c].end());
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  if (terms.size() > n) terms.resize(n);
  return terms;
}

// Ranking report: one file per trait, `trait rank feature gain threshold`
// rows, tab-separated, rank starting at 1.
inline void save_gain_ranking_stream(
    const GainRanking& ranking, std::ostream& out,
    const std::vector<std::string>& header_comments = {}) {
  for (const auto& c : header_comments) out << "#" << c << "\n";
  const char* trait = trait_name(ranking.trait);
  for (std::size_t r = 0; r < ranking.rows.size(); ++r) {
    const GainRanking::Row& row = ranking.rows[r];
    out << trait << "\t" << (r + 1) << "\t" << row.feature << "\t"
        << fmt_double(row.gain) << "\t" << fmt_double(row.threshold) << "\n";
  }
}

inline void save_gain_ranking(
    const GainRanking& ranking, const std::string& path,
    const std::vector<std::string>& header_comments = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_gain_ranking: cannot open " + path);
  save_gain_ranking_stream(ranking, out, header_comments);
  if (!out) throw Error("save_gain_ranking: write failed: " + path);
}

}  // namespace affectlex
