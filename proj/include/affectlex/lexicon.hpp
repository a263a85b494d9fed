// Affect lexicons: PMI lexicon construction from hashtag-labeled tweets,
// TSV load/save for all lexicon kinds, and the word-specificity lexicon
// built from precomputed synset information content.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "affectlex/corpus.hpp"
#include "affectlex/util.hpp"

namespace affectlex {

// ---------------------------------------------------------------------------
// AffectLexicon

enum class LexiconKind {
  pmi_association,
  binary_association,
  osgood_dimension,
  information_content,
};

inline const char* kind_name(LexiconKind k) {
  switch (k) {
    case LexiconKind::pmi_association: return "pmi_association";
    case LexiconKind::binary_association: return "binary_association";
    case LexiconKind::osgood_dimension: return "osgood_dimension";
    case LexiconKind::information_content: return "information_content";
  }
  throw Error("invalid lexicon kind");
}

inline LexiconKind kind_from_string(std::string_view s) {
  if (s == "pmi_association") return LexiconKind::pmi_association;
  if (s == "binary_association") return LexiconKind::binary_association;
  if (s == "osgood_dimension") return LexiconKind::osgood_dimension;
  if (s == "information_content") return LexiconKind::information_content;
  throw Error("unknown lexicon kind: '" + std::string(s) + "'");
}

// Category order is stable and defines feature order downstream.
struct AffectLexicon {
  LexiconKind kind = LexiconKind::pmi_association;
  std::vector<std::string> categories;
  std::vector<std::unordered_map<std::string, double>> entries;  // by category
  std::vector<std::pair<std::string, std::string>> metadata;

  std::optional<std::size_t> category_index(std::string_view name) const {
    for (std::size_t i = 0; i < categories.size(); ++i)
      if (categories[i] == name) return i;
    return std::nullopt;
  }

  std::size_t require_category(std::string_view name) const {
    auto idx = category_index(name);
    if (!idx)
      throw Error("unknown lexicon category: '" + std::string(name) + "'");
    return *idx;
  }

  std::size_t add_category(std::string name) {
    categories.push_back(std::move(name));
    entries.emplace_back();
    return categories.size() - 1;
  }

  const double* score(std::size_t category, std::string_view term) const {
    const auto& m = entries[category];
    auto it = m.find(std::string(term));
    return it == m.end() ? nullptr : &it->second;
  }

  std::size_t entry_count() const {
    std::size_t n = 0;
    for (const auto& m : entries) n += m.size();
    return n;
  }
};

namespace detail {

inline void check_score_invariant(LexiconKind kind, double score,
                                  const std::string& where) {
  if (kind == LexiconKind::binary_association && score != 0.0 && score != 1.0)
    throw Error(where + ": binary score must be 0 or 1");
  if (kind == LexiconKind::information_content && score < 0.0)
    throw Error(where + ": information content score must be >= 0");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Co-occurrence counting and PMI
//
// Tweet-level presence counts: a word counts at most once per tweet; a tweet
// with k inventory hashtags contributes to all k categories.

struct CountTable {
  std::size_t n_tweets = 0;
  std::unordered_map<std::string, std::size_t> word_count;
  std::map<std::string, std::size_t> cat_count;  // sorted for stable output
  std::map<std::string, std::unordered_map<std::string, std::size_t>> joint;
};

inline CountTable count_cooccurrences(std::span<const LabeledTweet> tweets) {
  if (tweets.empty()) throw Error("count_cooccurrences: empty corpus");
  CountTable table;
  table.n_tweets = tweets.size();
  std::vector<std::string> unique;
  for (const LabeledTweet& tweet : tweets) {
    unique.assign(tweet.tokens.begin(), tweet.tokens.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (const std::string& w : unique) ++table.word_count[w];
    for (const std::string& cat : tweet.hashtags) {
      ++table.cat_count[cat];
      auto& per_cat = table.joint[cat];
      for (const std::string& w : unique) ++per_cat[w];
    }
  }
  return table;
}

// score(w,e) = log2(joint(w,e) * n / (count(w) * count(e))) for joint > 0.
// Words under min_word_freq are excluded; non-positive scores are dropped
// unless keep_nonpositive is set (absence plays the role of smoothing).
inline AffectLexicon build_pmi_lexicon(const CountTable& counts,
                                       std::size_t min_word_freq = 5,
                                       bool keep_nonpositive = false) {
  if (min_word_freq < 1)
    throw Error("build_pmi_lexicon: min_word_freq must be >= 1");
  AffectLexicon lex;
  lex.kind = LexiconKind::pmi_association;
  const double n = static_cast<double>(counts.n_tweets);
  for (const auto& [cat, cat_count] : counts.cat_count) {
    const std::size_t c = lex.add_category(cat);
    auto joint_it = counts.joint.find(cat);
    if (joint_it == counts.joint.end()) continue;
    for (const auto& [term, joint] : joint_it->second) {
      if (joint == 0) continue;
      const std::size_t wc = counts.word_count.at(term);
      if (wc < min_word_freq) continue;
      const double score =
          std::log2(static_cast<double>(joint) * n /
                    (static_cast<double>(wc) * static_cast<double>(cat_count)));
      if (score <= 0.0 && !keep_nonpositive) continue;
      lex.entries[c].emplace(term, score);
    }
  }
  lex.metadata.emplace_back("source", "hashtag tweet corpus");
  lex.metadata.emplace_back("n_tweets", std::to_string(counts.n_tweets));
  lex.metadata.emplace_back("min_word_freq", std::to_string(min_word_freq));
  lex.metadata.emplace_back("keep_nonpositive",
                            keep_nonpositive ? "true" : "false");
  lex.metadata.emplace_back("log_base", "2");
  return lex;
}

// ---------------------------------------------------------------------------
// Lexicon TSV format
//
// First line `#kind=<kind>`, optional further `#key=value` metadata lines,
// then `category<TAB>term<TAB>score` rows. Scores use 6 decimal places and
// '.' as the decimal separator. Categories keep first-seen order.

inline AffectLexicon load_affect_lexicon_stream(
    std::istream& in, const std::string& what,
    std::optional<LexiconKind> expected = {}) {
  AffectLexicon lex;
  std::string line;
  if (!std::getline(in, line)) throw Error(what + ": empty lexicon file");
  std::string_view first = trim(line);
  if (!starts_with(first, "#kind="))
    throw Error(what + ": line 1: expected '#kind=<kind>' header");
  lex.kind = kind_from_string(first.substr(6));
  if (expected && lex.kind != *expected)
    throw Error(what + ": kind mismatch: expected " + kind_name(*expected) +
                ", found " + kind_name(lex.kind));

  std::unordered_map<std::string, std::size_t> index;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = what + ": line " + std::to_string(line_no);
    if (line[0] == '#') {
      std::string_view meta = std::string_view(line).substr(1);
      std::size_t eq = meta.find('=');
      if (eq != std::string_view::npos)
        lex.metadata.emplace_back(std::string(meta.substr(0, eq)),
                                  std::string(meta.substr(eq + 1)));
      continue;
    }
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 3)
      throw Error(where + ": expected category<TAB>term<TAB>score");
    const double score = parse_double(cols[2], where);
    detail::check_score_invariant(lex.kind, score, where);
    auto it = index.find(cols[0]);
    std::size_t c;
    if (it == index.end()) {
      c = lex.add_category(cols[0]);
      index.emplace(cols[0], c);
    } else {
      c = it->second;
    }
    if (!lex.entries[c].emplace(cols[1], score).second)
      throw Error(where + ": duplicate entry for (" + cols[0] + ", " +
                  cols[1] + ")");
  }
  return lex;
}

inline AffectLexicon load_affect_lexicon(
    const std::string& path, std::optional<LexiconKind> expected = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_affect_lexicon: cannot open " + path);
  return load_affect_lexicon_stream(in, "load_affect_lexicon(" + path + ")",
                                    expected);
}

inline void save_affect_lexicon_stream(const AffectLexicon& lex,
                                       std::ostream& out) {
  out << "#kind=" << kind_name(lex.kind) << "\n";
  for (const auto& [key, value] : lex.metadata)
    out << "#" << key << "=" << value << "\n";
  std::vector<std::string> terms;
  for (std::size_t c = 0; c < lex.categories.size(); ++c) {
    terms.clear();
    terms.reserve(lex.entries[c].size());
    for (const auto& [term, score] : lex.entries[c]) terms.push_back(term);
    std::sort(terms.begin(), terms.end());
    for (const std::string& term : terms)
      out << lex.categories[c] << "\t" << term << "\t"
          << fmt_fixed(lex.entries[c].at(term), 6) << "\n";
  }
}

inline void save_affect_lexicon(const AffectLexicon& lex,
                                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_affect_lexicon: cannot open " + path);
  save_affect_lexicon_stream(lex, out);
  if (!out) throw Error("save_affect_lexicon: write failed: " + path);
}

// ---------------------------------------------------------------------------
// Synset information content
//
// Input files: `synset_id<TAB>pos<TAB>ic` and a word index
// `term<TAB>pos<TAB>synset_id`. pos is "noun" or "verb".

enum class Pos { noun = 0, verb = 1 };

inline Pos pos_from_string(std::string_view s, const std::string& where) {
  if (s == "noun" || s == "n") return Pos::noun;
  if (s == "verb" || s == "v") return Pos::verb;
  throw Error(where + ": part of speech must be noun or verb, got '" +
              std::string(s) + "'");
}

struct SynsetICTable {
  // ic[pos][synset_id], word_synsets[pos][term] -> synset ids
  std::array<std::unordered_map<std::string, double>, 2> ic;
  std::array<std::unordered_map<std::string, std::vector<std::string>>, 2>
      word_synsets;

  bool empty() const { return ic[0].empty() && ic[1].empty(); }
};

inline SynsetICTable load_synset_ic_table(const std::string& ic_path,
                                          const std::string& index_path) {
  SynsetICTable table;
  {
    std::ifstream in(ic_path, std::ios::binary);
    if (!in) throw Error("load_synset_ic_table: cannot open " + ic_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const std::string where = ic_path + ": line " + std::to_string(line_no);
      std::vector<std::string> cols = split(line, '\t');
      if (cols.size() != 3)
        throw Error(where + ": expected synset_id<TAB>pos<TAB>ic");
      const Pos pos = pos_from_string(cols[1], where);
      const double ic = parse_double(cols[2], where);
      if (ic < 0.0)
        throw Error(where + ": information content must be >= 0");
      if (!table.ic[static_cast<std::size_t>(pos)].emplace(cols[0], ic).second)
        throw Error(where + ": duplicate synset id " + cols[0]);
    }
  }
  {
    std::ifstream in(index_path, std::ios::binary);
    if (!in) throw Error("load_synset_ic_table: cannot open " + index_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const std::string where =
          index_path + ": line " + std::to_string(line_no);
      std::vector<std::string> cols = split(line, '\t');
      if (cols.size() != 3)
        throw Error(where + ": expected term<TAB>pos<TAB>synset_id");
      const std::size_t pos =
          static_cast<std::size_t>(pos_from_string(cols[1], where));
      if (!table.ic[pos].count(cols[2]))
        throw Error(where + ": synset id " + cols[2] +
                    " is not in the information content table");
      table.word_synsets[pos][lower_ascii(cols[0])].push_back(cols[2]);
    }
  }
  return table;
}

// Word-level specificity: each (term, pos) gets the maximum information
// content over its synsets. Categories are {noun_ic, verb_ic}.
inline AffectLexicon build_ic_lexicon(const SynsetICTable& table) {
  if (table.empty())
    throw Error("build_ic_lexicon: empty synset table");
  AffectLexicon lex;
  lex.kind = LexiconKind::information_content;
  static const char* cat_names[2] = {"noun_ic", "verb_ic"};
  for (std::size_t pos = 0; pos < 2; ++pos) {
    const std::size_t c = lex.add_category(cat_names[pos]);
    for (const auto& [term, synsets] : table.word_synsets[pos]) {
      double best = 0.0;
      bool any = false;
      for (const std::string& id : synsets) {
        const double ic = table.ic[pos].at(id);
        if (!any || ic > best) best = ic;
        any = true;
      }
      if (any) lex.entries[c].emplace(term, best);
    }
  }
  lex.metadata.emplace_back("source", "synset information content table");
  return lex;
}

}  // namespace affectlex
