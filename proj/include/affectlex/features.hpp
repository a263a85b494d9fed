// Feature extraction: turns a Document into a named FeatureVector for any
// combination of the six feature sets (baseline category counts, token
// unigrams, average information content, coarse affect, basic emotions,
// fine emotions).
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "affectlex/corpus.hpp"
#include "affectlex/lexicon.hpp"
#include "affectlex/util.hpp"

namespace affectlex {

// ---------------------------------------------------------------------------
// Schema and vectors

enum class FeatureSource {
  baseline,
  unigram,
  aic,
  coarse_aff,
  basic_emo,
  fine_emo,
};

inline const char* source_name(FeatureSource s) {
  switch (s) {
    case FeatureSource::baseline: return "baseline";
    case FeatureSource::unigram: return "unigram";
    case FeatureSource::aic: return "aic";
    case FeatureSource::coarse_aff: return "coarse_aff";
    case FeatureSource::basic_emo: return "basic_emo";
    case FeatureSource::fine_emo: return "fine_emo";
  }
  throw Error("invalid feature source");
}

inline FeatureSource source_from_name(std::string_view s) {
  if (s == "baseline") return FeatureSource::baseline;
  if (s == "unigram") return FeatureSource::unigram;
  if (s == "aic") return FeatureSource::aic;
  if (s == "coarse_aff") return FeatureSource::coarse_aff;
  if (s == "basic_emo") return FeatureSource::basic_emo;
  if (s == "fine_emo") return FeatureSource::fine_emo;
  throw Error("unknown feature set: '" + std::string(s) + "'");
}

// Feature names carry the set they come from ("fine_emo:joy"), which keeps
// them unique and lets a schema be rebuilt from a file of names alone.
struct FeatureSchema {
  struct Item {
    std::string name;
    FeatureSource source;
  };
  std::vector<Item> items;

  std::size_t size() const { return items.size(); }

  void add(std::string name, FeatureSource source) {
    items.push_back({std::move(name), source});
  }

  // Stable 64-bit hash over the ordered names; recorded in models so that a
  // model can refuse vectors extracted under a different configuration.
  std::uint64_t hash() const {
    std::uint64_t h = fnv1a64("feature-schema");
    for (const Item& item : items) {
      h = fnv1a64(item.name, h);
      h = fnv1a64("\x1e", h);
    }
    return h;
  }

  static FeatureSchema from_names(std::span<const std::string> names) {
    FeatureSchema schema;
    for (const std::string& name : names) {
      std::size_t colon = name.find(':');
      if (colon == std::string::npos)
        throw Error("feature name without set prefix: '" + name + "'");
      schema.add(name, source_from_name(name.substr(0, colon)));
    }
    return schema;
  }
};

struct FeatureVector {
  std::shared_ptr<const FeatureSchema> schema;
  std::vector<double> values;
};

// ---------------------------------------------------------------------------
// Category lexicon set (baseline word categories)
//
// File format: `[category]` section headers, one pattern per line; a trailing
// '*' makes the pattern a prefix match ("friend*" matches "friendly").

struct CategoryLexiconSet {
  struct Patterns {
    std::unordered_set<std::string> exact;
    std::vector<std::string> prefixes;
  };
  std::vector<std::string> categories;  // file order
  std::unordered_map<std::string, Patterns> patterns;

  bool matches(const std::string& category, const std::string& token) const {
    auto it = patterns.find(category);
    if (it == patterns.end()) return false;
    if (it->second.exact.count(token)) return true;
    for (const std::string& prefix : it->second.prefixes)
      if (starts_with(token, prefix)) return true;
    return false;
  }
};

inline CategoryLexiconSet load_category_lexicon_stream(
    std::istream& in, const std::string& what) {
  CategoryLexiconSet set;
  std::string line;
  std::string current;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = lower_ascii(trim(t.substr(1, t.size() - 2)));
      if (current.empty())
        throw Error(what + ": line " + std::to_string(line_no) +
                    ": empty category name");
      if (set.patterns.count(current))
        throw Error(what + ": line " + std::to_string(line_no) +
                    ": duplicate category [" + current + "]");
      set.categories.push_back(current);
      set.patterns.emplace(current, CategoryLexiconSet::Patterns{});
      continue;
    }
    if (current.empty())
      throw Error(what + ": line " + std::to_string(line_no) +
                  ": pattern before any [category] header");
    std::string pattern = lower_ascii(t);
    auto& pats = set.patterns[current];
    if (pattern.size() > 1 && pattern.back() == '*')
      pats.prefixes.push_back(pattern.substr(0, pattern.size() - 1));
    else
      pats.exact.insert(std::move(pattern));
  }
  for (const std::string& cat : set.categories) {
    const auto& pats = set.patterns.at(cat);
    if (pats.exact.empty() && pats.prefixes.empty())
      throw Error(what + ": category [" + cat + "] has no patterns");
  }
  if (set.categories.empty()) throw Error(what + ": no categories");
  return set;
}

inline CategoryLexiconSet load_category_lexicon(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_category_lexicon: cannot open " + path);
  return load_category_lexicon_stream(in,
                                      "load_category_lexicon(" + path + ")");
}

// ---------------------------------------------------------------------------
// Per-set extraction

// Sum of lexicon scores over all tokens that have an entry, divided by the
// total token count of the document. Length-normalizes and leaves documents
// with no coverage at 0.
inline double avg_association(const Document& doc, const AffectLexicon& lex,
                              const std::string& category) {
  const std::size_t c = lex.require_category(category);
  if (doc.tokens.empty()) return 0.0;
  double sum = 0.0;
  for (const std::string& token : doc.tokens)
    if (const double* s = lex.score(c, token)) sum += *s;
  return sum / static_cast<double>(doc.tokens.size());
}

namespace detail {

inline std::vector<double> avg_association_all(const Document& doc,
                                               const AffectLexicon& lex) {
  std::vector<double> values(lex.categories.size(), 0.0);
  if (doc.tokens.empty()) return values;
  for (const std::string& token : doc.tokens)
    for (std::size_t c = 0; c < lex.categories.size(); ++c)
      if (const double* s = lex.score(c, token)) values[c] += *s;
  const double n = static_cast<double>(doc.tokens.size());
  for (double& v : values) v /= n;
  return values;
}

}  // namespace detail

// One average-association feature per category, in lexicon category order.
inline std::vector<double> fine_emotion_features(const Document& doc,
                                                 const AffectLexicon& lex) {
  if (lex.kind != LexiconKind::pmi_association)
    throw Error("fine_emotion_features: lexicon kind must be pmi_association");
  return detail::avg_association_all(doc, lex);
}

inline std::vector<double> basic_emotion_features(const Document& doc,
                                                  const AffectLexicon& lex) {
  if (lex.kind != LexiconKind::binary_association)
    throw Error(
        "basic_emotion_features: lexicon kind must be binary_association");
  if (lex.categories.size() != 8)
    throw Error("basic_emotion_features: expected 8 emotion categories, got " +
                std::to_string(lex.categories.size()));
  return detail::avg_association_all(doc, lex);
}

inline const std::array<const char*, 3>& osgood_dimensions() {
  static const std::array<const char*, 3> dims = {"evaluative", "potency",
                                                  "activity"};
  return dims;
}

// Averages in canonical dimension order (evaluative, potency, activity),
// independent of the order the lexicon file listed them in.
inline std::vector<double> coarse_affect_features(const Document& doc,
                                                  const AffectLexicon& lex) {
  if (lex.kind != LexiconKind::osgood_dimension)
    throw Error("coarse_affect_features: lexicon kind must be osgood_dimension");
  for (const char* dim : osgood_dimensions())
    if (!lex.category_index(dim))
      throw Error(std::string("coarse_affect_features: lexicon is missing "
                              "category '") + dim + "'");
  if (lex.categories.size() != 3)
    throw Error("coarse_affect_features: expected exactly 3 categories");
  std::vector<double> values;
  values.reserve(3);
  for (const char* dim : osgood_dimensions())
    values.push_back(avg_association(doc, lex, dim));
  return values;
}

enum class AicMode { nouns, verbs, both };

inline const char* aic_mode_name(AicMode m) {
  switch (m) {
    case AicMode::nouns: return "nouns";
    case AicMode::verbs: return "verbs";
    case AicMode::both: return "both";
  }
  throw Error("invalid aic mode");
}

inline AicMode aic_mode_from_string(std::string_view s) {
  if (s == "nouns") return AicMode::nouns;
  if (s == "verbs") return AicMode::verbs;
  if (s == "both") return AicMode::both;
  throw Error("unknown aic mode: '" + std::string(s) + "'");
}

// Average information content over matched tokens only; coverage of the
// noun/verb tables is sparse, so the denominator is the match count, not the
// document length. A token present in both tables contributes its most
// specific (highest) score under mode `both`.
inline double aic_feature(const Document& doc, const AffectLexicon& lex,
                          AicMode mode) {
  if (lex.kind != LexiconKind::information_content)
    throw Error("aic_feature: lexicon kind must be information_content");
  const bool use_nouns = mode != AicMode::verbs;
  const bool use_verbs = mode != AicMode::nouns;
  std::optional<std::size_t> noun_c = lex.category_index("noun_ic");
  std::optional<std::size_t> verb_c = lex.category_index("verb_ic");
  double sum = 0.0;
  std::size_t matched = 0;
  for (const std::string& token : doc.tokens) {
    const double* noun = (use_nouns && noun_c) ? lex.score(*noun_c, token)
                                               : nullptr;
    const double* verb = (use_verbs && verb_c) ? lex.score(*verb_c, token)
                                               : nullptr;
    if (!noun && !verb) continue;
    double best = noun ? *noun : *verb;
    if (noun && verb && *verb > best) best = *verb;
    sum += best;
    ++matched;
  }
  return matched == 0 ? 0.0 : sum / static_cast<double>(matched);
}

// ---------------------------------------------------------------------------
// Unigrams

struct Vocabulary {
  std::vector<std::string> terms;  // sorted
  std::unordered_map<std::string, std::size_t> index;
  std::size_t total_tokens = 0;  // token count of the corpus it was built on

  static Vocabulary build(const std::vector<const Document*>& docs) {
    Vocabulary vocab;
    std::unordered_set<std::string> seen;
    for (const Document* doc : docs) {
      vocab.total_tokens += doc->tokens.size();
      for (const std::string& token : doc->tokens) seen.insert(token);
    }
    vocab.terms.assign(seen.begin(), seen.end());
    std::sort(vocab.terms.begin(), vocab.terms.end());
    for (std::size_t i = 0; i < vocab.terms.size(); ++i)
      vocab.index.emplace(vocab.terms[i], i);
    return vocab;
  }

  static Vocabulary build(const std::vector<Document>& docs) {
    std::vector<const Document*> ptrs;
    ptrs.reserve(docs.size());
    for (const Document& doc : docs) ptrs.push_back(&doc);
    return build(ptrs);
  }
};

// Per-term relative frequency: count(term) / total tokens in the document.
inline std::vector<double> unigram_features(const Document& doc,
                                            const Vocabulary& vocab) {
  std::vector<double> values(vocab.terms.size(), 0.0);
  if (doc.tokens.empty()) return values;
  for (const std::string& token : doc.tokens) {
    auto it = vocab.index.find(token);
    if (it != vocab.index.end()) values[it->second] += 1.0;
  }
  const double n = static_cast<double>(doc.tokens.size());
  for (double& v : values) v /= n;
  return values;
}

// ---------------------------------------------------------------------------
// Baseline (structural + category rates)

inline const std::array<const char*, 5>& baseline_structural_names() {
  static const std::array<const char*, 5> names = {
      "word_count", "words_per_sentence", "type_token_ratio", "long_word_rate",
      "punctuation_rate"};
  return names;
}

// Structural features plus one match rate per category (matches / tokens).
inline std::vector<double> baseline_features(const Document& doc,
                                             const CategoryLexiconSet& cats) {
  std::vector<double> values;
  values.reserve(5 + cats.categories.size());
  const double n = static_cast<double>(doc.tokens.size());
  values.push_back(n);
  values.push_back(doc.sentence_count == 0
                       ? 0.0
                       : n / static_cast<double>(doc.sentence_count));
  if (doc.tokens.empty()) {
    values.push_back(0.0);  // type/token ratio
    values.push_back(0.0);  // long word rate
    values.push_back(0.0);  // punctuation rate
    for (std::size_t c = 0; c < cats.categories.size(); ++c)
      values.push_back(0.0);
    return values;
  }
  std::unordered_set<std::string> types(doc.tokens.begin(), doc.tokens.end());
  values.push_back(static_cast<double>(types.size()) / n);
  std::size_t long_words = 0;
  for (const std::string& token : doc.tokens)
    if (token.size() > 6) ++long_words;
  values.push_back(static_cast<double>(long_words) / n);
  values.push_back(static_cast<double>(doc.punct_count) / n);
  for (const std::string& cat : cats.categories) {
    std::size_t matches = 0;
    for (const std::string& token : doc.tokens)
      if (cats.matches(cat, token)) ++matches;
    values.push_back(static_cast<double>(matches) / n);
  }
  return values;
}

// ---------------------------------------------------------------------------
// Assembly

struct FeatureConfig {
  bool baseline = false;
  bool unigram = false;
  bool aic = false;
  bool coarse_aff = false;
  bool basic_emo = false;
  bool fine_emo = false;
  AicMode aic_mode = AicMode::both;
  // Which Osgood dimensions to keep, indexed like osgood_dimensions().
  std::array<bool, 3> coarse_dims = {true, true, true};

  bool any() const {
    return baseline || unigram || aic || coarse_aff || basic_emo || fine_emo;
  }

  std::string describe() const {
    std::string out;
    auto append = [&out](const std::string& name) {
      if (!out.empty()) out += "+";
      out += name;
    };
    if (baseline) append("baseline");
    if (unigram) append("unigram");
    if (aic) {
      append(aic_mode == AicMode::both
                 ? std::string("aic")
                 : std::string("aic:") + aic_mode_name(aic_mode));
    }
    if (coarse_aff) {
      if (coarse_dims[0] && coarse_dims[1] && coarse_dims[2]) {
        append("coarse_aff");
      } else {
        for (std::size_t i = 0; i < 3; ++i)
          if (coarse_dims[i])
            append(std::string("coarse_aff:") + osgood_dimensions()[i]);
      }
    }
    if (basic_emo) append("basic_emo");
    if (fine_emo) append("fine_emo");
    return out.empty() ? "none" : out;
  }
};

// Parses a '+'-joined feature spec such as
// "baseline+unigram+aic:nouns+coarse_aff:activity+fine_emo". A bare
// "coarse_aff" enables all three Osgood dimensions; a bare "aic" means mode
// both.
inline FeatureConfig parse_feature_spec(std::string_view spec) {
  FeatureConfig config;
  bool coarse_seen = false;
  for (const std::string& token : split(spec, '+')) {
    const std::string_view t = trim(token);
    if (t.empty()) throw Error("feature spec: empty component");
    if (t == "baseline") {
      config.baseline = true;
    } else if (t == "unigram") {
      config.unigram = true;
    } else if (t == "aic" || starts_with(t, "aic:")) {
      config.aic = true;
      if (starts_with(t, "aic:"))
        config.aic_mode = aic_mode_from_string(t.substr(4));
    } else if (t == "coarse_aff") {
      config.coarse_aff = true;
      config.coarse_dims = {true, true, true};
      coarse_seen = true;
    } else if (starts_with(t, "coarse_aff:")) {
      if (!coarse_seen) {
        config.coarse_dims = {false, false, false};
        coarse_seen = true;
      }
      config.coarse_aff = true;
      const std::string_view dim = t.substr(11);
      bool known = false;
      for (std::size_t i = 0; i < 3; ++i)
        if (dim == osgood_dimensions()[i]) {
          config.coarse_dims[i] = true;
          known = true;
        }
      if (!known)
        throw Error("feature spec: unknown Osgood dimension '" +
                    std::string(dim) + "'");
    } else if (t == "basic_emo") {
      config.basic_emo = true;
    } else if (t == "fine_emo") {
      config.fine_emo = true;
    } else {
      throw Error("feature spec: unknown feature set '" + std::string(t) +
                  "'");
    }
  }
  if (!config.any()) throw Error("feature spec: no feature sets enabled");
  return config;
}

// Shared read-only lexicons; only the ones required by the enabled sets need
// to be present.
struct LexiconBundle {
  std::shared_ptr<const CategoryLexiconSet> categories;
  std::shared_ptr<const AffectLexicon> fine_emo;
  std::shared_ptr<const AffectLexicon> basic_emo;
  std::shared_ptr<const AffectLexicon> osgood;
  std::shared_ptr<const AffectLexicon> ic;
};

// Builds the schema once and extracts vectors in fixed set order: baseline,
// unigram, aic, coarse_aff, basic_emo, fine_emo.
class FeatureExtractor {
 public:
  FeatureExtractor(FeatureConfig config, LexiconBundle lexicons,
                   std::shared_ptr<const Vocabulary> vocabulary = nullptr)
      : config_(config),
        lexicons_(std::move(lexicons)),
        vocabulary_(std::move(vocabulary)) {
    if (!config_.any())
      throw Error("feature configuration error: no feature sets enabled");
    auto schema = std::make_shared<FeatureSchema>();
    if (config_.baseline) {
      require(lexicons_.categories != nullptr, "baseline",
              "category lexicon set");
      for (const char* name : baseline_structural_names())
        schema->add(std::string("baseline:") + name, FeatureSource::baseline);
      for (const std::string& cat : lexicons_.categories->categories)
        schema->add("baseline:" + cat, FeatureSource::baseline);
    }
    if (config_.unigram) {
      require(vocabulary_ != nullptr, "unigram", "vocabulary");
      for (const std::string& term : vocabulary_->terms)
        schema->add("unigram:" + term, FeatureSource::unigram);
    }
    if (config_.aic) {
      require(lexicons_.ic != nullptr, "aic", "information content lexicon");
      schema->add(std::string("aic:") + aic_mode_name(config_.aic_mode),
                  FeatureSource::aic);
    }
    if (config_.coarse_aff) {
      require(lexicons_.osgood != nullptr, "coarse_aff", "Osgood lexicon");
      if (!config_.coarse_dims[0] && !config_.coarse_dims[1] &&
          !config_.coarse_dims[2])
        throw Error(
            "feature configuration error: coarse_aff enabled with no "
            "dimensions");
      for (std::size_t i = 0; i < 3; ++i)
        if (config_.coarse_dims[i])
          schema->add(std::string("coarse_aff:") + osgood_dimensions()[i],
                      FeatureSource::coarse_aff);
    }
    if (config_.basic_emo) {
      require(lexicons_.basic_emo != nullptr, "basic_emo",
              "basic emotion lexicon");
      for (const std::string& cat : lexicons_.basic_emo->categories)
        schema->add("basic_emo:" + cat, FeatureSource::basic_emo);
    }
    if (config_.fine_emo) {
      require(lexicons_.fine_emo != nullptr, "fine_emo",
              "fine emotion lexicon");
      for (const std::string& cat : lexicons_.fine_emo->categories)
        schema->add("fine_emo:" + cat, FeatureSource::fine_emo);
    }
    schema_ = std::move(schema);
  }

  const FeatureSchema& schema() const { return *schema_; }
  std::shared_ptr<const FeatureSchema> schema_ptr() const { return schema_; }

  FeatureVector extract(const Document& doc) const {
    FeatureVector fv;
    fv.schema = schema_;
    fv.values.reserve(schema_->size());
    auto append = [&fv](const std::vector<double>& block) {
      fv.values.insert(fv.values.end(), block.begin(), block.end());
    };
    if (config_.baseline) append(baseline_features(doc, *lexicons_.categories));
    if (config_.unigram) append(unigram_features(doc, *vocabulary_));
    if (config_.aic)
      fv.values.push_back(aic_feature(doc, *lexicons_.ic, config_.aic_mode));
    if (config_.coarse_aff) {
      const std::vector<double> all =
          coarse_affect_features(doc, *lexicons_.osgood);
      for (std::size_t i = 0; i < 3; ++i)
        if (config_.coarse_dims[i]) fv.values.push_back(all[i]);
    }
    if (config_.basic_emo)
      append(basic_emotion_features(doc, *lexicons_.basic_emo));
    if (config_.fine_emo) append(fine_emotion_features(doc, *lexicons_.fine_emo));
    return fv;
  }

 private:
  static void require(bool ok, const char* set, const char* resource) {
    if (!ok)
      throw Error(std::string("feature configuration error: set '") + set +
                  "' is enabled but no " + resource + " was provided");
  }

  FeatureConfig config_;
  LexiconBundle lexicons_;
  std::shared_ptr<const Vocabulary> vocabulary_;
  std::shared_ptr<const FeatureSchema> schema_;
};

inline FeatureVector assemble_features(
    const Document& doc, const FeatureConfig& config,
    const LexiconBundle& lexicons,
    std::shared_ptr<const Vocabulary> vocabulary = nullptr) {
  FeatureExtractor extractor(config, lexicons, std::move(vocabulary));
  return extractor.extract(doc);
}

// ---------------------------------------------------------------------------
// Feature matrix file
//
// Tab-separated: optional '#' metadata lines, a header row of column names
// (id, optional cEXT..cOPN label columns, then feature names), one row per
// document.

struct FeatureMatrix {
  std::vector<std::string> ids;
  std::vector<std::string> names;  // feature column names
  std::vector<std::optional<TraitLabels>> labels;
  std::vector<std::vector<double>> rows;

  std::size_t n_rows() const { return ids.size(); }
  std::size_t n_cols() const { return names.size(); }

  std::vector<bool> labels_for(Trait trait) const {
    std::vector<bool> y;
    y.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!labels[i])
        throw Error("document " + ids[i] + " has no labels");
      y.push_back((*labels[i])[static_cast<std::size_t>(trait)]);
    }
    return y;
  }
};

inline void save_feature_matrix_stream(
    const FeatureMatrix& matrix, std::ostream& out,
    const std::vector<std::string>& header_comments = {}) {
  for (const auto& c : header_comments) out << "#" << c << "\n";
  const bool labeled =
      !matrix.labels.empty() && matrix.labels.front().has_value();
  out << "id";
  if (labeled)
    for (std::size_t t = 0; t < kTraitCount; ++t)
      out << "\t" << essay_columns()[2 + t];
  for (const std::string& name : matrix.names) out << "\t" << name;
  out << "\n";
  for (std::size_t i = 0; i < matrix.n_rows(); ++i) {
    out << matrix.ids[i];
    if (labeled) {
      if (!matrix.labels[i])
        throw Error("save_feature_matrix: mixed labeled/unlabeled rows");
      for (std::size_t t = 0; t < kTraitCount; ++t)
        out << "\t" << ((*matrix.labels[i])[t] ? "y" : "n");
    }
    for (double v : matrix.rows[i]) out << "\t" << fmt_double(v);
    out << "\n";
  }
}

inline void save_feature_matrix(
    const FeatureMatrix& matrix, const std::string& path,
    const std::vector<std::string>& header_comments = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_feature_matrix: cannot open " + path);
  save_feature_matrix_stream(matrix, out, header_comments);
  if (!out) throw Error("save_feature_matrix: write failed: " + path);
}

inline FeatureMatrix load_feature_matrix_stream(std::istream& in,
                                                const std::string& what) {
  FeatureMatrix matrix;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    header = split(line, '\t');
    break;
  }
  if (header.empty()) throw Error(what + ": missing header row");
  if (header[0] != "id")
    throw Error(what + ": first column must be 'id'");
  std::size_t first_feature = 1;
  bool labeled = false;
  if (header.size() >= 6 && header[1] == "cEXT") {
    for (std::size_t t = 0; t < kTraitCount; ++t)
      if (header[1 + t] != essay_columns()[2 + t])
        throw Error(what + ": label columns must be cEXT,cNEU,cAGR,cCON,cOPN");
    labeled = true;
    first_feature = 1 + kTraitCount;
  }
  matrix.names.assign(header.begin() + static_cast<std::ptrdiff_t>(first_feature),
                      header.end());
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::string where = what + ": line " + std::to_string(line_no);
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != header.size())
      throw Error(where + ": expected " + std::to_string(header.size()) +
                  " columns, got " + std::to_string(cols.size()));
    matrix.ids.push_back(cols[0]);
    if (labeled) {
      TraitLabels lab{};
      for (std::size_t t = 0; t < kTraitCount; ++t) {
        if (cols[1 + t] == "y") lab[t] = true;
        else if (cols[1 + t] == "n") lab[t] = false;
        else
          throw Error(where + ": unknown label '" + cols[1 + t] +
                      "' in column " + essay_columns()[2 + t]);
      }
      matrix.labels.push_back(lab);
    } else {
      matrix.labels.push_back(std::nullopt);
    }
    std::vector<double> row;
    row.reserve(matrix.names.size());
    for (std::size_t j = first_feature; j < cols.size(); ++j)
      row.push_back(parse_double(cols[j], where));
    matrix.rows.push_back(std::move(row));
  }
  return matrix;
}

inline FeatureMatrix load_feature_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_feature_matrix: cannot open " + path);
  return load_feature_matrix_stream(in, "load_feature_matrix(" + path + ")");
}

}  // namespace affectlex
