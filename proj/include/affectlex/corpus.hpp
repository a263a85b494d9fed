// Corpus ingestion: deterministic tokenizer, essay documents with Big Five
// labels, and hashtag-labeled tweet corpora.
#pragma once

#include <array>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "affectlex/util.hpp"

namespace affectlex {

// ---------------------------------------------------------------------------
// Traits and labels

enum class Trait { EXT = 0, NEU = 1, AGR = 2, CON = 3, OPN = 4 };

inline constexpr std::size_t kTraitCount = 5;

inline constexpr std::array<const char*, kTraitCount> kTraitNames = {
    "EXT", "NEU", "AGR", "CON", "OPN"};

inline const char* trait_name(Trait t) {
  return kTraitNames[static_cast<std::size_t>(t)];
}

inline Trait trait_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kTraitCount; ++i)
    if (s == kTraitNames[i]) return static_cast<Trait>(i);
  throw Error("unknown trait name: '" + std::string(s) + "'");
}

// true = yes, false = no, indexed by Trait.
using TraitLabels = std::array<bool, kTraitCount>;

// ---------------------------------------------------------------------------
// Tokenizer
//
// Tokens are lowercase, whitespace-free, stripped of surrounding punctuation,
// and contain at least one letter or digit. Internal apostrophes and hyphens
// survive ("can't", "well-known"). Bytes >= 0x80 are treated as letters so
// UTF-8 words pass through untouched. A leading '#' marks a hashtag: the '#'
// is stripped and the token is reported separately.

struct TokenizedText {
  std::vector<std::string> words;
  std::vector<std::string> hashtags;
};

namespace detail {

inline bool is_token_byte(char c) {
  return is_ascii_alpha(c) || is_ascii_digit(c) ||
         static_cast<unsigned char>(c) >= 0x80;
}

// Length of a multibyte punctuation sequence at position i, or 0. Covers
// Latin-1 punctuation (U+00A0..U+00BF: NBSP, inverted marks, guillemets) and
// the general punctuation block (U+2000..U+207F: dashes, curly quotes,
// ellipsis). Everything else above 0x7F is treated as a letter.
inline std::size_t utf8_punct_len(std::string_view s, std::size_t i) {
  const unsigned char b0 = static_cast<unsigned char>(s[i]);
  if (b0 == 0xC2 && i + 1 < s.size()) return 2;
  if (b0 == 0xE2 && i + 2 < s.size()) {
    const unsigned char b1 = static_cast<unsigned char>(s[i + 1]);
    if (b1 == 0x80 || b1 == 0x81) return 3;
  }
  return 0;
}

}  // namespace detail

inline TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_ascii_space(text[i])) ++i;
    std::size_t start = i;
    while (i < n && !is_ascii_space(text[i])) ++i;
    std::string_view piece = text.substr(start, i - start);
    if (piece.empty()) continue;

    // The token is the span from the first to the last letter-or-digit;
    // punctuation outside it is stripped, punctuation inside it ("can't",
    // "well-known") survives. A '#' ahead of the span marks a hashtag.
    bool hashtag = false;
    std::size_t b = piece.size();
    std::size_t e = 0;
    std::size_t p = 0;
    while (p < piece.size()) {
      const char ch = piece[p];
      std::size_t len = 1;
      bool letter;
      if (static_cast<unsigned char>(ch) < 0x80) {
        letter = is_ascii_alpha(ch) || is_ascii_digit(ch);
      } else {
        const std::size_t punct = detail::utf8_punct_len(piece, p);
        letter = punct == 0;
        if (punct > 0) len = punct;
      }
      if (letter) {
        if (b > p) b = p;
        e = p + len;
      } else if (ch == '#' && b == piece.size()) {
        hashtag = true;
      }
      p += len;
    }
    if (b >= e) continue;

    std::string token = lower_ascii(piece.substr(b, e - b));
    if (hashtag)
      out.hashtags.push_back(std::move(token));
    else
      out.words.push_back(std::move(token));
  }
  return out;
}

inline std::vector<std::string> tokenize_words(std::string_view text) {
  return tokenize(text).words;
}

// Sentences are maximal segments between runs of '.', '!', '?' that contain
// at least one token byte. Only feeds the words-per-sentence feature.
inline std::size_t count_sentences(std::string_view text) {
  std::size_t sentences = 0;
  bool has_content = false;
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?') {
      if (has_content) ++sentences;
      has_content = false;
    } else if (detail::is_token_byte(c)) {
      has_content = true;
    }
  }
  if (has_content) ++sentences;
  return sentences;
}

inline std::size_t count_punctuation(std::string_view text) {
  std::size_t count = 0;
  for (char c : text)
    if (is_ascii_punct(c)) ++count;
  return count;
}

// ---------------------------------------------------------------------------
// Documents

struct Document {
  std::string id;
  std::vector<std::string> tokens;
  std::size_t sentence_count = 0;
  std::size_t raw_char_count = 0;
  std::size_t punct_count = 0;
  std::optional<TraitLabels> labels;
};

inline Document make_document(std::string id, std::string_view text,
                              std::optional<TraitLabels> labels = {}) {
  Document doc;
  doc.id = std::move(id);
  doc.tokens = tokenize_words(text);
  doc.sentence_count = count_sentences(text);
  if (!doc.tokens.empty() && doc.sentence_count == 0) doc.sentence_count = 1;
  doc.raw_char_count = text.size();
  doc.punct_count = count_punctuation(text);
  doc.labels = labels;
  return doc;
}

// ---------------------------------------------------------------------------
// Essay table (CSV)
//
// Header `id,text,cEXT,cNEU,cAGR,cCON,cOPN`; text field quoted, labels y/n.
// Leading '#' lines are metadata comments and are skipped. A record with all
// five label cells empty is an unlabeled document.

namespace detail {

// Reads one CSV record (quoted fields may contain commas, doubled quotes and
// newlines). Returns false at end of input.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields,
                            std::size_t record_number) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;
  std::string field;
  bool in_quotes = false;
  while (true) {
    if (c == EOF) {
      if (in_quotes)
        throw Error("unterminated quote at row " +
                    std::to_string(record_number));
      fields.push_back(field);
      return true;
    }
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch == '\n') {
      fields.push_back(field);
      return true;
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get();
      fields.push_back(field);
      return true;
    } else {
      field.push_back(ch);
    }
    c = in.get();
  }
}

inline std::string csv_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace detail

inline const std::array<const char*, 7>& essay_columns() {
  static const std::array<const char*, 7> cols = {
      "id", "text", "cEXT", "cNEU", "cAGR", "cCON", "cOPN"};
  return cols;
}

// Column order is resolved from the header, so permuted or extended tables
// still load as long as all seven named columns are present.
inline std::vector<Document> load_essays_stream(std::istream& in,
                                                const std::string& what) {
  // Skip metadata comment lines before the header.
  while (in.peek() == '#') {
    std::string line;
    std::getline(in, line);
  }

  std::vector<std::string> fields;
  if (!detail::read_csv_record(in, fields, 1))
    throw Error(what + ": empty file, expected header row");

  std::array<std::size_t, 7> col{};
  for (std::size_t c = 0; c < essay_columns().size(); ++c) {
    bool found = false;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (trim(fields[i]) == essay_columns()[c]) {
        col[c] = i;
        found = true;
        break;
      }
    }
    if (!found)
      throw Error(what + ": header is missing column " +
                  std::string(essay_columns()[c]));
  }
  const std::size_t width = fields.size();

  std::vector<Document> docs;
  std::size_t row = 1;  // header is row 1
  while (detail::read_csv_record(in, fields, row + 1)) {
    ++row;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != width)
      throw Error(what + ": malformed row " + std::to_string(row) +
                  ": expected " + std::to_string(width) + " columns, got " +
                  std::to_string(fields.size()));

    std::optional<TraitLabels> labels;
    std::size_t empty_labels = 0;
    TraitLabels parsed{};
    for (std::size_t t = 0; t < kTraitCount; ++t) {
      const std::string& cell = fields[col[2 + t]];
      if (cell.empty()) {
        ++empty_labels;
      } else if (cell == "y") {
        parsed[t] = true;
      } else if (cell == "n") {
        parsed[t] = false;
      } else {
        throw Error(what + ": unknown label at row " + std::to_string(row) +
                    ", column " + essay_columns()[2 + t]);
      }
    }
    if (empty_labels == 0) {
      labels = parsed;
    } else if (empty_labels != kTraitCount) {
      throw Error(what + ": row " + std::to_string(row) +
                  " has a partial label set; give all five traits or none");
    }
    docs.push_back(make_document(fields[col[0]], fields[col[1]], labels));
  }
  return docs;
}

inline std::vector<Document> load_essays(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_essays: cannot open " + path);
  return load_essays_stream(in, "load_essays(" + path + ")");
}

// Serializes documents back to the essay table. The text field is the tokens
// joined by spaces, so load(save(docs)) reproduces ids, tokens and labels.
inline void save_essays_stream(const std::vector<Document>& docs,
                               std::ostream& out,
                               const std::vector<std::string>& header_comments =
                                   {}) {
  for (const auto& c : header_comments) out << "#" << c << "\n";
  out << "id,text,cEXT,cNEU,cAGR,cCON,cOPN\n";
  for (const Document& doc : docs) {
    std::string text;
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (i) text += ' ';
      text += doc.tokens[i];
    }
    out << detail::csv_quote(doc.id) << "," << detail::csv_quote(text);
    for (std::size_t t = 0; t < kTraitCount; ++t) {
      out << ",";
      if (doc.labels) out << ((*doc.labels)[t] ? "y" : "n");
    }
    out << "\n";
  }
}

inline void save_essays(const std::vector<Document>& docs,
                        const std::string& path,
                        const std::vector<std::string>& header_comments = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_essays: cannot open " + path);
  save_essays_stream(docs, out, header_comments);
  if (!out) throw Error("save_essays: write failed: " + path);
}

// ---------------------------------------------------------------------------
// Tweet corpus (one tweet per line, labels from emotion hashtags)

struct LabeledTweet {
  std::vector<std::string> tokens;    // content words; hashtags excluded
  std::set<std::string> hashtags;     // inventory categories only, non-empty
};

// One category name per line; '#' comments and blank lines ignored. A leading
// '#' on a name is tolerated so inventories can be written as hashtag lists.
inline std::set<std::string> load_inventory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_inventory: cannot open " + path);
  std::set<std::string> inventory;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view name = trim(line);
    if (name.empty()) continue;
    if (name[0] == '#') {
      name.remove_prefix(1);
      name = trim(name);
      if (name.empty()) continue;
    }
    inventory.insert(lower_ascii(name));
  }
  return inventory;
}

// Lines whose hashtag set does not intersect the inventory are dropped;
// hashtags outside the inventory are discarded entirely.
inline std::vector<LabeledTweet> load_tweets(
    const std::string& path, const std::set<std::string>& inventory) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_tweets: cannot open " + path);
  std::vector<LabeledTweet> tweets;
  std::string line;
  while (std::getline(in, line)) {
    TokenizedText toks = tokenize(line);
    LabeledTweet tweet;
    for (std::string& tag : toks.hashtags)
      if (inventory.count(tag)) tweet.hashtags.insert(std::move(tag));
    if (tweet.hashtags.empty()) continue;
    tweet.tokens = std::move(toks.words);
    tweets.push_back(std::move(tweet));
  }
  if (in.bad()) throw Error("load_tweets: read failed: " + path);
  return tweets;
}

}  // namespace affectlex
