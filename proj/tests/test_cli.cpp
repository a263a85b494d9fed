#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "affectlex/cli.hpp"

using namespace affectlex;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

const std::string kData = AFFECTLEX_DATA_DIR;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI in-process with stdout/stderr captured.
CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
  CliResult result;
  try {
    result.code = cli::run(args);
  } catch (...) {
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    throw;
  }
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "affectlex-test-cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string at(const std::string& name) { return (scratch() / name).string(); }

// Synthesizes a small planted-signal corpus under scratch()/name and returns
// the directory. Each test case regenerates its own copy so cases stay
// independent of execution order.
std::string make_synth(const std::string& name) {
  const std::string dir = at(name);
  const CliResult r = run_cli({"synth", "--out-dir", dir, "--seed", "21",
                               "--docs", "60", "--categories", "3",
                               "--signal", "4", "--tokens", "40"});
  REQUIRE(r.code == 0);
  REQUIRE(fs::exists(fs::path(dir) / "corpus.csv"));
  REQUIRE(fs::exists(fs::path(dir) / "lexicon.tsv"));
  REQUIRE(fs::exists(fs::path(dir) / "meta.tsv"));
  return dir;
}

const double* score_of(const AffectLexicon& lex, const std::string& category,
                       const std::string& term) {
  return lex.score(lex.require_category(category), term);
}

std::size_t data_lines(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++n;
  return n;
}

}  // namespace

TEST_CASE("cli exit codes distinguish usage and data errors") {
  CHECK(run_cli({}).code == 1);

  const CliResult help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK_THAT(help.out, ContainsSubstring("build-lexicon"));

  CHECK(run_cli({"train", "--bogus"}).code == 1);
  CHECK(run_cli({"no-such-command"}).code == 1);

  const CliResult missing =
      run_cli({"build-lexicon", "--tweets", at("no_such_file.txt"),
               "--inventory", kData + "/inventory.txt", "--out",
               at("never.tsv")});
  CHECK(missing.code == 2);
  CHECK_THAT(missing.err, ContainsSubstring("error:"));
  CHECK_THAT(missing.err, ContainsSubstring("cannot open"));
}

TEST_CASE("cli build-lexicon writes the PMI lexicon") {
  const std::string out = at("hashtag_pmi.tsv");
  const CliResult r =
      run_cli({"build-lexicon", "--tweets", kData + "/four_tweets.txt",
               "--inventory", kData + "/inventory.txt", "--out", out});
  REQUIRE(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("wrote " + out));
  CHECK_THAT(r.out, ContainsSubstring("2 categories, 7 entries"));

  const AffectLexicon lex = load_affect_lexicon(out);
  CHECK(lex.kind == LexiconKind::pmi_association);
  REQUIRE(lex.categories == std::vector<std::string>{"apart", "possessive"});
  // "mine" appears in 2 of 4 tweets, both tagged possessive:
  // log2(2 * 4 / (2 * 2)) = 1.
  const double* mine = score_of(lex, "possessive", "mine");
  REQUIRE(mine != nullptr);
  CHECK(*mine == 1.0);
  // "you" co-occurs once with each category and twice overall: PMI 0,
  // dropped by default.
  CHECK(score_of(lex, "possessive", "you") == nullptr);
  CHECK(score_of(lex, "apart", "you") == nullptr);

  const std::string kept = at("hashtag_pmi_nonpos.tsv");
  REQUIRE(run_cli({"build-lexicon", "--tweets", kData + "/four_tweets.txt",
                   "--inventory", kData + "/inventory.txt", "--out", kept,
                   "--keep-nonpositive"})
              .code == 0);
  const AffectLexicon lex2 = load_affect_lexicon(kept);
  CHECK(lex2.entry_count() == 9);
  const double* you = score_of(lex2, "possessive", "you");
  REQUIRE(you != nullptr);
  CHECK(*you == 0.0);

  const std::string strict = at("hashtag_pmi_freq2.tsv");
  REQUIRE(run_cli({"build-lexicon", "--tweets", kData + "/four_tweets.txt",
                   "--inventory", kData + "/inventory.txt", "--out", strict,
                   "--min-word-freq", "2"})
              .code == 0);
  const AffectLexicon lex3 = load_affect_lexicon(strict);
  CHECK(lex3.entry_count() == 1);
  CHECK(score_of(lex3, "possessive", "mine") != nullptr);
}

TEST_CASE("cli build-ic-lexicon takes the max synset IC per word") {
  const std::string out = at("ic.tsv");
  const CliResult r =
      run_cli({"build-ic-lexicon", "--ic", kData + "/synset_ic_sample.tsv",
               "--index", kData + "/synset_index_sample.tsv", "--out", out});
  REQUIRE(r.code == 0);
  CHECK_THAT(r.out, ContainsSubstring("6 entries"));

  const AffectLexicon lex = load_affect_lexicon(out);
  CHECK(lex.kind == LexiconKind::information_content);
  const double* ball_n = score_of(lex, "noun_ic", "ball");
  REQUIRE(ball_n != nullptr);
  CHECK(*ball_n == 7.1);  // max over n00001 (3.2) and n00002 (7.1)
  const double* ball_v = score_of(lex, "verb_ic", "ball");
  REQUIRE(ball_v != nullptr);
  CHECK(*ball_v == 2.75);
  const double* telescope = score_of(lex, "noun_ic", "telescope");
  REQUIRE(telescope != nullptr);
  CHECK(*telescope == 12.25);
}

TEST_CASE("cli extract, train and predict round trip through files") {
  const std::string dir = make_synth("roundtrip");
  const std::string corpus = dir + "/corpus.csv";
  const std::string lexicon = dir + "/lexicon.tsv";
  const std::string matrix_path = at("roundtrip_matrix.tsv");

  const CliResult ex =
      run_cli({"extract", "--dataset", corpus, "--out", matrix_path,
               "--sets", "fine_emo", "--fine-emo-lex", lexicon});
  REQUIRE(ex.code == 0);
  CHECK_THAT(ex.out, ContainsSubstring("60 x 3"));
  const FeatureMatrix matrix = load_feature_matrix(matrix_path);
  REQUIRE(matrix.n_rows() == 60);
  REQUIRE(matrix.n_cols() == 3);
  CHECK(matrix.names[0].rfind("fine_emo:", 0) == 0);
  REQUIRE(!matrix.labels.empty());
  CHECK(matrix.labels.front().has_value());

  const std::string model_path = at("roundtrip_model.tsv");
  const CliResult tr = run_cli({"train", "--matrix", matrix_path, "--trait",
                                "EXT", "--out", model_path, "--epochs", "80",
                                "--polish-rounds", "120", "--seed", "3"});
  REQUIRE(tr.code == 0);
  CHECK_THAT(tr.out, ContainsSubstring("objective"));
  const TrainedModel model = load_model(model_path);
  CHECK(model.kind == TrainedModel::Kind::svm);
  CHECK(model.trait == "EXT");
  CHECK(model.feature_names == matrix.names);

  const std::string pred_path = at("roundtrip_pred.tsv");
  const CliResult pr = run_cli(
      {"predict", "--matrix", matrix_path, "--model", model_path, "--out",
       pred_path});
  REQUIRE(pr.code == 0);
  CHECK_THAT(pr.out, ContainsSubstring("macro_f1 "));

  const std::string pred = read_file(pred_path);
  CHECK_THAT(pred, ContainsSubstring("id\tprediction\tmargin\tgold"));
  CHECK(data_lines(pred) == 61);  // header + one row per document
  std::istringstream rows(pred);
  std::string line;
  std::size_t checked = 0;
  while (std::getline(rows, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("id\t", 0) == 0)
      continue;
    const auto fields = split(line, '\t');
    REQUIRE(fields.size() == 4);
    CHECK((fields[1] == "y" || fields[1] == "n"));
    CHECK((fields[3] == "y" || fields[3] == "n"));
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("cli predict rejects a matrix with a different schema") {
  const std::string dir = make_synth("schema");
  const std::string matrix_path = at("schema_matrix.tsv");
  REQUIRE(run_cli({"extract", "--dataset", dir + "/corpus.csv", "--out",
                   matrix_path, "--sets", "fine_emo", "--fine-emo-lex",
                   dir + "/lexicon.tsv"})
              .code == 0);
  const std::string model_path = at("schema_model.tsv");
  REQUIRE(run_cli({"train", "--matrix", matrix_path, "--trait", "NEU",
                   "--out", model_path, "--epochs", "40", "--polish-rounds",
                   "60"})
              .code == 0);

  const std::string other_matrix = at("schema_other.tsv");
  REQUIRE(run_cli({"extract", "--dataset", dir + "/corpus.csv", "--out",
                   other_matrix, "--sets", "baseline", "--categories-lex",
                   kData + "/mairesse_categories.txt"})
              .code == 0);
  const CliResult pr =
      run_cli({"predict", "--matrix", other_matrix, "--model", model_path,
               "--out", at("schema_pred.tsv")});
  CHECK(pr.code == 2);
  CHECK_THAT(pr.err, ContainsSubstring("schema does not match"));
}

TEST_CASE("cli trains the majority baseline when asked") {
  const std::string dir = make_synth("majority");
  const std::string matrix_path = at("majority_matrix.tsv");
  REQUIRE(run_cli({"extract", "--dataset", dir + "/corpus.csv", "--out",
                   matrix_path, "--sets", "fine_emo", "--fine-emo-lex",
                   dir + "/lexicon.tsv"})
              .code == 0);
  const std::string model_path = at("majority_model.tsv");
  REQUIRE(run_cli({"train", "--matrix", matrix_path, "--trait", "AGR",
                   "--out", model_path, "--majority"})
              .code == 0);
  const TrainedModel model = load_model(model_path);
  CHECK(model.kind == TrainedModel::Kind::majority);

  const std::string pred_path = at("majority_pred.tsv");
  REQUIRE(run_cli({"predict", "--matrix", matrix_path, "--model", model_path,
                   "--out", pred_path})
              .code == 0);
  // A majority model votes the same way on every row.
  std::istringstream rows(read_file(pred_path));
  std::string line, first_vote;
  while (std::getline(rows, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("id\t", 0) == 0)
      continue;
    const auto fields = split(line, '\t');
    REQUIRE(fields.size() >= 2);
    if (first_vote.empty())
      first_vote = fields[1];
    else
      CHECK(fields[1] == first_vote);
  }
  CHECK(!first_vote.empty());
}

TEST_CASE("cli evaluate runs an experiment config end to end") {
  const std::string dir = make_synth("evaluate");
  const std::string results = at("evaluate_results");
  const std::string cfg_path = at("evaluate.cfg");
  {
    std::ofstream cfg(cfg_path, std::ios::binary);
    cfg << "dataset = " << dir << "/corpus.csv\n"
        << "out_dir = " << results << "\n"
        << "k = 3\n"
        << "repetitions = 2\n"
        << "seeds = 11,22\n"
        << "epochs = 60\n"
        << "polish_rounds = 80\n"
        << "lexicon.fine_emo = " << dir << "/lexicon.tsv\n"
        << "run.majority = majority\n"
        << "run.emo = fine_emo\n"
        << "compare = majority\n";
  }
  const CliResult ev = run_cli({"evaluate", "--config", cfg_path, "--jobs",
                                "2"});
  REQUIRE(ev.code == 0);
  CHECK_THAT(ev.out, ContainsSubstring("report.tsv"));
  CHECK_THAT(ev.out, ContainsSubstring("report.txt"));
  const std::string tsv = read_file((fs::path(results) / "report.tsv")
                                        .string());
  CHECK(tsv.rfind("#config=", 0) == 0);
  CHECK_THAT(tsv, ContainsSubstring("#seeds=11,22\n"));
  CHECK_THAT(tsv, ContainsSubstring("majority\tmajority\tEXT\t"));
  CHECK_THAT(tsv, ContainsSubstring("emo\tfine_emo\tOPN\t"));
}

TEST_CASE("cli evaluate names the feature set missing its lexicon") {
  const std::string dir = make_synth("missing_lex");
  const std::string cfg_path = at("missing_lex.cfg");
  {
    std::ofstream cfg(cfg_path, std::ios::binary);
    cfg << "dataset = " << dir << "/corpus.csv\n"
        << "out_dir = " << at("missing_lex_results") << "\n"
        << "k = 3\n"
        << "repetitions = 2\n"
        << "run.emo = fine_emo\n";
  }
  const CliResult ev = run_cli({"evaluate", "--config", cfg_path});
  CHECK(ev.code == 2);
  CHECK_THAT(ev.err, ContainsSubstring("feature set 'fine_emo'"));
  CHECK_THAT(ev.err, ContainsSubstring("lexicon.fine_emo is not set"));
}

TEST_CASE("cli rank-features writes gain rankings") {
  const std::string dir = make_synth("rank");
  const std::string matrix_path = at("rank_matrix.tsv");
  REQUIRE(run_cli({"extract", "--dataset", dir + "/corpus.csv", "--out",
                   matrix_path, "--sets", "fine_emo", "--fine-emo-lex",
                   dir + "/lexicon.tsv"})
              .code == 0);

  const std::string out = at("rank_ext.tsv");
  const CliResult single = run_cli({"rank-features", "--matrix", matrix_path,
                                    "--trait", "EXT", "--top", "2", "--out",
                                    out});
  REQUIRE(single.code == 0);
  const std::string ranking = read_file(out);
  CHECK(ranking.rfind("#config=", 0) == 0);
  CHECK_THAT(ranking, ContainsSubstring("EXT\t1\tfine_emo:"));
  CHECK(data_lines(ranking) == 2);

  const std::string all_dir = at("rank_all");
  const CliResult all = run_cli({"rank-features", "--matrix", matrix_path,
                                 "--trait", "all", "--top", "3", "--out-dir",
                                 all_dir});
  REQUIRE(all.code == 0);
  for (const char* trait : {"EXT", "NEU", "AGR", "CON", "OPN"}) {
    const std::string path =
        (fs::path(all_dir) / ("ranking_" + std::string(trait) + ".tsv"))
            .string();
    REQUIRE(fs::exists(path));
    CHECK(data_lines(read_file(path)) == 3);
  }

  const CliResult no_dir = run_cli(
      {"rank-features", "--matrix", matrix_path, "--trait", "all"});
  CHECK(no_dir.code == 2);
  CHECK_THAT(no_dir.err, ContainsSubstring("--out-dir"));

  const CliResult bad_trait =
      run_cli({"rank-features", "--matrix", matrix_path, "--trait", "XYZ",
               "--out", at("rank_bad.tsv")});
  CHECK(bad_trait.code == 2);
  CHECK_THAT(bad_trait.err, ContainsSubstring("unknown trait"));
}

TEST_CASE("cli top-terms prints the highest scoring entries") {
  const CliResult top =
      run_cli({"top-terms", "--lexicon", kData + "/hashtag_excerpt.tsv",
               "--category", "possessive", "--n", "2"});
  REQUIRE(top.code == 0);
  CHECK(top.out == "possessive\t7.228\nhottie\t6.448\n");

  const CliResult five =
      run_cli({"top-terms", "--lexicon", kData + "/hashtag_excerpt.tsv",
               "--category", "possessive"});
  REQUIRE(five.code == 0);
  CHECK(data_lines(five.out) == 5);

  const CliResult unknown =
      run_cli({"top-terms", "--lexicon", kData + "/hashtag_excerpt.tsv",
               "--category", "joyful"});
  CHECK(unknown.code == 2);
  CHECK_THAT(unknown.err, ContainsSubstring("unknown lexicon category"));
}

TEST_CASE("cli synth validates parameters") {
  const CliResult tiny =
      run_cli({"synth", "--out-dir", at("tiny"), "--docs", "5"});
  CHECK(tiny.code == 2);
  CHECK_THAT(tiny.err, ContainsSubstring("at least 30"));

  const std::string dir = make_synth("synth_meta");
  const std::string meta = read_file(dir + "/meta.tsv");
  CHECK(meta.rfind("#config=", 0) == 0);
  CHECK_THAT(meta, ContainsSubstring("n_docs\t60"));
  CHECK_THAT(meta, ContainsSubstring("seed\t21"));
}
