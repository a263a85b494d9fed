#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "affectlex/learner.hpp"
#include "affectlex/rng.hpp"
#include "oracles.hpp"

using namespace affectlex;
using Catch::Matchers::ContainsSubstring;

namespace {

using Rows = std::vector<std::vector<double>>;

std::vector<std::string> names_for(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j)
    names.push_back("set:f" + std::to_string(j));
  return names;
}

TrainedModel fit(const Rows& rows, const std::vector<bool>& labels,
                 SvmOptions options = {}) {
  return train_svm(rows, labels, names_for(rows[0].size()), 0, options);
}

}  // namespace

TEST_CASE("separable 1-D data is classified perfectly") {
  const Rows rows = {{-2.0}, {-1.5}, {-1.0}, {1.0}, {1.5}, {2.0}};
  const std::vector<bool> labels = {false, false, false, true, true, true};
  const TrainedModel model = fit(rows, labels);
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(model.predict(rows[i]) == labels[i]);
  CHECK(model.kind == TrainedModel::Kind::svm);
  CHECK(std::isfinite(model.objective));
}

TEST_CASE("xor is not linearly separable") {
  const Rows rows = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  const std::vector<bool> labels = {false, true, true, false};
  const TrainedModel model = fit(rows, labels);
  int correct = 0;
  for (std::size_t i = 0; i < 4; ++i)
    if (model.predict(rows[i]) == labels[i]) ++correct;
  CHECK(correct <= 3);  // accuracy at most 0.75
}

TEST_CASE("single-class training data is rejected") {
  CHECK_THROWS_WITH(fit({{1.0}, {2.0}}, {true, true}),
                    ContainsSubstring("degenerate training set"));
  CHECK_THROWS_AS(fit({{1.0}, {2.0}}, {false, false}), Error);
}

TEST_CASE("constant columns get weight exactly zero") {
  const Rows rows = {{3.0, -1.0}, {3.0, -0.5}, {3.0, 0.5}, {3.0, 1.0}};
  const std::vector<bool> labels = {false, false, true, true};
  const TrainedModel model = fit(rows, labels);
  CHECK(model.stdevs[0] == 0.0);
  CHECK(model.weights[0] == 0.0);
  const std::vector<double> hi = {3.0, 2.0}, lo = {3.0, -2.0};
  const std::vector<double> far = {999.0, 2.0};
  CHECK(model.predict(hi));
  CHECK_FALSE(model.predict(lo));
  // The constant value itself must not matter at predict time.
  CHECK(model.margin(hi) == model.margin(far));
}

TEST_CASE("training is deterministic") {
  Rows rows;
  std::vector<bool> labels;
  Rng rng(11);
  for (int i = 0; i < 30; ++i) {
    rows.push_back({rng.next_gaussian(), rng.next_gaussian()});
    labels.push_back(rows.back()[0] + 0.3 * rng.next_gaussian() > 0);
  }
  labels[0] = true;
  labels[1] = false;
  const TrainedModel a = fit(rows, labels);
  const TrainedModel b = fit(rows, labels);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
  CHECK(a.objective == b.objective);
}

TEST_CASE("standardization makes labels invariant to feature scaling") {
  Rows rows;
  std::vector<bool> labels;
  Rng rng(3);
  for (int i = 0; i < 40; ++i) {
    const double x = rng.next_gaussian(), y = rng.next_gaussian();
    rows.push_back({x, y});
    labels.push_back(x + y > 0.2);
  }
  Rows scaled = rows;
  for (auto& r : scaled) {
    r[0] *= 1000.0;
    r[1] *= 0.001;
  }
  const TrainedModel a = fit(rows, labels);
  const TrainedModel b = fit(scaled, labels);
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(a.predict(rows[i]) == b.predict(scaled[i]));
}

TEST_CASE("larger C fits the training data at least as well") {
  Rows rows;
  std::vector<bool> labels;
  Rng rng(19);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.next_gaussian(), y = rng.next_gaussian();
    rows.push_back({x, y});
    labels.push_back(x - 0.5 * y + 0.4 * rng.next_gaussian() > 0);
  }
  const auto accuracy = [&](double c) {
    SvmOptions opts;
    opts.c = c;
    const TrainedModel model = fit(rows, labels, opts);
    int correct = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (model.predict(rows[i]) == labels[i]) ++correct;
    return correct;
  };
  CHECK(accuracy(100.0) >= accuracy(0.001));
}

TEST_CASE("solver objective is close to an exact coordinate-descent oracle") {
  Rng rng(101);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = 8 + rng.bounded(10);
    const std::size_t p = 1 + rng.bounded(3);
    Rows rows;
    std::vector<int> int_labels;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> r;
      for (std::size_t j = 0; j < p; ++j) r.push_back(rng.next_gaussian());
      rows.push_back(r);
      int_labels.push_back(rng.next_double() < 0.5 ? -1 : 1);
    }
    int_labels[0] = 1;
    int_labels[1] = -1;
    std::vector<bool> labels;
    for (int y : int_labels) labels.push_back(y > 0);

    SvmOptions opts;
    opts.c = 0.5;
    opts.standardize = false;  // compare in raw feature space
    const TrainedModel model = fit(rows, labels, opts);

    const auto oracle = oracles::svm_oracle(rows, labels, opts.c, 6, 77);
    INFO("trial " << trial << ": got " << model.objective << " oracle "
                  << oracle.objective);
    CHECK(model.objective <= 1.01 * oracle.objective + 1e-9);
  }
}

TEST_CASE("zero margin predicts yes") {
  TrainedModel model;
  model.kind = TrainedModel::Kind::svm;
  model.feature_names = {"set:x"};
  model.weights = {1.0};
  model.means = {0.0};
  model.stdevs = {1.0};
  model.bias = 0.0;
  const std::vector<double> zero = {0.0}, neg = {-0.5};
  CHECK(model.margin(zero) == 0.0);
  CHECK(model.predict(zero));
  CHECK_FALSE(model.predict(neg));
}

TEST_CASE("majority learner") {
  CHECK(train_majority({true, false}).predict({}));  // ties go to yes
  const TrainedModel model = train_majority({true, false, false});
  CHECK(model.kind == TrainedModel::Kind::majority);
  CHECK_FALSE(model.majority_yes);
  CHECK_FALSE(model.predict({}));
  const std::vector<double> any = {1.0, 2.0, 3.0};
  CHECK(model.predict({}) == model.predict(any));
  CHECK_THROWS_AS(train_majority({}), Error);
}

TEST_CASE("model files round-trip exactly") {
  const Rows rows = {{-2.0, 0.1}, {-1.0, -0.7}, {1.0, 0.9}, {2.0, -0.3}};
  const std::vector<bool> labels = {false, false, true, true};
  TrainedModel model =
      train_svm(rows, labels, {"set:alpha", "set:beta"}, 0xfeed, {});
  model.trait = "cAGR";
  model.extras.emplace_back("note", "round-trip");

  std::ostringstream out;
  save_model_stream(model, out);
  const std::string text = out.str();
  CHECK_THAT(text, ContainsSubstring("#kind=svm"));
  CHECK_THAT(text, ContainsSubstring("#trait=cAGR"));
  CHECK_THAT(text, ContainsSubstring("set:alpha\t"));
  CHECK_THAT(text, ContainsSubstring("\nbias\t"));
  // The bias row is last.
  CHECK(text.rfind("\nbias\t") > text.rfind("set:beta"));

  std::istringstream in(text);
  const TrainedModel again = load_model_stream(in, "t");
  CHECK(again.kind == TrainedModel::Kind::svm);
  CHECK(again.trait == "cAGR");
  CHECK(again.schema_hash == model.schema_hash);
  CHECK(again.feature_names == model.feature_names);
  CHECK(again.weights == model.weights);
  CHECK(again.means == model.means);
  CHECK(again.stdevs == model.stdevs);
  CHECK(again.bias == model.bias);
  CHECK(again.options.c == model.options.c);
  CHECK(again.extras ==
        std::vector<std::pair<std::string, std::string>>{
            {"note", "round-trip"}});
  for (const auto& row : rows)
    CHECK(again.margin(row) == model.margin(row));
}

TEST_CASE("majority model files round-trip") {
  TrainedModel model = train_majority({true, true, false});
  model.trait = "cOPN";
  std::ostringstream out;
  save_model_stream(model, out);
  std::istringstream in(out.str());
  const TrainedModel again = load_model_stream(in, "t");
  CHECK(again.kind == TrainedModel::Kind::majority);
  CHECK(again.trait == "cOPN");
  CHECK(again.majority_yes);
  const std::vector<double> wide = {123.0};
  CHECK(again.predict(wide));
}

TEST_CASE("model file parse errors") {
  const auto load = [](const std::string& text) {
    std::istringstream in(text);
    return load_model_stream(in, "t");
  };
  CHECK_THROWS_WITH(load(""), ContainsSubstring("missing #kind"));
  CHECK_THROWS_WITH(load("#kind=svm\nset:x\t0\t1\t2\n"),
                    ContainsSubstring("missing bias row"));
  CHECK_THROWS_WITH(load("#kind=svm\nset:x\t0\t1\t2\nbias\t0\nbias\t1\n"),
                    ContainsSubstring("duplicate bias row"));
  CHECK_THROWS_WITH(load("#kind=svm\nbias\t0\nset:x\t0\t1\t2\n"),
                    ContainsSubstring("after the final bias row"));
  CHECK_THROWS_WITH(load("#kind=svm\nset:x\t0\t1\nbias\t0\n"),
                    ContainsSubstring("expected name, mean, stdev, weight"));
  CHECK_THROWS_WITH(load("#kind=nope\nbias\t0\n"),
                    ContainsSubstring("unknown model kind"));
  CHECK_THROWS_WITH(load("#kind=majority\n#majority=y\nset:x\t0\t1\t2\n"),
                    ContainsSubstring("majority model"));
  CHECK_THROWS_WITH(load("#kind=svm\nset:x\t0\t1\tabc\nbias\t0\n"),
                    ContainsSubstring("number"));
}

TEST_CASE("prediction rejects wrong vector widths") {
  const TrainedModel model =
      fit({{-1.0}, {1.0}}, {false, true});
  const std::vector<double> two = {1.0, 2.0};
  CHECK_THROWS_WITH(model.margin(two),
                    ContainsSubstring("model expects 1"));
}

TEST_CASE("svm_primal_objective matches a direct computation") {
  const Rows rows = {{1.0, 0.0}, {0.0, 1.0}};
  const std::vector<bool> labels = {true, false};
  const std::vector<double> w = {0.5, -0.25};
  const double b = 0.125, c = 2.0;
  double expect = 0.5 * (0.5 * 0.5 + 0.25 * 0.25);
  expect += c * std::max(0.0, 1.0 - 1.0 * (0.5 * 1.0 + 0.125));
  expect += c * std::max(0.0, 1.0 - (-1.0) * (-0.25 + 0.125));
  CHECK(svm_primal_objective(w, b, c, rows, labels) ==
        Catch::Approx(expect).epsilon(1e-15));
}

TEST_CASE("input validation") {
  CHECK_THROWS_WITH(train_svm({}, {}, {"set:x"}, 0, {}),
                    ContainsSubstring("empty training set"));
  CHECK_THROWS_WITH(fit({{1.0}, {2.0}}, {true}),
                    ContainsSubstring("label count"));
  CHECK_THROWS_WITH(train_svm({{1.0}, {2.0}}, {true, false}, {}, 0, {}),
                    ContainsSubstring("no features"));
  CHECK_THROWS_WITH(
      train_svm({{1.0}, {2.0, 3.0}}, {true, false}, {"set:x"}, 0, {}),
      ContainsSubstring("row width"));
  SvmOptions bad;
  bad.c = 0.0;
  CHECK_THROWS_WITH(fit({{1.0}, {2.0}}, {true, false}, bad),
                    ContainsSubstring("C must be positive"));
}
