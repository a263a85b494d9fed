// Linear max-margin trait classifiers trained from scratch.
//
// Primal objective: min over (w, b) of 1/2 ||w||^2 + C * sum_i hinge_i with
// hinge_i = max(0, 1 - y_i (w.x_i + b)) and an unregularized bias. Training
// runs a Pegasos-style stochastic subgradient pass (step 1/(lambda t),
// lambda = 1/(C n)) followed by a deterministic annealed full-batch polish
// with exact bias minimization; the best iterate by exact objective wins.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "affectlex/rng.hpp"
#include "affectlex/util.hpp"

namespace affectlex {

struct SvmOptions {
  double c = 1.0;
  std::size_t epochs = 200;        // stochastic passes over the data
  std::size_t polish_rounds = 400; // annealed full-batch refinement steps
  std::uint64_t seed = 1;
  bool standardize = true;
};

// 1/2||w||^2 + C * sum of hinges, evaluated on rows as given (no scaling).
inline double svm_primal_objective(std::span<const double> weights, double bias,
                                   double c,
                                   const std::vector<std::vector<double>>& rows,
                                   const std::vector<bool>& labels) {
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  double hinge = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double s = bias;
    for (std::size_t j = 0; j < weights.size(); ++j)
      s += weights[j] * rows[i][j];
    const double y = labels[i] ? 1.0 : -1.0;
    const double h = 1.0 - y * s;
    if (h > 0.0) hinge += h;
  }
  return 0.5 * reg + c * hinge;
}

// A trained per-trait model: either a linear classifier over standardized
// features or a constant majority vote. Margin ties predict yes.
struct TrainedModel {
  enum class Kind { svm, majority };

  Kind kind = Kind::svm;
  std::uint64_t schema_hash = 0;
  std::string trait;  // trait name, empty when not tied to one
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> stdevs;
  double bias = 0.0;
  bool majority_yes = true;
  double objective = 0.0;  // achieved primal objective in training space
  SvmOptions options;
  // Extra metadata (config hash, seed list, ...) carried through save/load.
  std::vector<std::pair<std::string, std::string>> extras;

  double margin(std::span<const double> x) const {
    if (kind == Kind::majority) return majority_yes ? 1.0 : -1.0;
    if (x.size() != weights.size())
      throw Error("model expects " + std::to_string(weights.size()) +
                  " features, got " + std::to_string(x.size()));
    double s = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      if (weights[j] == 0.0) continue;
      const double z = stdevs[j] > 0.0 ? (x[j] - means[j]) / stdevs[j] : 0.0;
      s += weights[j] * z;
    }
    return s;
  }

  bool predict(std::span<const double> x) const { return margin(x) >= 0.0; }
};

namespace detail {

// Exact minimizer of sum_i max(0, 1 - y_i (s_i + b)) over the unregularized
// bias. The sum is convex piecewise linear in b with every breakpoint adding
// +1 to the slope, so the minimum sits at the P-th smallest breakpoint where
// P is the number of positive examples.
inline double best_bias(const std::vector<double>& scores,
                        const std::vector<bool>& labels) {
  std::vector<double> breaks(scores.size());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    breaks[i] = labels[i] ? 1.0 - scores[i] : -1.0 - scores[i];
    if (labels[i]) ++positives;
  }
  std::sort(breaks.begin(), breaks.end());
  if (positives == 0) return breaks.front();
  return breaks[positives - 1];
}

}  // namespace detail

inline TrainedModel train_svm(const std::vector<std::vector<double>>& rows,
                              const std::vector<bool>& labels,
                              std::vector<std::string> feature_names,
                              std::uint64_t schema_hash,
                              const SvmOptions& options = {}) {
  const std::size_t n = rows.size();
  if (n == 0) throw Error("train_svm: empty training set");
  if (labels.size() != n)
    throw Error("train_svm: label count does not match row count");
  const std::size_t d = feature_names.size();
  if (d == 0) throw Error("train_svm: no features");
  for (const auto& row : rows)
    if (row.size() != d)
      throw Error("train_svm: row width does not match feature count");
  if (!(options.c > 0.0)) throw Error("train_svm: C must be positive");

  TrainedModel model;
  model.kind = TrainedModel::Kind::svm;
  model.schema_hash = schema_hash;
  model.feature_names = std::move(feature_names);
  model.options = options;
  model.means.assign(d, 0.0);
  model.stdevs.assign(d, 1.0);
  model.weights.assign(d, 0.0);

  if (options.standardize) {
    for (std::size_t j = 0; j < d; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += rows[i][j];
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double delta = rows[i][j] - mean;
        var += delta * delta;
      }
      var /= static_cast<double>(n);
      model.means[j] = mean;
      model.stdevs[j] = std::sqrt(var);
    }
  }

  // Standardized copy; zero-variance columns become all zero and keep their
  // weights at exactly zero throughout.
  std::vector<std::vector<double>> x(n, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      x[i][j] = model.stdevs[j] > 0.0
                    ? (rows[i][j] - model.means[j]) / model.stdevs[j]
                    : 0.0;

  std::size_t positives = 0;
  for (bool y : labels)
    if (y) ++positives;
  if (positives == 0 || positives == n)
    throw Error("train_svm: degenerate training set (single-class input)");

  const double c = options.c;
  const double lambda = 1.0 / (c * static_cast<double>(n));

  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<double> best_w = w;
  double best_b = b;
  double best_obj = svm_primal_objective(w, b, c, x, labels);

  auto score = [&](const std::vector<double>& weights, double bias,
                   std::size_t i) {
    double s = bias;
    for (std::size_t j = 0; j < d; ++j) s += weights[j] * x[i][j];
    return s;
  };
  auto consider = [&](const std::vector<double>& weights, double bias) {
    const double obj = svm_primal_objective(weights, bias, c, x, labels);
    if (obj < best_obj) {
      best_obj = obj;
      best_w = weights;
      best_b = bias;
    }
  };

  // Phase 1: Pegasos-style stochastic subgradient, step 1/(lambda t).
  Rng rng(options.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double y = labels[i] ? 1.0 : -1.0;
      const bool violated = y * score(w, b, i) < 1.0;
      const double decay = 1.0 - eta * lambda;
      for (std::size_t j = 0; j < d; ++j) {
        w[j] *= decay;
        if (violated) w[j] += eta * y * x[i][j];
      }
      if (violated) b += eta * y;
    }
    consider(w, b);
  }

  // Phase 2: deterministic annealed full-batch subgradient on the normalized
  // objective lambda/2 ||w||^2 + mean hinge, with the bias re-minimized
  // exactly each round. Geometric step decay trades early mobility for late
  // precision; the best iterate seen is kept.
  if (options.polish_rounds > 0) {
    w = best_w;
    b = best_b;
    std::vector<double> scores(n, 0.0);
    std::vector<double> grad(d, 0.0);
    const double eta0 = 1.0;
    const double eta_min = 1e-9;
    const double rho =
        std::pow(eta_min / eta0,
                 1.0 / static_cast<double>(options.polish_rounds));
    double eta = eta0;
    for (std::size_t round = 0; round < options.polish_rounds; ++round) {
      for (std::size_t i = 0; i < n; ++i) scores[i] = score(w, b, i);
      for (std::size_t j = 0; j < d; ++j) grad[j] = lambda * w[j];
      double grad_b = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double y = labels[i] ? 1.0 : -1.0;
        if (y * scores[i] < 1.0) {
          const double coeff = -y / static_cast<double>(n);
          for (std::size_t j = 0; j < d; ++j) grad[j] += coeff * x[i][j];
          grad_b += coeff;
        }
      }
      for (std::size_t j = 0; j < d; ++j) w[j] -= eta * grad[j];
      b -= eta * grad_b;
      for (std::size_t i = 0; i < n; ++i) scores[i] = score(w, 0.0, i);
      b = detail::best_bias(scores, labels);
      consider(w, b);
      eta *= rho;
    }
  }

  for (std::size_t j = 0; j < d; ++j)
    if (model.stdevs[j] == 0.0) best_w[j] = 0.0;
  model.weights = std::move(best_w);
  model.bias = best_b;
  model.objective = best_obj;
  return model;
}

inline TrainedModel train_majority(const std::vector<bool>& labels,
                                   std::uint64_t schema_hash = 0) {
  if (labels.empty()) throw Error("train_majority: empty training set");
  std::size_t yes = 0;
  for (bool y : labels)
    if (y) ++yes;
  TrainedModel model;
  model.kind = TrainedModel::Kind::majority;
  model.schema_hash = schema_hash;
  model.majority_yes = 2 * yes >= labels.size();  // tie goes to yes
  return model;
}

// ---------------------------------------------------------------------------
// Model files: '#key=value' metadata, then one tab-separated row per feature
// (name, mean, stdev, weight) and a final `bias<TAB>value` row. Doubles use
// shortest round-trip formatting so save/load is exact.

inline void save_model_stream(const TrainedModel& model, std::ostream& out) {
  out << "#kind=" << (model.kind == TrainedModel::Kind::svm ? "svm"
                                                            : "majority")
      << "\n";
  out << "#schema=" << hex64(model.schema_hash) << "\n";
  if (!model.trait.empty()) out << "#trait=" << model.trait << "\n";
  for (const auto& [key, value] : model.extras)
    out << "#" << key << "=" << value << "\n";
  if (model.kind == TrainedModel::Kind::majority) {
    out << "#majority=" << (model.majority_yes ? "y" : "n") << "\n";
    return;
  }
  out << "#c=" << fmt_double(model.options.c) << "\n";
  out << "#epochs=" << model.options.epochs << "\n";
  out << "#polish_rounds=" << model.options.polish_rounds << "\n";
  out << "#seed=" << model.options.seed << "\n";
  out << "#standardize=" << (model.options.standardize ? 1 : 0) << "\n";
  out << "#objective=" << fmt_double(model.objective) << "\n";
  for (std::size_t j = 0; j < model.weights.size(); ++j)
    out << model.feature_names[j] << "\t" << fmt_double(model.means[j])
        << "\t" << fmt_double(model.stdevs[j]) << "\t"
        << fmt_double(model.weights[j]) << "\n";
  out << "bias\t" << fmt_double(model.bias) << "\n";
}

inline void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_model: cannot open " + path);
  save_model_stream(model, out);
  if (!out) throw Error("save_model: write failed: " + path);
}

inline TrainedModel load_model_stream(std::istream& in,
                                      const std::string& what) {
  TrainedModel model;
  std::string line;
  std::size_t line_no = 0;
  bool kind_seen = false;
  bool bias_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = what + ": line " + std::to_string(line_no);
    if (line[0] == '#') {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw Error(where + ": malformed metadata line");
      const std::string key = line.substr(1, eq - 1);
      const std::string value = line.substr(eq + 1);
      if (key == "kind") {
        if (value == "svm") model.kind = TrainedModel::Kind::svm;
        else if (value == "majority") model.kind = TrainedModel::Kind::majority;
        else throw Error(where + ": unknown model kind '" + value + "'");
        kind_seen = true;
      } else if (key == "schema") {
        model.schema_hash = parse_hex64(value, where);
      } else if (key == "trait") {
        model.trait = value;
      } else if (key == "majority") {
        if (value != "y" && value != "n")
          throw Error(where + ": majority must be y or n");
        model.majority_yes = value == "y";
      } else if (key == "c") {
        model.options.c = parse_double(value, where);
      } else if (key == "epochs") {
        model.options.epochs =
            static_cast<std::size_t>(parse_int(value, where));
      } else if (key == "polish_rounds") {
        model.options.polish_rounds =
            static_cast<std::size_t>(parse_int(value, where));
      } else if (key == "seed") {
        model.options.seed =
            static_cast<std::uint64_t>(parse_int(value, where));
      } else if (key == "standardize") {
        model.options.standardize = parse_int(value, where) != 0;
      } else if (key == "objective") {
        model.objective = parse_double(value, where);
      } else {
        model.extras.emplace_back(key, value);
      }
      continue;
    }
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() == 2 && cols[0] == "bias") {
      if (bias_seen) throw Error(where + ": duplicate bias row");
      model.bias = parse_double(cols[1], where);
      bias_seen = true;
      continue;
    }
    if (bias_seen)
      throw Error(where + ": feature row after the final bias row");
    if (cols.size() != 4)
      throw Error(where + ": expected name, mean, stdev, weight");
    model.feature_names.push_back(cols[0]);
    model.means.push_back(parse_double(cols[1], where));
    model.stdevs.push_back(parse_double(cols[2], where));
    model.weights.push_back(parse_double(cols[3], where));
  }
  if (!kind_seen) throw Error(what + ": missing #kind line");
  if (model.kind == TrainedModel::Kind::svm && !bias_seen)
    throw Error(what + ": missing bias row");
  if (model.kind == TrainedModel::Kind::majority &&
      !model.feature_names.empty())
    throw Error(what + ": majority model must not carry feature rows");
  return model;
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_model: cannot open " + path);
  return load_model_stream(in, "load_model(" + path + ")");
}

}  // namespace affectlex
