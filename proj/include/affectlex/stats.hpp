// Small statistics kit: Student t tail probabilities via the regularized
// incomplete beta function, plus the paired two-sided t-test used to compare
// cross-validation runs.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "affectlex/util.hpp"

namespace affectlex {

namespace detail {

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
// Standard formulation: converges quickly when x < (a + 1) / (a + b + 2);
// otherwise use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
inline double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  throw Error("incomplete beta: continued fraction did not converge");
}

}  // namespace detail

inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw Error("incomplete_beta: a and b must be positive");
  if (x < 0.0 || x > 1.0) throw Error("incomplete_beta: x out of [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * detail::betacf(a, b, x) / a;
  return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// Two-sided p-value for a Student t statistic with df degrees of freedom:
// P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
inline double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw Error("student_t_two_sided_p: df must be positive");
  if (!std::isfinite(t)) return 0.0;
  const double x = df / (df + t * t);
  return incomplete_beta(df / 2.0, 0.5, x);
}

inline double mean_of(std::span<const double> xs) {
  if (xs.empty()) throw Error("mean_of: empty");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

// Sample standard deviation (n - 1 denominator).
inline double sample_stdev(std::span<const double> xs) {
  if (xs.size() < 2) throw Error("sample_stdev: need at least 2 values");
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

struct PairedTTest {
  double mean_diff = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;

  bool significant_at(double alpha) const { return p < alpha; }
};

// Paired t-test on matched score sequences (a[i] vs b[i] from repetition i).
// Zero-variance differences are decided directly: all-equal pairs give p = 1,
// a constant nonzero difference gives p = 0.
inline PairedTTest paired_t_test(std::span<const double> a,
                                 std::span<const double> b) {
  if (a.size() != b.size())
    throw Error("paired_t_test: length mismatch: " + std::to_string(a.size()) +
                " vs " + std::to_string(b.size()));
  if (a.size() < 2) throw Error("paired_t_test: need at least 2 pairs");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  PairedTTest result;
  result.mean_diff = mean_of(d);
  result.df = static_cast<double>(n - 1);
  const double sd = sample_stdev(d);
  if (sd == 0.0) {
    result.t = result.mean_diff == 0.0
                   ? 0.0
                   : std::numeric_limits<double>::infinity() *
                         (result.mean_diff > 0.0 ? 1.0 : -1.0);
    result.p = result.mean_diff == 0.0 ? 1.0 : 0.0;
    return result;
  }
  result.t = result.mean_diff * std::sqrt(static_cast<double>(n)) / sd;
  result.p = student_t_two_sided_p(result.t, result.df);
  return result;
}

}  // namespace affectlex
