#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "threshnet/error.hpp"

namespace threshnet::stats {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    comp_ += (std::abs(sum_) >= std::abs(v)) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased; 0 for a single sample
  double std_error = 0.0;
};

inline Moments moments(std::span<const double> x) {
  if (x.empty()) throw DomainError("moments of an empty sample");
  CompensatedSum s;
  for (const double v : x) s.add(v);
  const double n = static_cast<double>(x.size());
  Moments m;
  m.mean = s.value() / n;
  if (x.size() > 1) {
    CompensatedSum ss;
    for (const double v : x) ss.add((v - m.mean) * (v - m.mean));
    m.variance = ss.value() / (n - 1.0);
  }
  m.std_error = std::sqrt(m.variance / n);
  return m;
}

inline double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("correlation needs two equal samples of size >= 2");
  const double mx = moments(x).mean;
  const double my = moments(y).mean;
  CompensatedSum sxy;
  CompensatedSum sxx;
  CompensatedSum syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy.add((x[i] - mx) * (y[i] - my));
    sxx.add((x[i] - mx) * (x[i] - mx));
    syy.add((y[i] - my) * (y[i] - my));
  }
  const double denom = std::sqrt(sxx.value() * syy.value());
  return denom > 0.0 ? sxy.value() / denom : 0.0;
}

/// sup_x |ECDF(x) - F(x)|, both one-sided gaps at every order statistic.
template <class Cdf>
double ks_statistic(std::span<const double> samples, Cdf&& cdf) {
  if (samples.empty()) throw DomainError("ks_statistic of an empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Two-sample statistic sup_x |ECDF_a(x) - ECDF_b(x)|; ties handled by
/// advancing through equal values together.
inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample needs non-empty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

/// Asymptotic one-sample Kolmogorov critical value at level `alpha`:
/// sqrt(-ln(alpha/2) / 2) / sqrt(n).
inline double ks_critical_value(std::size_t n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

/// Asymptotic p-value of a one-sample KS statistic, Kolmogorov series with
/// Stephens' small-sample correction to the scale.
inline double ks_pvalue(std::size_t n, double d) {
  if (n == 0) throw DomainError("ks_pvalue needs n >= 1");
  const double rn = std::sqrt(static_cast<double>(n));
  const double t = (rn + 0.12 + 0.11 / rn) * d;
  if (t < 0.2) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    p += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double poisson_pmf(double mean, std::uint64_t k) {
  if (mean < 0.0) throw DomainError("Poisson mean must be non-negative");
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kk = static_cast<double>(k);
  return std::exp(-mean + kk * std::log(mean) - std::lgamma(kk + 1.0));
}

inline double poisson_cdf(double mean, std::uint64_t k) {
  if (mean < 0.0) throw DomainError("Poisson mean must be non-negative");
  if (mean == 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(k) + 1.0, mean);
}

/// Smallest K with P(Poisson(mean) > K) <= eps.
inline std::uint64_t poisson_tail_bound(double mean, double eps) {
  std::uint64_t k = static_cast<std::uint64_t>(std::max(0.0, mean));
  while (1.0 - poisson_cdf(mean, k) > eps) k += 1 + k / 16;
  return k;
}

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  std::size_t cells = 0;  // after merging
};

/// Pearson goodness of fit. Adjacent cells are merged from both ends until
/// every expected count is at least `min_expected`.
inline ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> probs,
                                      double min_expected = 5.0) {
  if (observed.size() != probs.size() || observed.empty()) {
    throw DomainError("observed and probability vectors must be non-empty and equal length");
  }
  double psum = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0.0 || observed[i] < 0.0) throw DomainError("negative cell probability or count");
    psum += probs[i];
    total += observed[i];
  }
  if (std::abs(psum - 1.0) > 1e-9) throw DomainError("cell probabilities sum to " + std::to_string(psum));
  if (!(total > 0.0)) throw DomainError("no observations");

  struct Cell {
    double obs;
    double expected;
  };
  std::vector<Cell> cells;
  Cell pending{0.0, 0.0};
  for (std::size_t i = 0; i < probs.size(); ++i) {
    pending.obs += observed[i];
    pending.expected += probs[i] * total;
    if (pending.expected >= min_expected) {
      cells.push_back(pending);
      pending = {0.0, 0.0};
    }
  }
  if (pending.expected > 0.0 || pending.obs > 0.0) {
    if (cells.empty()) {
      cells.push_back(pending);
    } else {
      cells.back().obs += pending.obs;
      cells.back().expected += pending.expected;
    }
  }
  if (cells.size() < 2 || cells.front().expected < min_expected) {
    throw DomainError("too few cells with expected count >= " + std::to_string(min_expected) + " after merging");
  }
  ChiSquareResult r;
  for (const auto& c : cells) r.statistic += (c.obs - c.expected) * (c.obs - c.expected) / c.expected;
  r.cells = cells.size();
  r.dof = cells.size() - 1;
  r.p_value = boost::math::gamma_q(0.5 * static_cast<double>(r.dof), 0.5 * r.statistic);
  return r;
}

/// Chi-square fit of non-negative integer samples to a pmf on {0, 1, ...};
/// cells 0..K-1 plus a tail cell {>= K}, K taken from the sample maximum.
template <class Pmf>
ChiSquareResult count_gof(std::span<const double> samples, Pmf&& pmf) {
  if (samples.empty()) throw DomainError("count_gof of an empty sample");
  const auto kmax = static_cast<std::size_t>(*std::max_element(samples.begin(), samples.end()));
  std::vector<double> observed(kmax + 2, 0.0);
  for (const double v : samples) observed[static_cast<std::size_t>(v)] += 1.0;
  std::vector<double> probs(kmax + 2, 0.0);
  double acc = 0.0;
  for (std::size_t k = 0; k <= kmax; ++k) {
    probs[k] = pmf(static_cast<std::uint64_t>(k));
    acc += probs[k];
  }
  probs[kmax + 1] = std::max(0.0, 1.0 - acc);
  // Renormalise away quadrature drift in the supplied pmf.
  const double s = acc + probs[kmax + 1];
  for (auto& p : probs) p /= s;
  return chi_square_gof(observed, probs);
}

}  // namespace threshnet::stats
