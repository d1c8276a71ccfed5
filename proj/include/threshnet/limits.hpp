#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "threshnet/dist.hpp"
#include "threshnet/error.hpp"
#include "threshnet/quadrature.hpp"

// Closed-form limits of the threshold graph, evaluated by quadrature against
// the weight law. Every expectation is an integral in quantile space.

namespace threshnet::limits {

struct LimitConfig {
  WeightDistribution dist;
  double theta = 1.0;
  QuadratureOptions quad{};

  LimitConfig(WeightDistribution d, double th, QuadratureOptions q = {}) : dist(std::move(d)), theta(th), quad(q) {
    if (quad.nodes < 16) throw DomainError("quad_nodes must be at least 16");
  }

  // Nested integrals cannot resolve the outer integrand below the inner error.
  QuadratureOptions outer() const {
    QuadratureOptions o = quad;
    o.abs_tol = std::max(o.abs_tol, 1e-11);
    o.rel_tol = std::max(o.rel_tol, 1e-11);
    return o;
  }
};

namespace detail {

// Points where x -> 1 - F(theta - x) meets an end of the support.
inline std::vector<double> partner_breaks(const LimitConfig& cfg, std::initializer_list<double> extra = {}) {
  std::vector<double> b{cfg.theta - cfg.dist.support_min(), cfg.theta - cfg.dist.support_max()};
  b.insert(b.end(), extra.begin(), extra.end());
  return b;
}

}  // namespace detail

/// Edge probability of a vertex of weight x: P(x + X > theta) = 1 - F(theta - x).
inline double partner_probability(const LimitConfig& cfg, double x) { return cfg.dist.tail_above(x, cfg.theta); }

/// P(D_{n+1} = k): the degree of a vertex among n+1.
inline double degree_pmf_exact(const LimitConfig& cfg, std::size_t n, std::size_t k) {
  if (k > n) throw DomainError("degree_pmf_exact needs k <= n");
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  const double log_choose = std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0);
  return integrate_dF(
      cfg.dist,
      [&](double x) {
        const double q = partner_probability(cfg, x);
        if (q <= 0.0) return k == 0 ? 1.0 : 0.0;
        if (q >= 1.0) return k == n ? 1.0 : 0.0;
        return std::exp(log_choose + kk * std::log(q) + (nn - kk) * std::log1p(-q));
      },
      cfg.quad, detail::partner_breaks(cfg));
}

/// P(1 - F(theta - X) <= t), the limit law of D_n / n.
inline double limit_degree_cdf(const LimitConfig& cfg, double t) {
  if (t < 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  if (t == 0.0) {
    return integrate_dF(cfg.dist, [&](double x) { return partner_probability(cfg, x) <= 0.0 ? 1.0 : 0.0; },
                        cfg.quad, detail::partner_breaks(cfg));
  }
  // For continuous F the indicator switches at x = theta - Q(1 - t).
  const auto breaks = cfg.dist.is_atomic() ? detail::partner_breaks(cfg)
                                           : detail::partner_breaks(cfg, {cfg.theta - cfg.dist.quantile(1.0 - t)});
  return integrate_dF(
      cfg.dist, [&](double x) { return partner_probability(cfg, x) <= t ? 1.0 : 0.0; }, cfg.quad, breaks);
}

/// alpha_F(theta) = P(X_1 + X_2 > theta).
inline double alpha_F(const LimitConfig& cfg) {
  return integrate_dF(cfg.dist, [&](double a) { return partner_probability(cfg, a); }, cfg.quad,
                      detail::partner_breaks(cfg));
}

/// h_1(x) = P(x + X_2 > theta, x + X_3 > theta, X_2 + X_3 > theta).
/// The inner X_3 integral is exact: both constraints on X_3 collapse to
/// min(x, y) + X_3 > theta.
inline double h1_of(const LimitConfig& cfg, double x) {
  return integrate_dF(
      cfg.dist,
      [&](double y) {
        if (!(x + y > cfg.theta)) return 0.0;
        return cfg.dist.tail_above(std::min(x, y), cfg.theta);
      },
      cfg.quad, detail::partner_breaks(cfg, {cfg.theta - x, x}));
}

/// F_3(theta) = P(triangle on three i.i.d. weights).
///
/// A triple is a triangle iff its two smallest weights sum above theta. For
/// continuous F, with (V_(1), V_(2)) the two smallest of three uniforms
/// (joint density 6 (1 - v) on u < v):
///   F_3 = 6 int_0^1 (1 - v) |{u < v : Q(u) + Q(v) > theta}| dv,
/// and the inner measure is v - min(v, F(theta - Q(v))). Atomic laws are
/// summed exactly over atom triples.
inline double F3(const LimitConfig& cfg) {
  const auto& d = cfg.dist;
  if (d.is_atomic()) {
    const auto atoms = d.atoms();
    double s = 0.0;
    for (const auto& a : atoms) {
      for (const auto& b : atoms) {
        if (!(a.x + b.x > cfg.theta)) continue;
        for (const auto& c : atoms) {
          if (a.x + c.x > cfg.theta && b.x + c.x > cfg.theta) s += a.p * b.p * c.p;
        }
      }
    }
    return s;
  }
  // In quantile space x = Q(v), so v = F(x) and the integrand is a function of x.
  return 6.0 * integrate_dF(
                   d,
                   [&](double x) {
                     const double v = d.cdf(x);
                     return (1.0 - v) * (v - std::min(v, d.cdf(cfg.theta - x)));
                   },
                   cfg.quad, detail::partner_breaks(cfg, {0.5 * cfg.theta}));
}

/// zeta_1(F) = Var(h_1(X)), clamped at zero. E[h_1(X)] = F_3.
inline double zeta1_exact(const LimitConfig& cfg) {
  const double m1 = F3(cfg);
  const double m2 = integrate_dF(
      cfg.dist,
      [&](double x) {
        const double h = h1_of(cfg, x);
        return h * h;
      },
      cfg.outer(), detail::partner_breaks(cfg, {0.5 * cfg.theta}));
  return std::max(0.0, m2 - m1 * m1);
}

struct ConditionalCorrelation {
  double alpha = 0.0;
  double mean = 0.0;      // E_H[q(a)]
  double variance = 0.0;  // Var_H(q(a))
  double cov = 0.0;       // Cov_H(q(a), q(b))
  double corr = 0.0;      // 0 when Var_H vanishes
};

/// Dependence witness for the degrees of two adjacent vertices. Under
/// H(da, db) = 1(a + b > theta) F(da) F(db) / alpha_F, the pair
/// (q(a), q(b)) with q(x) = 1 - F(theta - x) is the limit of
/// (d_n(1)/n, d_n(2)/n) given the edge. Under G x G the covariance is zero.
inline ConditionalCorrelation cond_corr_limit(const LimitConfig& cfg) {
  const double alpha = alpha_F(cfg);
  if (!(alpha > 0.0)) {
    throw DegenerateConditioningError("alpha_F(theta) = 0: two vertices are never adjacent");
  }
  auto q = [&](double x) { return partner_probability(cfg, x); };
  // The H-marginal is G(da) = q(a) F(da) / alpha.
  const auto breaks = detail::partner_breaks(cfg, {0.5 * cfg.theta});
  const double m1 = integrate_dF(cfg.dist, [&](double a) { return q(a) * q(a); }, cfg.quad, breaks) / alpha;
  const double m2 = integrate_dF(cfg.dist, [&](double a) { return q(a) * q(a) * q(a); }, cfg.quad, breaks) / alpha;
  const double cross = integrate_dF(
                           cfg.dist,
                           [&](double a) {
                             const double qa = q(a);
                             if (qa == 0.0) return 0.0;
                             const double inner = integrate_dF(
                                 cfg.dist, [&](double b) { return a + b > cfg.theta ? q(b) : 0.0; }, cfg.quad,
                                 detail::partner_breaks(cfg, {cfg.theta - a}));
                             return qa * inner;
                           },
                           cfg.outer(), breaks) /
                       alpha;
  ConditionalCorrelation out;
  out.alpha = alpha;
  out.mean = m1;
  out.variance = std::max(0.0, m2 - m1 * m1);
  out.cov = cross - m1 * m1;
  if (std::abs(out.cov) < 1e-13) out.cov = 0.0;
  out.corr = out.variance > 1e-13 ? out.cov / out.variance : 0.0;
  return out;
}

/// Law of h_1(X): h_1 evaluated on the quantile grid u_i = (i + 1/2) / m,
/// sorted. cdf(t) is the fraction of grid values <= t.
class H1Law {
 public:
  H1Law(const LimitConfig& cfg, std::size_t grid) {
    if (grid == 0) throw DomainError("h1 law needs a non-empty grid");
    values_.reserve(grid);
    for (std::size_t i = 0; i < grid; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
      values_.push_back(h1_of(cfg, cfg.dist.quantile(u)));
    }
    std::sort(values_.begin(), values_.end());
  }

  double cdf(double t) const {
    const auto it = std::upper_bound(values_.begin(), values_.end(), t);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
  }

  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

}  // namespace threshnet::limits
