#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "threshnet/dist.hpp"
#include "threshnet/error.hpp"
#include "threshnet/quadrature.hpp"
#include "threshnet/random.hpp"
#include "threshnet/stats.hpp"

// Spatial threshold model: Poisson points xi_i of intensity lambda in R^d,
// the origin added with weight X_0, and an edge origin--xi_i iff
// X_0 + X_i > theta |xi_i|^beta.

namespace threshnet::spatial {

struct SpatialConfig {
  int d = 2;
  double beta = 1.0;
  double theta = 1.0;
  double lambda = 1.0;
  double r = 1.0;

  void validate() const {
    if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
    if (!(beta > 0.0 && std::isfinite(beta))) throw DomainError("beta must be positive");
    if (!std::isfinite(theta)) throw DomainError("theta must be finite");
    if (!(lambda > 0.0 && std::isfinite(lambda))) throw DomainError("lambda must be positive");
    if (!(r > 0.0 && std::isfinite(r))) throw DomainError("r must be positive");
  }
};

/// Surface measure of the unit sphere in R^d, 2 pi^(d/2) / Gamma(d/2): the
/// polar-coordinate factor in lambda_r(x) = lambda c_d int_0^r s^(d-1) f(s; x) ds.
inline double c_d(int d) {
  if (d < 1 || d > 3) throw DomainError("c_d is implemented for d = 1, 2, 3");
  const double h = 0.5 * static_cast<double>(d);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

inline double ball_volume(int d, double r) { return c_d(d) * std::pow(r, d) / static_cast<double>(d); }

/// Connection probability at distance s: f(s; x) = 1 - F(theta s^beta - x).
inline double connection_probability(const SpatialConfig& cfg, const WeightDistribution& dist, double x, double s) {
  return 1.0 - dist.cdf(cfg.theta * std::pow(s, cfg.beta) - x);
}

/// C_r(x) = int_0^r s^(d-1) f(s; x) ds.
///
/// The radial axis is split where theta s^beta - x crosses a feature of the
/// support (its ends, each atom). Below the lowest crossing f = 1 and the
/// piece is s^d / d exactly; above the support maximum f = 0.
inline double C_r_of_x(const SpatialConfig& cfg, const WeightDistribution& dist, double x, double r,
                       const QuadratureOptions& quad = {}) {
  if (!(r > 0.0)) throw DomainError("C_r_of_x needs r > 0");
  const double d = static_cast<double>(cfg.d);
  auto radius_for = [&](double w) -> std::optional<double> {
    // theta s^beta - x = w
    const double ratio = (w + x) / cfg.theta;
    if (cfg.theta == 0.0 || !(ratio > 0.0) || !std::isfinite(ratio)) return std::nullopt;
    return std::pow(ratio, 1.0 / cfg.beta);
  };
  std::vector<double> cuts{0.0, r};
  std::vector<double> features{dist.support_min(), dist.support_max()};
  for (const auto& a : dist.atoms()) features.push_back(a.x);
  for (const double w : features) {
    if (!std::isfinite(w)) continue;
    if (auto s = radius_for(w); s && *s > 0.0 && *s < r) cuts.push_back(*s);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const double mid = 0.5 * (lo + hi);
    const double f_mid = connection_probability(cfg, dist, x, mid);
    const double f_lo = connection_probability(cfg, dist, x, std::nextafter(lo, hi));
    const double f_hi = connection_probability(cfg, dist, x, std::nextafter(hi, lo));
    if (f_mid == 0.0 && f_lo == 0.0 && f_hi == 0.0) continue;
    if (f_mid == 1.0 && f_lo == 1.0 && f_hi == 1.0) {
      total += (std::pow(hi, d) - std::pow(lo, d)) / d;
      continue;
    }
    total += integrate(
        [&](double s) { return std::pow(s, d - 1.0) * connection_probability(cfg, dist, x, s); }, lo, hi, quad);
  }
  return total;
}

/// Whether C(x) = lim C_r(x) is finite for every x. For theta > 0,
/// C(x) = E[max(0, X_0 + x)^(d/beta)] / (d theta^(d/beta)), finite iff the
/// weight law has a finite (d/beta)-th moment.
inline bool finite_limit_regime(const SpatialConfig& cfg, const WeightDistribution& dist) {
  return cfg.theta > 0.0 && dist.has_finite_moment(static_cast<double>(cfg.d) / cfg.beta);
}

/// C(x) via E[max(0, X + x)^(d/beta)] / (d theta^(d/beta)).
inline double C_limit(const SpatialConfig& cfg, const WeightDistribution& dist, double x,
                      const QuadratureOptions& quad = {}) {
  if (!finite_limit_regime(cfg, dist)) {
    throw RegimeError("C(x) diverges for this configuration (theta <= 0 or E|X|^(d/beta) infinite); "
                      "use the CLT path with an explicit centering sequence");
  }
  const double q = static_cast<double>(cfg.d) / cfg.beta;
  const double m = integrate_dF(dist, [&](double w) { return w + x > 0.0 ? std::pow(w + x, q) : 0.0; }, quad);
  return m / (static_cast<double>(cfg.d) * std::pow(cfg.theta, q));
}

/// Poisson parameter of Delta_r given X_0 = x: lambda c_d C_r(x).
inline double lambda_r(const SpatialConfig& cfg, const WeightDistribution& dist, double x,
                       const QuadratureOptions& quad = {}) {
  return cfg.lambda * c_d(cfg.d) * C_r_of_x(cfg, dist, x, cfg.r, quad);
}

/// Uniform point in the d-ball of radius r: radius r U^(1/d), isotropic direction.
inline std::array<double, 3> sample_ball_point(int d, double r, RandomStream& stream) {
  std::array<double, 3> p{};
  double norm = 0.0;
  do {
    norm = 0.0;
    for (int i = 0; i < d; ++i) {
      p[static_cast<std::size_t>(i)] = stream.normal();
      norm += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
    }
  } while (!(norm > 0.0));
  const double radius = r * std::pow(stream.uniform01(), 1.0 / static_cast<double>(d));
  const double scale = radius / std::sqrt(norm);
  for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] *= scale;
  return p;
}

inline constexpr double kDefaultPointCap = 1e7;

/// Delta_r by simulating the point cloud in the ball of radius cfg.r.
inline std::uint64_t sample_delta_direct(const SpatialConfig& cfg, const WeightDistribution& dist,
                                         std::optional<double> x0, RandomStream& stream,
                                         double point_cap = kDefaultPointCap) {
  cfg.validate();
  const double expected = cfg.lambda * ball_volume(cfg.d, cfg.r);
  if (expected > point_cap) {
    throw CapacityError("expected " + std::to_string(expected) + " points exceeds the cap of " +
                        std::to_string(point_cap));
  }
  const double origin = x0 ? *x0 : dist.sample(stream);
  const std::uint64_t points = stream.poisson(expected);
  std::uint64_t degree = 0;
  for (std::uint64_t i = 0; i < points; ++i) {
    const auto p = sample_ball_point(cfg.d, cfg.r, stream);
    const double dist2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    const double w = dist.sample(stream);
    degree += (origin + w > cfg.theta * std::pow(std::sqrt(dist2), cfg.beta)) ? 1 : 0;
  }
  return degree;
}

/// Delta_r through the thinning identity: given X_0 = x it is
/// Poisson(lambda c_d C_r(x)). Cost does not grow with r.
inline std::uint64_t sample_delta_mixture(const SpatialConfig& cfg, const WeightDistribution& dist,
                                          std::optional<double> x0, RandomStream& stream,
                                          const QuadratureOptions& quad = {}) {
  cfg.validate();
  const double origin = x0 ? *x0 : dist.sample(stream);
  return stream.poisson(lambda_r(cfg, dist, origin, quad));
}

/// P(Delta = k) for the mixed Poisson law int Poisson(lambda c_d C(x)){k} F(dx).
/// With `radius` set, C_r(x) at that radius replaces the r -> infinity limit.
inline double mixture_pmf(const SpatialConfig& cfg, const WeightDistribution& dist, std::uint64_t k,
                          std::optional<double> radius = std::nullopt, const QuadratureOptions& quad = {}) {
  cfg.validate();
  if (!radius && !finite_limit_regime(cfg, dist)) {
    throw RegimeError("mixture limit needs finite C(x); use the CLT path with an explicit centering sequence");
  }
  const double scale = cfg.lambda * c_d(cfg.d);
  auto mean_at = [&](double x) {
    return scale * (radius ? C_r_of_x(cfg, dist, x, *radius, quad) : C_limit(cfg, dist, x, quad));
  };
  QuadratureOptions outer = quad;
  outer.abs_tol = std::max(outer.abs_tol, 1e-11);
  outer.rel_tol = std::max(outer.rel_tol, 1e-11);
  return integrate_dF(dist, [&](double x) { return stats::poisson_pmf(mean_at(x), k); }, outer);
}

inline std::vector<double> mixture_pmf_table(const SpatialConfig& cfg, const WeightDistribution& dist,
                                             std::uint64_t kmax, std::optional<double> radius = std::nullopt,
                                             const QuadratureOptions& quad = {}) {
  std::vector<double> table(kmax + 1);
  for (std::uint64_t k = 0; k <= kmax; ++k) table[k] = mixture_pmf(cfg, dist, k, radius, quad);
  return table;
}

/// (Delta_r - lambda c_d Cr) / sqrt(lambda c_d Cr), Delta_r via the mixture path.
inline double clt_standardized_sample(const SpatialConfig& cfg, const WeightDistribution& dist, double centering,
                                      RandomStream& stream, const QuadratureOptions& quad = {}) {
  if (!(centering > 0.0)) throw DomainError("centering sequence value must be positive");
  const double m = cfg.lambda * c_d(cfg.d) * centering;
  const auto delta = static_cast<double>(sample_delta_mixture(cfg, dist, std::nullopt, stream, quad));
  return (delta - m) / std::sqrt(m);
}

}  // namespace threshnet::spatial
