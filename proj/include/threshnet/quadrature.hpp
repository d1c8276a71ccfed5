#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "threshnet/error.hpp"

namespace threshnet {

struct QuadratureOptions {
  // Size of the initial composite grid: nodes/16 panels of 16-point Gauss-Legendre.
  std::size_t nodes = 256;
  // Per-panel acceptance threshold on |coarse - refined|.
  double abs_tol = 1e-13;
  // ... or on |coarse - refined| relative to the panel value, whichever is looser.
  double rel_tol = 1e-13;
  int max_depth = 52;
  std::size_t max_evals = 20'000'000;
};

/// Nodes and weights of the m-point Gauss-Legendre rule on [-1, 1], by Newton
/// iteration on the three-term Legendre recurrence.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendreRule(std::size_t m) : nodes(m), weights(m) {
    for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
      double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                          (static_cast<double>(m) + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = 0.0;
        for (std::size_t j = 1; j <= m; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * static_cast<double>(j) - 1.0) * z * p1 -
                (static_cast<double>(j) - 1.0) * p2) /
               static_cast<double>(j);
        }
        dp = static_cast<double>(m) * (z * p0 - p1) / (z * z - 1.0);
        const double z_prev = z;
        z = z_prev - p0 / dp;
        if (std::abs(z - z_prev) <= 1e-16) break;
      }
      nodes[i] = -z;
      nodes[m - 1 - i] = z;
      weights[i] = weights[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

namespace detail {

inline const GaussLegendreRule& gl16() {
  static const GaussLegendreRule rule(16);
  return rule;
}

template <class F>
class AdaptiveIntegrator {
 public:
  AdaptiveIntegrator(F& f, const QuadratureOptions& opts) : f_(f), opts_(opts) {}

  double run(double a, double b) {
    if (opts_.nodes < 16) throw DomainError("quadrature needs at least 16 nodes");
    if (a == b) return 0.0;
    if (a > b) return -run(b, a);
    const std::size_t panels = opts_.nodes / 16;
    const double h = (b - a) / static_cast<double>(panels);
    double total = 0.0;
    double comp = 0.0;
    double f_lo = edge_value(a, b);
    for (std::size_t p = 0; p < panels; ++p) {
      const double lo = a + h * static_cast<double>(p);
      const double hi = (p + 1 == panels) ? b : a + h * static_cast<double>(p + 1);
      const double f_hi = (p + 1 == panels) ? edge_value(b, a) : probe(hi);
      const double v = refine(lo, hi, panel(lo, hi), f_lo, f_hi, 0);
      f_lo = f_hi;
      // Neumaier summation over panels.
      const double t = total + v;
      comp += (std::abs(total) >= std::abs(v)) ? (total - t) + v : (v - t) + total;
      total = t;
    }
    return total + comp;
  }

 private:
  struct Panel {
    double value;
    double first, second;  // integrand at the two nodes nearest lo
    double last, penult;   // ... and nearest hi
  };

  // Integrand at a point; NaN when it is not finite there.
  double probe(double x) {
    ++evals_;
    const double v = f_(x);
    return std::isfinite(v) ? v : std::nan("");
  }

  // Value at an interval end, nudged inward if the end itself is singular
  // or outside the integrand's domain. NaN if neither point is usable.
  double edge_value(double x, double toward) {
    for (const double at : {x, std::nextafter(x, toward)}) {
      try {
        if (const double v = probe(at); !std::isnan(v)) return v;
      } catch (const DomainError&) {
      }
    }
    return std::nan("");
  }

  Panel panel(double lo, double hi) {
    const auto& rule = gl16();
    const std::size_t m = rule.nodes.size();
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double s = 0.0;
    std::array<double, 16> v{};
    for (std::size_t i = 0; i < m; ++i) {
      v[i] = f_(mid + half * rule.nodes[i]);
      if (!std::isfinite(v[i])) {
        throw NumericError("non-finite integrand value at " + std::to_string(mid + half * rule.nodes[i]));
      }
      s += rule.weights[i] * v[i];
    }
    evals_ += m;
    if (evals_ > opts_.max_evals) {
      throw NumericError("adaptive quadrature did not converge within " +
                         std::to_string(opts_.max_evals) + " evaluations");
    }
    return {s * half, v[0], v[1], v[m - 1], v[m - 2]};
  }

  // A jump between a panel end and its outermost node is invisible to both
  // estimates. Flag an end value that breaks from the trend of the two
  // nearest nodes by more than the gap can hide within tolerance.
  bool hidden_jump(const Panel& p, double f_lo, double f_hi, double width, double tol) const {
    const double gap = 0.5 * (1.0 + gl16().nodes.front()) * width;
    auto breaks = [&](double end, double n1, double n2) {
      if (std::isnan(end)) return false;
      const double d_end = std::abs(end - n1);
      return d_end > 4.0 * std::abs(n2 - n1) + 1e-14 * std::abs(n1) && gap * d_end > tol;
    };
    return breaks(f_lo, p.first, p.second) || breaks(f_hi, p.last, p.penult);
  }

  double refine(double lo, double hi, const Panel& coarse, double f_lo, double f_hi, int depth) {
    const double mid = 0.5 * (lo + hi);
    // Nodes of a narrower panel would collide with its ends in floating point.
    const double floor_width = 4096.0 * std::numeric_limits<double>::epsilon() *
                               std::max({std::abs(lo), std::abs(hi), std::numeric_limits<double>::min()});
    if (!(mid - lo > floor_width && hi - mid > floor_width)) return coarse.value;
    const Panel left = panel(lo, mid);
    const Panel right = panel(mid, hi);
    const double f_mid = probe(mid);
    const double fine = left.value + right.value;
    const double err = std::abs(fine - coarse.value);
    const double tol = std::max(opts_.abs_tol, opts_.rel_tol * std::abs(fine));
    if (depth >= opts_.max_depth) return fine;
    if (err <= tol && !hidden_jump(left, f_lo, f_mid, mid - lo, 0.5 * tol) &&
        !hidden_jump(right, f_mid, f_hi, hi - mid, 0.5 * tol)) {
      return fine;
    }
    return refine(lo, mid, left, f_lo, f_mid, depth + 1) + refine(mid, hi, right, f_mid, f_hi, depth + 1);
  }

  F& f_;
  const QuadratureOptions& opts_;
  std::size_t evals_ = 0;
};

}  // namespace detail

/// Integral of f over [a, b]: composite 16-point Gauss-Legendre on an initial
/// grid of opts.nodes points, each panel bisected until two successive
/// estimates agree to opts.abs_tol (or opts.rel_tol) and no jump hides next
/// to a panel end. Jumps, kinks and integrable endpoint singularities are
/// resolved by the bisection.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  detail::AdaptiveIntegrator<std::remove_reference_t<F>> integrator(f, opts);
  return integrator.run(a, b);
}

}  // namespace threshnet
