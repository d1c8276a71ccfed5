#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "threshnet/error.hpp"
#include "threshnet/quadrature.hpp"
#include "threshnet/random.hpp"

namespace threshnet {

enum class DistKind { uniform, exponential, pareto, two_point, discrete, point_mass };

struct Atom {
  double x;
  double p;
};

// Closed interval; `hi` may be +infinity. A single atom has lo == hi.
struct SupportInterval {
  double lo;
  double hi;
};

namespace detail {

inline double parse_real(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw UsageError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// The law F of the vertex weights. Immutable value type; safe to share
/// between threads.
class WeightDistribution {
 public:
  static WeightDistribution uniform(double a, double b) {
    if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
      throw DomainError("uniform(a,b) needs finite a < b");
    }
    return WeightDistribution(DistKind::uniform, a, b);
  }

  static WeightDistribution exponential(double rate) {
    if (!(rate > 0.0 && std::isfinite(rate))) throw DomainError("exponential rate must be positive");
    return WeightDistribution(DistKind::exponential, rate, 0.0);
  }

  /// F(x) = 1 - C x^(-alpha) on [C^(1/alpha), inf).
  static WeightDistribution pareto(double scale_c, double alpha) {
    if (!(scale_c > 0.0 && alpha > 0.0 && std::isfinite(scale_c) && std::isfinite(alpha))) {
      throw DomainError("pareto needs C > 0 and alpha > 0");
    }
    return WeightDistribution(DistKind::pareto, scale_c, alpha);
  }

  /// Mass p1 at x1 and 1 - p1 at x2.
  static WeightDistribution two_point(double x1, double p1, double x2) {
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw DomainError("two-point p1 must lie in [0,1]");
    WeightDistribution d(DistKind::two_point, x1, p1);
    d.p2_ = x2;
    d.set_atoms({{x1, p1}, {x2, 1.0 - p1}});
    return d;
  }

  static WeightDistribution discrete(std::vector<Atom> atoms) {
    WeightDistribution d(DistKind::discrete, 0.0, 0.0);
    d.set_atoms(std::move(atoms));
    return d;
  }

  static WeightDistribution point_mass(double c) {
    WeightDistribution d(DistKind::point_mass, c, 0.0);
    d.set_atoms({{c, 1.0}});
    return d;
  }

  /// "uniform:a,b" | "exp:rate" | "pareto:C,alpha" | "twopoint:x1,p1,x2" |
  /// "discrete:x1:p1,x2:p2,..." | "point:c"
  static WeightDistribution parse(std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
      throw UsageError("distribution spec '" + std::string(spec) + "' lacks ':'");
    }
    const auto name = spec.substr(0, colon);
    const auto body = spec.substr(colon + 1);
    const auto args = detail::split(body, ',');
    auto num = [&](std::size_t i) { return detail::parse_real(args[i], "distribution parameter"); };
    auto want = [&](std::size_t count) {
      if (args.size() != count) {
        throw UsageError("distribution '" + std::string(name) + "' takes " + std::to_string(count) +
                         " parameters, got " + std::to_string(args.size()));
      }
    };
    try {
      if (name == "uniform") {
        want(2);
        return uniform(num(0), num(1));
      }
      if (name == "exp") {
        want(1);
        return exponential(num(0));
      }
      if (name == "pareto") {
        want(2);
        return pareto(num(0), num(1));
      }
      if (name == "twopoint") {
        want(3);
        return two_point(num(0), num(1), num(2));
      }
      if (name == "point") {
        want(1);
        return point_mass(num(0));
      }
      if (name == "discrete") {
        std::vector<Atom> atoms;
        for (const auto item : args) {
          const auto parts = detail::split(item, ':');
          if (parts.size() != 2) throw UsageError("discrete atom '" + std::string(item) + "' is not x:p");
          atoms.push_back({detail::parse_real(parts[0], "atom position"),
                           detail::parse_real(parts[1], "atom probability")});
        }
        return discrete(std::move(atoms));
      }
    } catch (const DomainError& e) {
      throw UsageError(std::string("invalid distribution parameters: ") + e.what());
    }
    throw UsageError("unknown distribution kind '" + std::string(name) + "'");
  }

  std::string to_string() const {
    using detail::format_real;
    switch (kind_) {
      case DistKind::uniform:
        return "uniform:" + format_real(p1_) + "," + format_real(p2_);
      case DistKind::exponential:
        return "exp:" + format_real(p1_);
      case DistKind::pareto:
        return "pareto:" + format_real(p1_) + "," + format_real(p2_);
      case DistKind::two_point:
        return "twopoint:" + format_real(p1_) + "," + format_real(two_point_p1_) + "," + format_real(p2_);
      case DistKind::point_mass:
        return "point:" + format_real(p1_);
      case DistKind::discrete: {
        std::string s = "discrete:";
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
          if (i) s += ",";
          s += format_real(atoms_[i].x) + ":" + format_real(atoms_[i].p);
        }
        return s;
      }
    }
    return {};
  }

  DistKind kind() const noexcept { return kind_; }
  bool is_atomic() const noexcept {
    return kind_ == DistKind::two_point || kind_ == DistKind::discrete || kind_ == DistKind::point_mass;
  }
  /// Atoms with positive mass, ascending in x. Empty for continuous kinds.
  std::span<const Atom> atoms() const noexcept { return atoms_; }

  double lower() const noexcept { return p1_; }        // uniform a
  double upper() const noexcept { return p2_; }        // uniform b
  double rate() const noexcept { return p1_; }         // exponential
  double pareto_scale() const noexcept { return p1_; }  // pareto C
  double pareto_alpha() const noexcept { return p2_; }

  double cdf(double x) const {
    switch (kind_) {
      case DistKind::uniform:
        if (x <= p1_) return 0.0;
        if (x >= p2_) return 1.0;
        return (x - p1_) / (p2_ - p1_);
      case DistKind::exponential:
        return x <= 0.0 ? 0.0 : -std::expm1(-p1_ * x);
      case DistKind::pareto: {
        if (x <= support_min()) return 0.0;
        if (std::isinf(x)) return 1.0;
        return std::clamp(1.0 - p1_ * std::pow(x, -p2_), 0.0, 1.0);
      }
      default: {
        const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                                         [](double v, const Atom& a) { return v < a.x; });
        const auto idx = static_cast<std::size_t>(it - atoms_.begin());
        return idx == 0 ? 0.0 : cumulative_[idx - 1];
      }
    }
  }

  /// Generalized inverse: the smallest x with cdf(x) >= p.
  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile needs p in (0,1), got " + std::to_string(p));
    switch (kind_) {
      case DistKind::uniform:
        return p1_ + p * (p2_ - p1_);
      case DistKind::exponential:
        return -std::log1p(-p) / p1_;
      case DistKind::pareto:
        return std::pow(p1_ / (1.0 - p), 1.0 / p2_);
      default: {
        const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), p);
        const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                               atoms_.size() - 1);
        return atoms_[idx].x;
      }
    }
  }

  double sample(RandomStream& stream) const {
    if (kind_ == DistKind::point_mass) return p1_;
    return quantile(stream.uniform01());
  }

  /// P(base + X > theta), evaluated with the same floating-point predicate the
  /// graph uses for edges when F has atoms.
  double tail_above(double base, double theta) const {
    if (!is_atomic()) return 1.0 - cdf(theta - base);
    const auto it = std::partition_point(atoms_.begin(), atoms_.end(),
                                         [&](const Atom& a) { return !(base + a.x > theta); });
    const auto idx = static_cast<std::size_t>(it - atoms_.begin());
    return idx == 0 ? 1.0 : 1.0 - cumulative_[idx - 1];
  }

  double support_min() const noexcept {
    switch (kind_) {
      case DistKind::uniform:
        return p1_;
      case DistKind::exponential:
        return 0.0;
      case DistKind::pareto:
        return std::pow(p1_, 1.0 / p2_);
      default:
        return atoms_.front().x;
    }
  }

  double support_max() const noexcept {
    switch (kind_) {
      case DistKind::uniform:
        return p2_;
      case DistKind::exponential:
      case DistKind::pareto:
        return std::numeric_limits<double>::infinity();
      default:
        return atoms_.back().x;
    }
  }

  std::vector<SupportInterval> support() const {
    if (!is_atomic()) return {{support_min(), support_max()}};
    std::vector<SupportInterval> out;
    for (const auto& a : atoms_) out.push_back({a.x, a.x});
    return out;
  }

  /// E[|X|^q] < infinity?
  bool has_finite_moment(double q) const noexcept {
    if (kind_ == DistKind::pareto) return q < p2_;
    return true;
  }

 private:
  WeightDistribution(DistKind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {
    if (kind == DistKind::two_point) two_point_p1_ = p2;
  }

  void set_atoms(std::vector<Atom> atoms) {
    if (atoms.empty()) throw DomainError("discrete distribution needs at least one atom");
    double total = 0.0;
    for (const auto& a : atoms) {
      if (!std::isfinite(a.x)) throw DomainError("atom positions must be finite");
      if (!(a.p >= 0.0 && a.p <= 1.0)) throw DomainError("atom probabilities must lie in [0,1]");
      total += a.p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw DomainError("atom probabilities sum to " + detail::format_real(total) + ", not 1");
    }
    std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
    atoms_.clear();
    for (const auto& a : atoms) {
      if (a.p == 0.0) continue;
      if (!atoms_.empty() && atoms_.back().x == a.x) {
        atoms_.back().p += a.p;
      } else {
        atoms_.push_back(a);
      }
    }
    cumulative_.resize(atoms_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      acc += atoms_[i].p;
      cumulative_[i] = std::min(acc, 1.0);
    }
    cumulative_.back() = 1.0;
  }

  DistKind kind_;
  double p1_;
  double p2_;
  double two_point_p1_ = 0.0;
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

/// Integral of g against dF. Atoms are summed exactly; continuous laws are
/// integrated in quantile space, u in (0,1) -> g(quantile(u)), split at
/// F(b) for each known discontinuity or kink b of g.
template <class G>
double integrate_dF(const WeightDistribution& dist, G&& g, const QuadratureOptions& opts,
                    std::span<const double> breaks) {
  if (dist.is_atomic()) {
    double s = 0.0;
    for (const auto& a : dist.atoms()) {
      const double v = g(a.x);
      if (!std::isfinite(v)) throw NumericError("non-finite integrand at atom " + detail::format_real(a.x));
      s += a.p * v;
    }
    return s;
  }
  std::vector<double> cuts{0.0, 1.0};
  for (const double b : breaks) {
    if (!std::isfinite(b)) continue;
    const double u = dist.cdf(b);
    if (u > 0.0 && u < 1.0) cuts.push_back(u);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto in_quantiles = [&](double u) { return g(dist.quantile(u)); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(in_quantiles, cuts[i], cuts[i + 1], opts);
  return total;
}

template <class G>
double integrate_dF(const WeightDistribution& dist, G&& g, const QuadratureOptions& opts = {}) {
  return integrate_dF(dist, std::forward<G>(g), opts, std::span<const double>{});
}

struct Assumption1Check {
  bool holds = false;
  std::optional<std::pair<double, double>> witness;  // (u, v)
};

/// Whether support points u < theta/2 < v with u + v > theta exist. With
/// v* = sup of the support this reduces to: some support point lies in the
/// open interval (theta - v*, theta/2).
inline Assumption1Check check_assumption1(const WeightDistribution& dist, double theta) {
  const double vmax = dist.support_max();
  const double half = theta / 2.0;
  const double lo_bound = theta - vmax;  // -inf for unbounded support
  for (const auto& piece : dist.support()) {
    if (!(piece.lo < half && piece.hi > lo_bound)) continue;
    double u = piece.lo;
    if (piece.hi > piece.lo) {
      const double a = std::max(piece.lo, lo_bound);
      const double b = std::min(piece.hi, half);
      u = 0.5 * (a + b);
    }
    double v = vmax;
    if (std::isinf(vmax)) v = std::max({half, theta - u, dist.support().back().lo}) + 1.0;
    if (u < half && half < v && u + v > theta) return {true, std::make_pair(u, v)};
  }
  return {};
}

}  // namespace threshnet
