#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "threshnet/dist.hpp"
#include "threshnet/error.hpp"
#include "threshnet/graph.hpp"
#include "threshnet/random.hpp"

namespace threshnet {

inline constexpr std::size_t kMaxMotifVertices = 8;

constexpr std::uint64_t factorial(std::size_t k) noexcept {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= i;
  return f;
}

/// A pattern graph on vertices 0..k-1. Edge endpoints are stored with s < t.
class MotifSpec {
 public:
  using MotifEdge = std::pair<std::size_t, std::size_t>;

  std::size_t k() const noexcept { return k_; }
  std::span<const MotifEdge> edges() const noexcept { return edges_; }
  /// Number of vertex permutations that map the edge set onto itself.
  std::uint64_t symmetry_count() const noexcept { return symmetries_; }
  std::string to_string() const {
    std::string s = "k=" + std::to_string(k_) + ";edges=";
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (e) s += ",";
      s += std::to_string(edges_[e].first + 1) + "-" + std::to_string(edges_[e].second + 1);
    }
    return s;
  }

  friend MotifSpec build_motif(std::size_t k, std::span<const MotifEdge> edges);

 private:
  std::size_t k_ = 0;
  std::vector<MotifEdge> edges_;
  std::uint64_t symmetries_ = 0;
};

/// Validates the pattern and counts its symmetries by enumerating all k!
/// permutations. Edges are 0-based.
inline MotifSpec build_motif(std::size_t k, std::span<const MotifSpec::MotifEdge> edges) {
  if (k == 0) throw DomainError("motif needs at least one vertex");
  if (k > kMaxMotifVertices) {
    throw CapacityError("motif has " + std::to_string(k) + " vertices; at most " +
                        std::to_string(kMaxMotifVertices) + " are supported");
  }
  std::array<std::array<bool, kMaxMotifVertices>, kMaxMotifVertices> adj{};
  MotifSpec m;
  m.k_ = k;
  for (auto [s, t] : edges) {
    if (s >= k || t >= k) throw DomainError("motif edge endpoint out of range");
    if (s == t) throw DomainError("motif edges may not be self-loops");
    if (s > t) std::swap(s, t);
    if (adj[s][t]) throw DomainError("duplicate motif edge");
    adj[s][t] = adj[t][s] = true;
    m.edges_.emplace_back(s, t);
  }
  std::sort(m.edges_.begin(), m.edges_.end());

  std::array<std::size_t, kMaxMotifVertices> perm{};
  std::iota(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k), std::size_t{0});
  do {
    bool preserved = true;
    for (const auto& [s, t] : m.edges_) {
      if (!adj[perm[s]][perm[t]]) {
        preserved = false;
        break;
      }
    }
    // A permutation is injective on edges, so mapping E into E means onto.
    m.symmetries_ += preserved ? 1 : 0;
  } while (std::next_permutation(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k)));
  return m;
}

/// "k=4;edges=1-2,2-3,3-4,4-1" (1-based vertex labels; "edges=" may be empty).
inline MotifSpec parse_motif(std::string_view spec) {
  const auto parts = detail::split(spec, ';');
  if (parts.size() != 2 || parts[0].substr(0, 2) != "k=" || parts[1].substr(0, 6) != "edges=") {
    throw UsageError("motif spec must look like 'k=4;edges=1-2,2-3', got '" + std::string(spec) + "'");
  }
  const double kd = detail::parse_real(parts[0].substr(2), "motif size");
  if (!(kd >= 1.0) || kd != std::floor(kd)) throw UsageError("motif size must be a positive integer");
  std::vector<MotifSpec::MotifEdge> edges;
  const auto body = parts[1].substr(6);
  if (!body.empty()) {
    for (const auto item : detail::split(body, ',')) {
      const auto ends = detail::split(item, '-');
      if (ends.size() != 2) throw UsageError("motif edge '" + std::string(item) + "' is not s-t");
      const double s = detail::parse_real(ends[0], "motif vertex");
      const double t = detail::parse_real(ends[1], "motif vertex");
      if (s < 1 || t < 1 || s != std::floor(s) || t != std::floor(t)) {
        throw UsageError("motif vertices are 1-based integers");
      }
      edges.emplace_back(static_cast<std::size_t>(s) - 1, static_cast<std::size_t>(t) - 1);
    }
  }
  try {
    return build_motif(static_cast<std::size_t>(kd), edges);
  } catch (const DomainError& e) {
    throw UsageError(std::string("invalid motif: ") + e.what());
  }
}

inline MotifSpec triangle_motif() {
  const std::array<MotifSpec::MotifEdge, 3> e{{{0, 1}, {1, 2}, {0, 2}}};
  return build_motif(3, e);
}

inline MotifSpec cycle_motif(std::size_t k) {
  std::vector<MotifSpec::MotifEdge> e;
  for (std::size_t i = 0; i < k; ++i) e.emplace_back(i, (i + 1) % k);
  return build_motif(k, e);
}

/// 1 iff x_s + x_t > theta for every pattern edge <s,t>.
inline bool kernel_h(const MotifSpec& motif, std::span<const double> x, double theta) {
  if (x.size() != motif.k()) throw DomainError("kernel argument length differs from motif size");
  for (const auto& [s, t] : motif.edges()) {
    if (!(x[s] + x[t] > theta)) return false;
  }
  return true;
}

/// Exact rational m / k!.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Average of kernel_h over all k! orderings of the arguments (equal values
/// still count as distinct positions).
inline Rational kernel_h_sym(const MotifSpec& motif, std::span<const double> x, double theta) {
  const std::size_t k = motif.k();
  if (x.size() != k) throw DomainError("kernel argument length differs from motif size");
  std::array<std::size_t, kMaxMotifVertices> perm{};
  std::iota(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k), std::size_t{0});
  std::uint64_t hits = 0;
  do {
    bool ok = true;
    for (const auto& [s, t] : motif.edges()) {
      if (!(x[perm[s]] + x[perm[t]] > theta)) {
        ok = false;
        break;
      }
    }
    hits += ok ? 1 : 0;
  } while (std::next_permutation(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k)));
  return {hits, factorial(k)};
}

inline constexpr std::uint64_t kDefaultMotifWorkCap = 1'000'000'000ULL;

namespace detail {

inline std::uint64_t falling_factorial_capped(std::uint64_t n, std::uint64_t terms, std::uint64_t cap) {
  std::uint64_t p = 1;
  for (std::uint64_t i = 0; i < terms; ++i) {
    if (n <= i) return 0;
    const std::uint64_t f = n - i;
    if (p > cap / f) return cap + 1;
    p *= f;
  }
  return p;
}

class MotifCounter {
 public:
  MotifCounter(const GraphSample& g, const MotifSpec& motif) : k_(motif.k()) {
    const auto w = g.sorted_weights();
    const std::size_t n = w.size();
    first_partner_.resize(n);
    for (std::size_t p = 0; p < n; ++p) first_partner_[p] = g.first_partner(w[p]);

    // Place pattern vertices so each one (after the first) has as many
    // already-placed neighbours as possible.
    std::array<std::array<bool, kMaxMotifVertices>, kMaxMotifVertices> adj{};
    for (const auto& [s, t] : motif.edges()) adj[s][t] = adj[t][s] = true;
    std::vector<bool> placed(k_, false);
    for (std::size_t step = 0; step < k_; ++step) {
      std::size_t best = k_;
      int best_links = -1;
      int best_degree = -1;
      for (std::size_t v = 0; v < k_; ++v) {
        if (placed[v]) continue;
        int links = 0;
        int deg = 0;
        for (std::size_t u = 0; u < k_; ++u) {
          deg += adj[v][u] ? 1 : 0;
          links += (adj[v][u] && placed[u]) ? 1 : 0;
        }
        if (links > best_links || (links == best_links && deg > best_degree)) {
          best = v;
          best_links = links;
          best_degree = deg;
        }
      }
      placed[best] = true;
      order_.push_back(best);
    }
    back_links_.resize(k_);
    for (std::size_t s = 0; s < k_; ++s) {
      for (std::size_t r = 0; r < s; ++r) {
        if (adj[order_[s]][order_[r]]) back_links_[s].push_back(r);
      }
    }
    assigned_.assign(k_, 0);
    used_.assign(n, false);
  }

  std::uint64_t count() { return descend(0); }

 private:
  // Every candidate for pattern step s must be adjacent to the vertices
  // already placed at its back-linked steps: a suffix [lo, n) of the sorted order.
  std::size_t lower_bound_for(std::size_t step) const {
    std::size_t lo = 0;
    for (const auto r : back_links_[step]) lo = std::max(lo, first_partner_[assigned_[r]]);
    return lo;
  }

  std::uint64_t descend(std::size_t step) {
    const std::size_t n = used_.size();
    const std::size_t lo = lower_bound_for(step);
    if (step + 1 == k_) {
      std::uint64_t taken = 0;
      for (std::size_t r = 0; r < step; ++r) taken += assigned_[r] >= lo ? 1 : 0;
      return (n - lo) - taken;
    }
    std::uint64_t total = 0;
    for (std::size_t p = lo; p < n; ++p) {
      if (used_[p]) continue;
      used_[p] = true;
      assigned_[step] = p;
      total += descend(step + 1);
      used_[p] = false;
    }
    return total;
  }

  std::size_t k_;
  std::vector<std::size_t> first_partner_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> back_links_;
  std::vector<std::size_t> assigned_;
  std::vector<bool> used_;
};

}  // namespace detail

/// T_n(G): ordered k-tuples of distinct vertices realising every pattern
/// edge. Occurrences of the pattern as a subgraph number T_n(G) / l.
///
/// Backtracking over sorted positions: the common neighbourhood of placed
/// vertices in a threshold graph is a suffix of the sorted order, so the last
/// pattern vertex is counted rather than enumerated. Work is bounded by
/// n (n-1) ... (n-k+2) partial placements; exceeding `work_cap` throws.
inline std::uint64_t count_motifs(const GraphSample& g, const MotifSpec& motif,
                                  std::uint64_t work_cap = kDefaultMotifWorkCap) {
  const std::size_t n = g.size();
  const std::size_t k = motif.k();
  if (k > n) return 0;
  const auto work = detail::falling_factorial_capped(n, k - 1, work_cap);
  if (work > work_cap) {
    throw CapacityError("motif census needs more than " + std::to_string(work_cap) + " placements");
  }
  detail::MotifCounter counter(g, motif);
  return counter.count();
}

/// Reference census: sum over unordered k-subsets of k! * h_sym. Work is
/// C(n,k) * k! kernel evaluations, capped by `work_cap`.
inline std::uint64_t count_motifs_by_subsets(const GraphSample& g, const MotifSpec& motif,
                                             std::uint64_t work_cap = kDefaultMotifWorkCap) {
  const std::size_t n = g.size();
  const std::size_t k = motif.k();
  if (k > n) return 0;
  // C(n,k) * k! = n (n-1) ... (n-k+1)
  if (detail::falling_factorial_capped(n, k, work_cap) > work_cap) {
    throw CapacityError("subset census needs more than " + std::to_string(work_cap) + " kernel evaluations");
  }
  const auto w = g.weights();
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> x(k);
  std::uint64_t total = 0;
  for (;;) {
    for (std::size_t s = 0; s < k; ++s) x[s] = w[idx[s]];
    total += kernel_h_sym(motif, x, g.theta()).num;
    // next combination
    std::size_t s = k;
    while (s > 0 && idx[s - 1] == n - k + s - 1) --s;
    if (s == 0) break;
    ++idx[s - 1];
    for (std::size_t t = s; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
  return total;
}

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of F(G) = E[h(X_1..X_k)].
inline Estimate motif_density(const WeightDistribution& dist, const MotifSpec& motif, double theta,
                              std::uint64_t samples, RandomStream& stream) {
  if (samples == 0) throw DomainError("motif_density needs at least one sample");
  std::vector<double> x(motif.k());
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& v : x) v = dist.sample(stream);
    hits += kernel_h(motif, x, theta) ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

/// Unbiased Monte Carlo estimate of zeta_1(G) = Var(h_1(X)), where
/// h_1(x) = E[h_sym(x, X_2..X_k)].
///
/// For each outer draw x two independent inner tuples give a_i = h_sym(x, Y)
/// and b_i = h_sym(x, Y'), so E[a_i b_i] = E[h_1(X)^2]. F(G)^2 is estimated
/// without bias by the product of a-means over the first half and b-means
/// over the second half. Standard error by delete-one jackknife.
inline Estimate zeta1_motif(const WeightDistribution& dist, const MotifSpec& motif, double theta,
                            std::uint64_t outer, RandomStream& stream) {
  if (outer < 2) throw DomainError("zeta1_motif needs at least two outer draws");
  const std::size_t k = motif.k();
  std::vector<double> a(outer);
  std::vector<double> b(outer);
  std::vector<double> x(k);
  for (std::uint64_t i = 0; i < outer; ++i) {
    x[0] = dist.sample(stream);
    for (std::size_t s = 1; s < k; ++s) x[s] = dist.sample(stream);
    a[i] = kernel_h_sym(motif, x, theta).value();
    for (std::size_t s = 1; s < k; ++s) x[s] = dist.sample(stream);
    b[i] = kernel_h_sym(motif, x, theta).value();
  }
  const std::uint64_t half = outer / 2;
  const double n_ab = static_cast<double>(outer);
  const double n_a = static_cast<double>(half);
  const double n_b = static_cast<double>(outer - half);
  double s_ab = 0.0;
  double s_a = 0.0;
  double s_b = 0.0;
  for (std::uint64_t i = 0; i < outer; ++i) {
    s_ab += a[i] * b[i];
    if (i < half) {
      s_a += a[i];
    } else {
      s_b += b[i];
    }
  }
  auto stat = [](double ab, double ma, double mb) { return ab - ma * mb; };
  const double full = stat(s_ab / n_ab, s_a / n_a, s_b / n_b);

  std::vector<double> loo(outer);
  double loo_mean = 0.0;
  for (std::uint64_t i = 0; i < outer; ++i) {
    const double ab = (s_ab - a[i] * b[i]) / (n_ab - 1.0);
    double ma = s_a / n_a;
    double mb = s_b / n_b;
    if (i < half) {
      ma = n_a > 1.0 ? (s_a - a[i]) / (n_a - 1.0) : 0.0;
    } else {
      mb = n_b > 1.0 ? (s_b - b[i]) / (n_b - 1.0) : 0.0;
    }
    loo[i] = stat(ab, ma, mb);
    loo_mean += loo[i];
  }
  loo_mean /= n_ab;
  double ss = 0.0;
  for (const double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  const double se = std::sqrt((n_ab - 1.0) / n_ab * ss);
  return {std::max(full, 0.0), se};
}

}  // namespace threshnet
