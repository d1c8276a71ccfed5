#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "threshnet/dist.hpp"
#include "threshnet/error.hpp"
#include "threshnet/random.hpp"

namespace threshnet {

/// One realisation of the threshold graph G_theta: vertices 0..n-1 with
/// weights X_i; <i,j> is an edge iff i != j and X_i + X_j > theta. Edges are
/// never stored; every statistic is computed from the sorted weights.
class GraphSample {
 public:
  GraphSample(std::vector<double> weights, double theta) : theta_(theta), weights_(std::move(weights)) {
    order_.resize(weights_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return weights_[a] < weights_[b]; });
    sorted_.resize(weights_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) sorted_[i] = weights_[order_[i]];
  }

  std::size_t size() const noexcept { return weights_.size(); }
  double theta() const noexcept { return theta_; }
  std::span<const double> weights() const noexcept { return weights_; }
  /// Vertex indices ordered by ascending weight (stable).
  std::span<const std::size_t> sorted_order() const noexcept { return order_; }
  std::span<const double> sorted_weights() const noexcept { return sorted_; }

  bool adjacent(std::size_t i, std::size_t j) const noexcept {
    return i != j && weights_[i] + weights_[j] > theta_;
  }

  /// First position p in the sorted weights with x + sorted[p] > theta. The
  /// predicate is monotone because floating-point addition is.
  std::size_t first_partner(double x) const noexcept {
    const auto it = std::partition_point(sorted_.begin(), sorted_.end(),
                                         [&](double w) { return !(x + w > theta_); });
    return static_cast<std::size_t>(it - sorted_.begin());
  }

 private:
  double theta_;
  std::vector<double> weights_;
  std::vector<std::size_t> order_;
  std::vector<double> sorted_;
};

inline GraphSample generate(const WeightDistribution& dist, std::size_t n, double theta, RandomStream& stream) {
  if (n == 0) throw DomainError("graph needs at least one vertex");
  std::vector<double> w(n);
  for (auto& x : w) x = dist.sample(stream);
  return GraphSample(std::move(w), theta);
}

/// D(i) in O(n).
inline std::size_t degree(const GraphSample& g, std::size_t i) {
  if (i >= g.size()) throw DomainError("vertex " + std::to_string(i) + " out of range");
  const auto w = g.weights();
  std::size_t d = 0;
  for (std::size_t j = 0; j < w.size(); ++j) d += g.adjacent(i, j) ? 1 : 0;
  return d;
}

/// All degrees in O(n log n): D(i) = n - first_partner(X_i), less one for i
/// itself when 2 X_i > theta.
inline std::vector<std::size_t> all_degrees(const GraphSample& g) {
  const auto w = g.weights();
  std::vector<std::size_t> deg(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    deg[i] = w.size() - g.first_partner(w[i]) - ((w[i] + w[i] > g.theta()) ? 1 : 0);
  }
  return deg;
}

using Edge = std::pair<std::size_t, std::size_t>;

/// Edges (i, j) with i < j (0-based), lexicographically sorted. Throws
/// CapacityError before allocating if there are more than `cap` edges.
inline std::vector<Edge> edge_list(const GraphSample& g, std::size_t cap) {
  const auto deg = all_degrees(g);
  const std::uint64_t edges = std::accumulate(deg.begin(), deg.end(), std::uint64_t{0}) / 2;
  if (edges > cap) {
    throw CapacityError("graph has " + std::to_string(edges) + " edges, cap is " + std::to_string(cap));
  }
  const auto w = g.weights();
  const auto order = g.sorted_order();
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(edges));
  std::vector<std::size_t> partners;
  for (std::size_t i = 0; i < w.size(); ++i) {
    partners.clear();
    for (std::size_t p = g.first_partner(w[i]); p < order.size(); ++p) {
      if (order[p] > i) partners.push_back(order[p]);
    }
    std::sort(partners.begin(), partners.end());
    for (const auto j : partners) out.emplace_back(i, j);
  }
  return out;
}

/// CSV with header "i,j", 1-based, LF endings.
inline void write_edge_csv(std::ostream& os, std::span<const Edge> edges) {
  os << "i,j\n";
  for (const auto& [i, j] : edges) os << (i + 1) << ',' << (j + 1) << '\n';
}

namespace detail {

// Pairs a < b inside the ascending range sorted[lo, hi) with sorted[a] + sorted[b] > theta.
inline std::uint64_t count_heavy_pairs(std::span<const double> sorted, std::size_t lo, std::size_t hi,
                                       double theta) {
  std::uint64_t pairs = 0;
  std::size_t left = lo;
  for (std::size_t b = hi; b-- > lo;) {
    while (left < b && !(sorted[left] + sorted[b] > theta)) ++left;
    if (left >= b) break;
    pairs += b - left;
  }
  return pairs;
}

}  // namespace detail

/// T_n = #{i<j<k : all three pairwise sums exceed theta}.
///
/// A triple is a triangle iff its two smallest weights sum above theta. With
/// ascending weights w, T_n = sum over heavy pairs (a<b) of (n-1-b), the
/// number of vertices above b. For each b the admissible a form a suffix
/// [lo(b), b) with lo non-increasing in b, so one sweep suffices.
inline std::uint64_t count_triangles(const GraphSample& g) {
  const auto w = g.sorted_weights();
  const std::size_t n = w.size();
  std::uint64_t total = 0;
  std::size_t left = 0;
  for (std::size_t b = n; b-- > 0;) {
    while (left < b && !(w[left] + w[b] > g.theta())) ++left;
    if (left >= b) break;
    total += static_cast<std::uint64_t>(b - left) * (n - 1 - b);
  }
  return total;
}

/// Triangles through vertex i: pairs of neighbours of i that are themselves
/// adjacent. Neighbours occupy a suffix of the sorted order.
inline std::uint64_t count_local_triangles(const GraphSample& g, std::size_t i) {
  if (i >= g.size()) throw DomainError("vertex " + std::to_string(i) + " out of range");
  const double x = g.weights()[i];
  const auto w = g.sorted_weights();
  const std::size_t start = g.first_partner(x);
  std::uint64_t pairs = detail::count_heavy_pairs(w, start, w.size(), g.theta());
  if (x + x > g.theta()) {
    // i sits inside its own neighbour suffix and is adjacent to every other member.
    pairs -= w.size() - start - 1;
  }
  return pairs;
}

struct PairDegrees {
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  bool edge = false;
};

/// Two tagged vertices added to n others: d1, d2 count their neighbours among
/// the n (not each other); `edge` reports whether the tagged pair is joined.
inline PairDegrees pair_degree_experiment(const WeightDistribution& dist, std::size_t n, double theta,
                                          RandomStream& stream) {
  if (n == 0) throw DomainError("pair experiment needs n >= 1");
  std::vector<double> w(n);
  for (auto& x : w) x = dist.sample(stream);
  const double a = dist.sample(stream);
  const double b = dist.sample(stream);
  PairDegrees out;
  for (const double x : w) {
    out.d1 += (x + a > theta) ? 1 : 0;
    out.d2 += (x + b > theta) ? 1 : 0;
  }
  out.edge = a + b > theta;
  return out;
}

}  // namespace threshnet
