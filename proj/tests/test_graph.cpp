#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "threshnet/dist.hpp"
#include "threshnet/error.hpp"
#include "threshnet/graph.hpp"
#include "threshnet/random.hpp"

using namespace threshnet;

namespace {

// Adjacency matrix straight from the definition.
std::vector<std::vector<bool>> brute_adjacency(const std::vector<double>& w, double theta) {
  const std::size_t n = w.size();
  std::vector<std::vector<bool>> a(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = i != j && w[i] + w[j] > theta;
  }
  return a;
}

std::vector<double> draw(const WeightDistribution& d, std::size_t n, RandomStream& s) {
  std::vector<double> w(n);
  for (auto& x : w) x = d.sample(s);
  return w;
}

std::vector<WeightDistribution> laws() {
  return {WeightDistribution::uniform(0, 1), WeightDistribution::exponential(1.0),
          WeightDistribution::two_point(0.2, 0.5, 0.9), WeightDistribution::discrete({{0, 0.3}, {0.5, 0.4}, {1, 0.3}}),
          WeightDistribution::pareto(1, 2)};
}

}  // namespace

TEST(Graph, AdjacencyIsStrictThreshold) {
  const GraphSample g({0.5, 0.5, 0.6, 0.4}, 1.0);
  EXPECT_FALSE(g.adjacent(0, 1));  // 0.5 + 0.5 is not > 1
  EXPECT_TRUE(g.adjacent(0, 2));
  EXPECT_FALSE(g.adjacent(2, 2));
  EXPECT_FALSE(g.adjacent(0, 3));
  EXPECT_EQ(degree(g, 2), 2u);
}

TEST(Graph, GenerateRejectsEmpty) {
  RandomStream s(1);
  EXPECT_THROW(generate(WeightDistribution::uniform(0, 1), 0, 1.0, s), DomainError);
}

TEST(Graph, FastCountersMatchBruteForce) {
  RandomStream s(2024);
  for (const auto& d : laws()) {
    for (std::size_t n : {1u, 2u, 3u, 7u, 40u, 200u}) {
      for (double theta : {0.4, 1.0, 1.2, 2.5}) {
        const auto w = draw(d, n, s);
        const GraphSample g(w, theta);
        const auto a = brute_adjacency(w, theta);
        std::uint64_t tri = 0;
        std::vector<std::uint64_t> local(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
          std::size_t deg = 0;
          for (std::size_t j = 0; j < n; ++j) deg += a[i][j];
          ASSERT_EQ(degree(g, i), deg);
          ASSERT_EQ(all_degrees(g)[i], deg);
          for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
              if (a[i][j] && a[j][k] && a[i][k]) {
                ++tri;
                ++local[i];
                ++local[j];
                ++local[k];
              }
            }
          }
        }
        ASSERT_EQ(count_triangles(g), tri) << d.to_string() << " n=" << n << " theta=" << theta;
        for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(count_local_triangles(g, i), local[i]);
      }
    }
  }
}

TEST(Graph, HandshakeAndLocalTriangleIdentities) {
  RandomStream s(9);
  for (const auto& d : laws()) {
    const auto g = generate(d, 3000, 1.0, s);
    const auto deg = all_degrees(g);
    const std::uint64_t degree_sum = std::accumulate(deg.begin(), deg.end(), std::uint64_t{0});
    const auto edges = edge_list(g, 10'000'000);
    EXPECT_EQ(degree_sum, 2 * edges.size());
    std::uint64_t local_sum = 0;
    for (std::size_t i = 0; i < g.size(); ++i) local_sum += count_local_triangles(g, i);
    EXPECT_EQ(local_sum, 3 * count_triangles(g));
  }
}

// Raising one weight only adds edges: degrees and triangles never drop.
TEST(Graph, CouplingMonotonicity) {
  RandomStream s(77);
  const auto d = WeightDistribution::uniform(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    auto w = draw(d, 150, s);
    const GraphSample before(w, 1.0);
    const std::size_t v = static_cast<std::size_t>(s.uniform01() * 150);
    w[v] += s.uniform01();
    const GraphSample after(w, 1.0);
    EXPECT_GE(count_triangles(after), count_triangles(before));
    for (std::size_t i = 0; i < 150; ++i) EXPECT_GE(degree(after, i), degree(before, i));
    // Lowering theta also adds edges.
    const GraphSample looser(w, 0.9);
    EXPECT_GE(count_triangles(looser), count_triangles(after));
  }
}

TEST(Graph, RelabelInvariance) {
  RandomStream s(3);
  auto w = draw(WeightDistribution::exponential(1.0), 300, s);
  const GraphSample g(w, 1.5);
  std::vector<std::size_t> perm(w.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::rotate(perm.begin(), perm.begin() + 17, perm.end());
  std::vector<double> pw(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) pw[i] = w[perm[i]];
  const GraphSample h(pw, 1.5);
  EXPECT_EQ(count_triangles(g), count_triangles(h));
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_EQ(degree(h, i), degree(g, perm[i]));
    EXPECT_EQ(count_local_triangles(h, i), count_local_triangles(g, perm[i]));
  }
}

TEST(Graph, EdgeListOrderCapAndCsv) {
  const GraphSample g({0.9, 0.1, 0.6, 0.5}, 1.0);
  const auto e = edge_list(g, 100);
  const std::vector<Edge> expected{{0, 2}, {0, 3}, {2, 3}};
  EXPECT_EQ(e, expected);
  EXPECT_THROW(edge_list(g, 2), CapacityError);
  std::ostringstream os;
  write_edge_csv(os, e);
  EXPECT_EQ(os.str(), "i,j\n1,3\n1,4\n3,4\n");
}

TEST(Graph, LocalTrianglesRangeCheck) {
  const GraphSample g({0.9, 0.1}, 1.0);
  EXPECT_THROW(count_local_triangles(g, 2), DomainError);
}

TEST(Graph, DegenerateTwoPointRegime) {
  RandomStream s(8);
  const auto d = WeightDistribution::two_point(0.2, 0.5, 0.9);
  const auto g = generate(d, 500, 1.2, s);
  std::size_t heavy = 0;
  for (std::size_t i = 0; i < g.size(); ++i) heavy += g.weights()[i] == 0.9;
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(degree(g, i), g.weights()[i] == 0.9 ? heavy - 1 : 0u);
  }
}

TEST(Graph, PairExperimentCountsAgainstTaggedWeights) {
  RandomStream s(12);
  const auto d = WeightDistribution::uniform(0, 1);
  for (int t = 0; t < 20; ++t) {
    RandomStream copy = s;
    const auto p = pair_degree_experiment(d, 100, 1.0, s);
    std::vector<double> w(100);
    for (auto& x : w) x = d.sample(copy);
    const double a = d.sample(copy);
    const double b = d.sample(copy);
    std::size_t d1 = 0;
    std::size_t d2 = 0;
    for (const double x : w) {
      d1 += x + a > 1.0;
      d2 += x + b > 1.0;
    }
    EXPECT_EQ(p.d1, d1);
    EXPECT_EQ(p.d2, d2);
    EXPECT_EQ(p.edge, a + b > 1.0);
  }
}
