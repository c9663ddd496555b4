#pragma once

// Independent oracles and fixtures shared by the test suites. Nothing here
// calls into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "fairnet/graph.hpp"

namespace fairnet::testing {

inline LabeledGraph make_graph(const std::vector<Group>& groups,
                               const std::vector<std::pair<NodeId, NodeId>>& edges) {
  GraphBuilder b;
  for (Group g : groups) b.add_node(g);
  for (auto [u, v] : edges) b.add_edge(u, v);
  return std::move(b).build();
}

constexpr Group J = Group::majority;
constexpr Group N = Group::minority;

inline LabeledGraph path_graph(std::size_t n, Group g = J) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return make_graph(std::vector<Group>(n, g), edges);
}

inline LabeledGraph complete_graph(std::size_t n, const std::vector<Group>& groups = {}) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return make_graph(groups.empty() ? std::vector<Group>(n, J) : groups, edges);
}

// Erdos-Renyi style graph with random labels, drawn with std::mt19937.
inline LabeledGraph random_graph(std::mt19937& gen, std::size_t n, double p, double minority = 0.3) {
  std::bernoulli_distribution edge(p), label(minority);
  std::vector<Group> groups(n);
  for (auto& g : groups) g = label(gen) ? N : J;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (edge(gen)) edges.emplace_back(i, j);
  return make_graph(groups, edges);
}

inline constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();

// All-pairs hop distances by Floyd-Warshall over an adjacency matrix.
inline std::vector<std::vector<std::uint32_t>> floyd_warshall(const LabeledGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<std::uint32_t>> d(n, std::vector<std::uint32_t>(n, kInf));
  for (NodeId i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (NodeId j : g.neighbors(i)) d[i][j] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] != kInf && d[k][j] != kInf && d[i][k] + d[k][j] < d[i][j])
          d[i][j] = d[i][k] + d[k][j];
  return d;
}

// W1 between two equal-weight samples by brute force: replicate both to a
// common size L = lcm(|a|, |b|) and minimise the matching cost over every
// permutation. Only for L <= 8.
inline double brute_force_transport(std::vector<double> a, std::vector<double> b) {
  const std::size_t L = std::lcm(a.size(), b.size());
  std::vector<double> xa, xb;
  for (double x : a)
    for (std::size_t i = 0; i < L / a.size(); ++i) xa.push_back(x);
  for (double x : b)
    for (std::size_t i = 0; i < L / b.size(); ++i) xb.push_back(x);
  std::vector<std::size_t> perm(L);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < L; ++i) cost += std::abs(xa[i] - xb[perm[i]]);
    best = std::min(best, cost / static_cast<double>(L));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Structural invariants every LabeledGraph must satisfy.
inline void expect_well_formed(const LabeledGraph& g) {
  std::size_t degree_sum = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto nb = g.neighbors(u);
    degree_sum += nb.size();
    ASSERT_TRUE(std::is_sorted(nb.begin(), nb.end()));
    ASSERT_TRUE(std::adjacent_find(nb.begin(), nb.end()) == nb.end()) << "parallel edge at " << u;
    for (NodeId v : nb) {
      ASSERT_NE(u, v) << "self-loop";
      ASSERT_TRUE(g.has_edge(v, u)) << "asymmetric adjacency " << u << "-" << v;
    }
  }
  ASSERT_EQ(degree_sum, 2 * g.edge_count());
}

// |observed - expected| within k binomial standard errors.
inline void expect_frequency(std::size_t hits, std::size_t trials, double p, double k = 3.0) {
  const double freq = static_cast<double>(hits) / static_cast<double>(trials);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  EXPECT_LE(std::abs(freq - p), k * se + 1e-12) << "freq " << freq << " expected " << p;
}

}  // namespace fairnet::testing
