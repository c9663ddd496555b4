#include <random>

#include <gtest/gtest.h>

#include "fairnet/graph.hpp"
#include "test_support.hpp"

namespace fairnet {
namespace {

using testing::J;
using testing::N;
using testing::make_graph;

TEST(Degree, InitializationEdge) {
  const auto g = make_graph({J, N}, {{0, 1}});
  EXPECT_EQ(degree(g, 0), 1u);
  EXPECT_EQ(degree(g, 1), 1u);
}

TEST(Degree, IsolatedNode) {
  const auto g = make_graph({J}, {});
  EXPECT_EQ(degree(g, 0), 0u);
}

TEST(Degree, PathInterior) {
  const auto g = testing::path_graph(4);
  EXPECT_EQ(degree(g, 1), 2u);
}

TEST(Degree, OutOfRangeThrows) {
  const auto g = make_graph({J, N}, {{0, 1}});
  EXPECT_THROW(degree(g, 2), InvalidNode);
}

TEST(GraphBuilder, RejectsSelfLoopsAndDuplicates) {
  GraphBuilder b;
  b.add_node(J);
  b.add_node(N);
  EXPECT_TRUE(b.add_edge(0, 1));
  EXPECT_FALSE(b.add_edge(1, 0));
  EXPECT_FALSE(b.add_edge(0, 0));
  EXPECT_THROW(b.add_edge(0, 5), InvalidNode);
  const auto g = std::move(b).build();
  EXPECT_EQ(g.edge_count(), 1u);
  testing::expect_well_formed(g);
}

TEST(GroupTally, InitializationGraph) {
  const auto t = group_tally(make_graph({J, N}, {{0, 1}}));
  EXPECT_EQ(t, (GroupTally{1, 1, 0, 0, 1}));
}

TEST(GroupTally, MixedFourNodes) {
  // a,b majority; c,d minority; edges a-b, c-d, a-c.
  const auto t = group_tally(make_graph({J, J, N, N}, {{0, 1}, {2, 3}, {0, 2}}));
  EXPECT_EQ(t.e_mm, 1u);
  EXPECT_EQ(t.e_nn, 1u);
  EXPECT_EQ(t.e_cross, 1u);
  EXPECT_EQ(t.n_maj, 2u);
  EXPECT_EQ(t.n_min, 2u);
}

TEST(GroupTally, Empty) { EXPECT_EQ(group_tally(LabeledGraph{}), GroupTally{}); }

TEST(LargestComponent, ConnectedIsIdentity) {
  const auto g = make_graph({J, N, J}, {{0, 1}, {1, 2}});
  EXPECT_EQ(largest_connected_component(g), g);
}

TEST(LargestComponent, PicksLargerAndReindexes) {
  // {0,2,4} path (size 3) and {1,3} (size 2).
  const auto g = make_graph({J, N, N, J, J}, {{0, 2}, {2, 4}, {1, 3}});
  const auto lcc = largest_connected_component(g);
  ASSERT_EQ(lcc.node_count(), 3u);
  EXPECT_EQ(lcc.edge_count(), 2u);
  EXPECT_EQ(lcc.group_of(0), J);
  EXPECT_EQ(lcc.group_of(1), N);
  EXPECT_EQ(lcc.group_of(2), J);
  EXPECT_TRUE(lcc.has_edge(0, 1));
  EXPECT_TRUE(lcc.has_edge(1, 2));
}

TEST(LargestComponent, IsolatedNodesTieBreakToNodeZero) {
  const auto g = make_graph({N, J, J}, {});
  const auto lcc = largest_connected_component(g);
  ASSERT_EQ(lcc.node_count(), 1u);
  EXPECT_EQ(lcc.group_of(0), N);
}

TEST(LargestComponent, Empty) { EXPECT_EQ(largest_connected_component(LabeledGraph{}).node_count(), 0u); }

TEST(LargestComponent, OutputConnectedAndMaximal) {
  std::mt19937 gen(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testing::random_graph(gen, 3 + trial % 15, 0.12);
    const auto lcc = largest_connected_component(g);
    EXPECT_TRUE(is_connected(lcc));
    std::size_t count = 0;
    const auto labels = component_labels(g, &count);
    std::vector<std::size_t> sizes(count, 0);
    for (auto l : labels) ++sizes[l];
    for (auto s : sizes) EXPECT_LE(s, lcc.node_count());
    testing::expect_well_formed(lcc);
  }
}

TEST(Bfs, PathFromEnd) {
  const auto d = bfs_distances(testing::path_graph(3), 0);
  EXPECT_EQ(d, (std::vector<std::uint32_t>{0, 1, 2}));
}

TEST(Bfs, UnreachableMarked) {
  const auto d = bfs_distances(make_graph({J, J, N}, {{0, 1}}), 0);
  EXPECT_EQ(d[0], 0u);
  EXPECT_EQ(d[2], kUnreachable);
}

TEST(Bfs, InvalidSourceThrows) {
  EXPECT_THROW(bfs_distances(testing::path_graph(3), 7), InvalidNode);
}

TEST(Bfs, AgreesWithFloydWarshall) {
  std::mt19937 gen(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const auto g = testing::random_graph(gen, n, 0.25);
    const auto oracle = testing::floyd_warshall(g);
    for (NodeId s = 0; s < n; ++s) {
      const auto d = bfs_distances(g, s);
      for (NodeId t = 0; t < n; ++t) ASSERT_EQ(d[t], oracle[s][t]) << "trial " << trial;
    }
  }
}

}  // namespace
}  // namespace fairnet
