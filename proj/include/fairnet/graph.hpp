#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairnet/error.hpp"

namespace fairnet {

using NodeId = std::uint32_t;

enum class Group : std::uint8_t { majority = 0, minority = 1 };

constexpr std::size_t index_of(Group g) noexcept { return static_cast<std::size_t>(g); }
constexpr Group other(Group g) noexcept {
  return g == Group::majority ? Group::minority : Group::majority;
}
inline const char* to_string(Group g) { return g == Group::majority ? "maj" : "min"; }

class GraphBuilder;

// Undirected, unweighted graph with one binary group label per node. Node ids
// are dense (0..N-1, arrival order for generated graphs). Neighbor lists are
// kept sorted and duplicate-free. Instances are only mutated through a
// GraphBuilder and are read-only afterwards.
class LabeledGraph {
 public:
  LabeledGraph() = default;

  std::size_t node_count() const noexcept { return groups_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  Group group_of(NodeId v) const {
    check(v);
    return groups_[v];
  }
  std::span<const NodeId> neighbors(NodeId v) const {
    check(v);
    return adjacency_[v];
  }
  std::size_t degree(NodeId v) const {
    check(v);
    return adjacency_[v].size();
  }
  bool has_edge(NodeId u, NodeId v) const {
    check(u);
    check(v);
    const auto& list = adjacency_[u];
    return std::binary_search(list.begin(), list.end(), v);
  }

  // Unchecked accessors for hot loops; callers guarantee v < node_count().
  Group group_unchecked(NodeId v) const noexcept { return groups_[v]; }
  const std::vector<NodeId>& neighbors_unchecked(NodeId v) const noexcept {
    return adjacency_[v];
  }

  std::span<const Group> groups() const noexcept { return groups_; }

  // Edges as (u, v) with u < v, ordered by u then v.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < node_count(); ++u) {
      for (NodeId v : adjacency_[u]) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

  friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;

 private:
  friend class GraphBuilder;

  void check(NodeId v) const {
    if (v >= groups_.size()) {
      throw InvalidNode("node " + std::to_string(v) + " out of range (node_count " +
                        std::to_string(groups_.size()) + ")");
    }
  }

  std::vector<Group> groups_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::size_t edge_count_ = 0;
};

class GraphBuilder {
 public:
  GraphBuilder() = default;
  explicit GraphBuilder(std::size_t reserve_nodes) {
    graph_.groups_.reserve(reserve_nodes);
    graph_.adjacency_.reserve(reserve_nodes);
  }

  NodeId add_node(Group g) {
    graph_.groups_.push_back(g);
    graph_.adjacency_.emplace_back();
    return static_cast<NodeId>(graph_.groups_.size() - 1);
  }

  // Returns false (and leaves the graph untouched) for self-loops and
  // already-present edges.
  bool add_edge(NodeId u, NodeId v) {
    graph_.check(u);
    graph_.check(v);
    if (u == v) return false;
    auto& lu = graph_.adjacency_[u];
    auto it = std::lower_bound(lu.begin(), lu.end(), v);
    if (it != lu.end() && *it == v) return false;
    lu.insert(it, v);
    auto& lv = graph_.adjacency_[v];
    lv.insert(std::lower_bound(lv.begin(), lv.end(), u), u);
    ++graph_.edge_count_;
    return true;
  }

  // Read access while growing.
  const LabeledGraph& view() const noexcept { return graph_; }

  LabeledGraph build() && { return std::move(graph_); }

 private:
  LabeledGraph graph_;
};

struct GroupTally {
  std::size_t n_maj = 0;
  std::size_t n_min = 0;
  std::size_t e_mm = 0;     // majority-majority
  std::size_t e_nn = 0;     // minority-minority
  std::size_t e_cross = 0;  // majority-minority

  friend bool operator==(const GroupTally&, const GroupTally&) = default;
};

inline std::size_t degree(const LabeledGraph& graph, NodeId node) { return graph.degree(node); }

inline GroupTally group_tally(const LabeledGraph& graph) {
  GroupTally t;
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    const Group gu = graph.group_unchecked(u);
    (gu == Group::majority ? t.n_maj : t.n_min)++;
    for (NodeId v : graph.neighbors_unchecked(u)) {
      if (v <= u) continue;
      const Group gv = graph.group_unchecked(v);
      if (gu != gv) {
        ++t.e_cross;
      } else if (gu == Group::majority) {
        ++t.e_mm;
      } else {
        ++t.e_nn;
      }
    }
  }
  return t;
}

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

// Hop distances from `source`; unreachable nodes hold kUnreachable.
inline std::vector<std::uint32_t> bfs_distances(const LabeledGraph& graph, NodeId source) {
  graph.degree(source);  // validates source
  std::vector<std::uint32_t> dist(graph.node_count(), kUnreachable);
  std::vector<NodeId> frontier{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const NodeId u = frontier[head];
    for (NodeId v : graph.neighbors_unchecked(u)) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

// Component index per node; components are numbered in order of their
// smallest node id.
inline std::vector<std::uint32_t> component_labels(const LabeledGraph& graph,
                                                   std::size_t* component_count = nullptr) {
  std::vector<std::uint32_t> label(graph.node_count(), kUnreachable);
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (NodeId s = 0; s < graph.node_count(); ++s) {
    if (label[s] != kUnreachable) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : graph.neighbors_unchecked(u)) {
        if (label[v] == kUnreachable) {
          label[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  if (component_count) *component_count = next;
  return label;
}

inline bool is_connected(const LabeledGraph& graph) {
  std::size_t count = 0;
  component_labels(graph, &count);
  return count <= 1;
}

// Induced subgraph on the node subset flagged in `keep`, re-indexed densely
// in original id order.
inline LabeledGraph induced_subgraph(const LabeledGraph& graph, const std::vector<bool>& keep) {
  std::vector<NodeId> new_id(graph.node_count(), 0);
  GraphBuilder builder;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (keep[v]) new_id[v] = builder.add_node(graph.group_unchecked(v));
  }
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    if (!keep[u]) continue;
    for (NodeId v : graph.neighbors_unchecked(u)) {
      if (u < v && keep[v]) builder.add_edge(new_id[u], new_id[v]);
    }
  }
  return std::move(builder).build();
}

// Largest connected component; ties go to the component holding the smallest
// original id.
inline LabeledGraph largest_connected_component(const LabeledGraph& graph) {
  if (graph.node_count() == 0) return {};
  std::size_t count = 0;
  const auto label = component_labels(graph, &count);
  std::vector<std::size_t> sizes(count, 0);
  for (auto l : label) ++sizes[l];
  // Labels follow smallest-member order, so the first maximum wins ties.
  const auto best = static_cast<std::uint32_t>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<bool> keep(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) keep[v] = label[v] == best;
  return induced_subgraph(graph, keep);
}

}  // namespace fairnet
