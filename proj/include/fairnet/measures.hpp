#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "fairnet/error.hpp"
#include "fairnet/graph.hpp"
#include "fairnet/rng.hpp"

namespace fairnet {

struct Homophily {
  double dyadicity_maj = 0.0;
  double dyadicity_min = 0.0;
  double heterophilicity = 0.0;
};

// Dyadicity per group and heterophilicity, each the observed edge count over
// its random-mixing expectation at density p = 2E / (N(N-1)). A group with a
// single node has no within-group pairs, so its dyadicity is NaN.
inline Homophily dyadicity_heterophilicity(const LabeledGraph& graph) {
  const GroupTally t = group_tally(graph);
  const double n = static_cast<double>(graph.node_count());
  if (graph.node_count() < 2) throw UndefinedMeasure("dyadicity: fewer than two nodes");
  if (t.n_maj == 0 || t.n_min == 0) throw UndefinedMeasure("dyadicity: graph has a single group");
  if (graph.edge_count() == 0) throw UndefinedMeasure("dyadicity: graph has no edges");
  const double p = 2.0 * static_cast<double>(graph.edge_count()) / (n * (n - 1.0));
  auto within = [p](std::size_t edges, std::size_t size) {
    if (size < 2) return std::numeric_limits<double>::quiet_NaN();
    const double s = static_cast<double>(size);
    return static_cast<double>(edges) / (s * (s - 1.0) / 2.0 * p);
  };
  Homophily out;
  out.dyadicity_maj = within(t.e_mm, t.n_maj);
  out.dyadicity_min = within(t.e_nn, t.n_min);
  out.heterophilicity = static_cast<double>(t.e_cross) /
                        (static_cast<double>(t.n_maj) * static_cast<double>(t.n_min) * p);
  return out;
}

struct DistanceStats {
  double avg_shortest_path = 0.0;
  std::uint32_t diameter = 0;
  // Set in sampling mode: the diameter is the largest eccentricity observed.
  bool diameter_is_lower_bound = false;
  std::size_t sources_used = 0;
};

// Average shortest path over unordered node pairs and the diameter, on a
// connected graph. With `sample_sources`, BFS runs only from that many
// distinct uniformly drawn sources and the average is the unbiased
// estimate over their pairs.
inline DistanceStats distance_stats(const LabeledGraph& graph,
                                    std::optional<std::size_t> sample_sources = std::nullopt,
                                    std::uint64_t seed = 0) {
  const std::size_t n = graph.node_count();
  if (!is_connected(graph)) throw NotConnected("distance_stats: graph must be connected");
  DistanceStats out;
  if (n < 2) return out;

  std::vector<NodeId> sources(n);
  std::iota(sources.begin(), sources.end(), NodeId{0});
  if (sample_sources && *sample_sources < n) {
    // Partial Fisher-Yates.
    Rng rng(seed);
    for (std::size_t i = 0; i < *sample_sources; ++i) {
      std::swap(sources[i], sources[i + rng.below(n - i)]);
    }
    sources.resize(*sample_sources);
    std::sort(sources.begin(), sources.end());
    out.diameter_is_lower_bound = true;
  }

  std::vector<std::uint32_t> dist(n);
  std::vector<NodeId> queue(n);
  long double total = 0.0L;
  for (NodeId s : sources) {
    std::fill(dist.begin(), dist.end(), kUnreachable);
    dist[s] = 0;
    queue[0] = s;
    std::size_t head = 0;
    std::size_t tail = 1;
    std::uint64_t sum = 0;
    while (head < tail) {
      const NodeId u = queue[head++];
      for (NodeId v : graph.neighbors_unchecked(u)) {
        if (dist[v] == kUnreachable) {
          dist[v] = dist[u] + 1;
          sum += dist[v];
          queue[tail++] = v;
        }
      }
    }
    out.diameter = std::max(out.diameter, dist[queue[tail - 1]]);
    total += static_cast<long double>(sum);
  }
  out.sources_used = sources.size();
  out.avg_shortest_path = static_cast<double>(
      total / (static_cast<long double>(sources.size()) * static_cast<long double>(n - 1)));
  return out;
}

// Wasserstein-1 distance between two empirical distributions on the real
// line: the integral of |F_a - F_b| over the merged sorted support.
inline double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw UndefinedMeasure("wasserstein1: empty sample");
  std::vector<double> xa(a.begin(), a.end());
  std::vector<double> xb(b.begin(), b.end());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t ia = 0;
  std::size_t ib = 0;
  double prev = std::min(xa.front(), xb.front());
  double distance = 0.0;
  while (ia < xa.size() || ib < xb.size()) {
    double next;
    if (ib == xb.size() || (ia < xa.size() && xa[ia] <= xb[ib])) {
      next = xa[ia];
    } else {
      next = xb[ib];
    }
    const double gap = std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb);
    distance += gap * (next - prev);
    while (ia < xa.size() && xa[ia] == next) ++ia;
    while (ib < xb.size() && xb[ib] == next) ++ib;
    prev = next;
  }
  return distance;
}

inline std::vector<double> group_degrees(const LabeledGraph& graph, Group g) {
  std::vector<double> out;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (graph.group_unchecked(v) == g) {
      out.push_back(static_cast<double>(graph.neighbors_unchecked(v).size()));
    }
  }
  return out;
}

// Earth Mover Distance between the minority and majority degree
// distributions, in raw degree units.
inline double degree_emd(const LabeledGraph& graph) {
  const auto maj = group_degrees(graph, Group::majority);
  const auto min = group_degrees(graph, Group::minority);
  if (maj.empty() || min.empty()) throw UndefinedMeasure("degree_emd: a group is empty");
  return wasserstein1(min, maj);
}

struct DegreeInequality {
  double power_inequality = 0.0;  // mean(d_min) / mean(d_maj)
  double glass_ceiling = 0.0;     // E(d_min^2) / E(d_maj^2)
};

inline DegreeInequality power_and_ceiling_from(std::span<const double> maj,
                                               std::span<const double> min) {
  if (maj.empty() || min.empty()) throw UndefinedMeasure("power inequality: a group is empty");
  auto moments = [](std::span<const double> d) {
    double first = 0.0;
    double second = 0.0;
    for (double x : d) {
      first += x;
      second += x * x;
    }
    const auto n = static_cast<double>(d.size());
    return std::pair{first / n, second / n};
  };
  const auto [maj1, maj2] = moments(maj);
  const auto [min1, min2] = moments(min);
  if (!(maj1 > 0.0) || !(maj2 > 0.0)) {
    throw UndefinedMeasure("power inequality: majority group has zero degree");
  }
  return {min1 / maj1, min2 / maj2};
}

inline DegreeInequality power_and_ceiling(const LabeledGraph& graph) {
  return power_and_ceiling_from(group_degrees(graph, Group::majority),
                                group_degrees(graph, Group::minority));
}

struct MeasureReport {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  GroupTally tally;
  double dyadicity_maj = 0.0;
  double dyadicity_min = 0.0;
  double heterophilicity = 0.0;
  double avg_shortest_path = 0.0;
  std::uint32_t diameter = 0;
  bool distances_on_lcc = false;       // graph was disconnected
  bool distances_sampled = false;      // diameter is then a lower bound
  double emd = 0.0;
  double power_inequality = 0.0;
  double glass_ceiling = 0.0;
  double avg_degree_maj = 0.0;
  double avg_degree_min = 0.0;
  std::size_t max_degree_maj = 0;
  std::size_t max_degree_min = 0;
};

struct MeasureOptions {
  bool distances = true;
  // Graphs above this size use sampled distances unless sample_sources is set.
  std::size_t exact_distance_limit = 20000;
  std::optional<std::size_t> sample_sources;
  std::size_t default_sample_sources = 1000;
  std::uint64_t seed = 0;
};

inline MeasureReport measure(const LabeledGraph& graph, const MeasureOptions& options = {}) {
  MeasureReport r;
  r.node_count = graph.node_count();
  r.edge_count = graph.edge_count();
  r.tally = group_tally(graph);

  const Homophily hom = dyadicity_heterophilicity(graph);
  r.dyadicity_maj = hom.dyadicity_maj;
  r.dyadicity_min = hom.dyadicity_min;
  r.heterophilicity = hom.heterophilicity;

  const auto maj = group_degrees(graph, Group::majority);
  const auto min = group_degrees(graph, Group::minority);
  r.emd = wasserstein1(min, maj);
  const auto ineq = power_and_ceiling_from(maj, min);
  r.power_inequality = ineq.power_inequality;
  r.glass_ceiling = ineq.glass_ceiling;
  auto mean = [](const std::vector<double>& d) {
    return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  };
  r.avg_degree_maj = mean(maj);
  r.avg_degree_min = mean(min);
  r.max_degree_maj = static_cast<std::size_t>(*std::max_element(maj.begin(), maj.end()));
  r.max_degree_min = static_cast<std::size_t>(*std::max_element(min.begin(), min.end()));

  if (options.distances) {
    std::optional<LabeledGraph> lcc;
    if (!is_connected(graph)) {
      lcc = largest_connected_component(graph);
      r.distances_on_lcc = true;
    }
    const LabeledGraph& target = lcc ? *lcc : graph;
    auto sources = options.sample_sources;
    if (!sources && target.node_count() > options.exact_distance_limit) {
      sources = options.default_sample_sources;
    }
    const DistanceStats ds = distance_stats(target, sources, options.seed);
    r.avg_shortest_path = ds.avg_shortest_path;
    r.diameter = ds.diameter;
    r.distances_sampled = ds.diameter_is_lower_bound;
  }
  return r;
}

}  // namespace fairnet
