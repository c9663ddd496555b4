#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairnet/error.hpp"
#include "fairnet/graph.hpp"
#include "fairnet/rng.hpp"

namespace fairnet {

enum class ContagionKind { simple, complex };
enum class SeedingBucket { low, mid, high };
enum class Termination { all_infected, stalled, step_cap };

inline const char* to_string(ContagionKind k) { return k == ContagionKind::simple ? "simple" : "complex"; }
inline const char* to_string(SeedingBucket b) {
  switch (b) {
    case SeedingBucket::low: return "low";
    case SeedingBucket::mid: return "mid";
    case SeedingBucket::high: return "high";
  }
  return "?";
}
inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::all_infected: return "all_infected";
    case Termination::stalled: return "stalled";
    case Termination::step_cap: return "step_cap";
  }
  return "?";
}

inline std::optional<ContagionKind> parse_kind(std::string_view s) {
  if (s == "simple") return ContagionKind::simple;
  if (s == "complex") return ContagionKind::complex;
  return std::nullopt;
}
inline std::optional<SeedingBucket> parse_bucket(std::string_view s) {
  if (s == "low") return SeedingBucket::low;
  if (s == "mid") return SeedingBucket::mid;
  if (s == "high") return SeedingBucket::high;
  return std::nullopt;
}

struct ContagionConfig {
  ContagionKind kind = ContagionKind::simple;
  double activation_threshold = 0.1;  // complex only
  double r_within = 0.7;
  double r_between = 0.7;
  std::size_t seed_count = 10;
  SeedingBucket bucket = SeedingBucket::low;
  std::size_t max_steps = 100000;
  std::size_t bins = 100;
  std::uint64_t rng_seed = 0;

  bool symmetric() const noexcept { return r_within == r_between; }
};

inline void validate(const ContagionConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError("contagion config: " + msg); };
  if (!(c.activation_threshold >= 0.0 && c.activation_threshold <= 1.0)) {
    fail("activation threshold must lie in [0, 1]");
  }
  if (!(c.r_between >= 0.0 && c.r_between <= c.r_within && c.r_within <= 1.0)) {
    fail("rates must satisfy 0 <= r_between <= r_within <= 1");
  }
  if (c.seed_count < 1) fail("seed count must be >= 1");
  if (c.max_steps < 1) fail("max_steps must be >= 1");
  if (c.bins < 1) fail("bins must be >= 1");
}

inline double transmission_rate(Group source, Group target, const ContagionConfig& config) {
  return source == target ? config.r_within : config.r_between;
}

// Inclusive range of minority seed counts k allowed by a bucket for s seeds:
// low 10k < 3s, mid 3s <= 10k <= 7s, high 10k > 7s. Empty when lo > hi.
inline std::pair<std::size_t, std::size_t> bucket_range(SeedingBucket bucket, std::size_t s) {
  std::size_t lo = 0;
  std::size_t hi = s;
  switch (bucket) {
    case SeedingBucket::low:
      lo = 0;
      hi = (3 * s + 9) / 10;  // ceil(0.3 s)
      if (hi == 0) return {1, 0};
      hi -= 1;
      break;
    case SeedingBucket::mid:
      lo = (3 * s + 9) / 10;
      hi = 7 * s / 10;
      break;
    case SeedingBucket::high:
      lo = 7 * s / 10 + 1;
      hi = s;
      break;
  }
  return {lo, hi};
}

// Random seeding under a minority-share bucket: k is uniform over the
// admissible counts, then k minority and s - k majority nodes are drawn
// uniformly without replacement. Returned ids are sorted.
inline std::vector<NodeId> select_seeds(const LabeledGraph& graph, std::size_t s,
                                        SeedingBucket bucket, Rng& rng) {
  std::array<std::vector<NodeId>, 2> members;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    members[index_of(graph.group_unchecked(v))].push_back(v);
  }
  const std::size_t n_maj = members[0].size();
  const std::size_t n_min = members[1].size();
  const std::size_t max_k = std::min(s, n_min);
  if (s < 1 || s > graph.node_count()) {
    throw SeedingError("seed count " + std::to_string(s) + " outside [1, node_count]", max_k);
  }
  auto [lo, hi] = bucket_range(bucket, s);
  lo = std::max(lo, s > n_maj ? s - n_maj : std::size_t{0});
  hi = std::min(hi, max_k);
  if (lo > hi) {
    throw SeedingError(std::string("seeding bucket ") + to_string(bucket) +
                           " unsatisfiable; maximum achievable minority seeds is " +
                           std::to_string(max_k),
                       max_k);
  }
  const std::size_t k = lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
  std::vector<NodeId> seeds;
  seeds.reserve(s);
  auto take = [&](std::vector<NodeId>& pool, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
      seeds.push_back(pool[i]);
    }
  };
  take(members[1], k);
  take(members[0], s - k);
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

// Synchronous SI state. Tracks, per node, how many infected neighbors it has
// in each group and the frontier of susceptible nodes with at least one.
class SpreadState {
 public:
  SpreadState(const LabeledGraph& graph, std::span<const NodeId> seeds)
      : graph_(&graph),
        infected_(graph.node_count(), 0),
        in_frontier_(graph.node_count(), 0),
        exposure_(graph.node_count(), {0, 0}) {
    std::vector<NodeId> sorted(seeds.begin(), seeds.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (NodeId v : sorted) graph.degree(v);  // validates ids
    infect(sorted);
  }

  std::size_t infected_count(Group g) const { return counts_[index_of(g)]; }
  std::size_t infected_total() const { return counts_[0] + counts_[1]; }
  bool is_infected(NodeId v) const { return infected_[v] != 0; }

  // Nodes that may be infected this step with their infection probability.
  // Complex contagion requires an infected-neighbor share >= a.
  std::vector<std::pair<NodeId, double>> eligible(const ContagionConfig& config) const {
    std::vector<std::pair<NodeId, double>> out;
    for (NodeId v : frontier_) {
      const auto [from_maj, from_min] = exposure_[v];
      const std::size_t exposed = from_maj + from_min;
      if (exposed == 0) continue;
      if (config.kind == ContagionKind::complex) {
        const double share =
            static_cast<double>(exposed) / static_cast<double>(graph_->neighbors_unchecked(v).size());
        if (share < config.activation_threshold) continue;
      }
      const Group gv = graph_->group_unchecked(v);
      const std::uint32_t same = gv == Group::majority ? from_maj : from_min;
      const std::uint32_t cross = exposed - same;
      const double escape = std::pow(1.0 - config.r_within, same) *
                            std::pow(1.0 - config.r_between, cross);
      const double p = 1.0 - escape;
      if (p > 0.0) out.emplace_back(v, p);
    }
    return out;
  }

  // One synchronous update; every transmission is decided against the
  // pre-step infected set. Returns the newly infected nodes.
  std::vector<NodeId> step(const ContagionConfig& config, Rng& rng) {
    return advance(eligible(config), rng);
  }

  // Bernoulli draw for each (node, probability) from eligible(), in order.
  std::vector<NodeId> advance(std::span<const std::pair<NodeId, double>> candidates, Rng& rng) {
    std::vector<NodeId> fresh;
    for (const auto& [v, p] : candidates) {
      if (rng.uniform() < p) fresh.push_back(v);
    }
    infect(fresh);
    return fresh;
  }

 private:
  void infect(std::span<const NodeId> nodes) {
    for (NodeId u : nodes) {
      infected_[u] = 1;
      ++counts_[index_of(graph_->group_unchecked(u))];
    }
    for (NodeId u : nodes) {
      const bool from_maj = graph_->group_unchecked(u) == Group::majority;
      for (NodeId v : graph_->neighbors_unchecked(u)) {
        ++(from_maj ? exposure_[v].first : exposure_[v].second);
        if (!infected_[v] && !in_frontier_[v]) {
          in_frontier_[v] = 1;
          frontier_.push_back(v);
        }
      }
    }
    std::erase_if(frontier_, [this](NodeId v) { return infected_[v] != 0; });
  }

  const LabeledGraph* graph_;
  std::vector<std::uint8_t> infected_;
  std::vector<std::uint8_t> in_frontier_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> exposure_;  // (from maj, from min)
  std::vector<NodeId> frontier_;
  std::array<std::size_t, 2> counts_{0, 0};
};

// Single step from an explicit infected set.
inline std::vector<NodeId> step(const LabeledGraph& graph, std::span<const NodeId> infected,
                                const ContagionConfig& config, Rng& rng) {
  SpreadState state(graph, infected);
  auto fresh = state.step(config, rng);
  std::sort(fresh.begin(), fresh.end());
  return fresh;
}

struct SpreadTrace {
  std::vector<std::size_t> infected_maj;  // index t = 0..T
  std::vector<std::size_t> infected_min;
  std::size_t T = 0;
  Termination terminal_reason = Termination::stalled;
  std::vector<NodeId> seeds;
  std::size_t seed_minority = 0;
};

// Runs SI from explicit seeds. T is the last step at which any node was
// infected; the trace is cut there.
inline SpreadTrace simulate_from(const LabeledGraph& graph, std::span<const NodeId> seeds,
                                 const ContagionConfig& config, Rng& rng) {
  validate(config);
  SpreadState state(graph, seeds);
  SpreadTrace trace;
  trace.seeds.assign(seeds.begin(), seeds.end());
  for (NodeId v : seeds) trace.seed_minority += graph.group_of(v) == Group::minority;
  trace.infected_maj.push_back(state.infected_count(Group::majority));
  trace.infected_min.push_back(state.infected_count(Group::minority));

  std::size_t last_infection = 0;
  for (std::size_t t = 1;; ++t) {
    if (state.infected_total() == graph.node_count()) {
      trace.terminal_reason = Termination::all_infected;
      break;
    }
    const auto candidates = state.eligible(config);
    if (candidates.empty()) {
      trace.terminal_reason = Termination::stalled;
      break;
    }
    if (t > config.max_steps) {
      trace.terminal_reason = Termination::step_cap;
      break;
    }
    if (!state.advance(candidates, rng).empty()) last_infection = t;
    trace.infected_maj.push_back(state.infected_count(Group::majority));
    trace.infected_min.push_back(state.infected_count(Group::minority));
  }
  trace.T = last_infection;
  trace.infected_maj.resize(trace.T + 1);
  trace.infected_min.resize(trace.T + 1);
  return trace;
}

// Seeds per the configured bucket, then spreads. Deterministic in rng_seed.
inline SpreadTrace simulate(const LabeledGraph& graph, const ContagionConfig& config) {
  validate(config);
  Rng rng(config.rng_seed);
  const auto seeds = select_seeds(graph, config.seed_count, config.bucket, rng);
  return simulate_from(graph, seeds, config, rng);
}

// (a - b) / (a + b) with 0/0 = 0.
inline double relative_gap(double maj_fraction, double min_fraction) {
  const double sum = maj_fraction + min_fraction;
  return sum > 0.0 ? (maj_fraction - min_fraction) / sum : 0.0;
}

struct EqualityCurve {
  std::vector<double> delta;         // bin b-1 holds the value at t/T = b/B
  std::vector<double> maj_fraction;  // within-group infected fractions
  std::vector<double> min_fraction;
};

// Nearest step to t/T = b/B (half rounds up).
inline std::size_t nearest_step(std::size_t b, std::size_t bins, std::size_t T) {
  return (2 * b * T + bins) / (2 * bins);
}

inline EqualityCurve equality_curve(const SpreadTrace& trace, const LabeledGraph& graph,
                                    std::size_t bins) {
  if (trace.T == 0) throw DegenerateTrace("equality_curve: trace has T = 0");
  if (bins == 0) throw ConfigError("equality_curve: bins must be >= 1");
  const GroupTally tally = group_tally(graph);
  auto fraction = [](std::size_t infected, std::size_t size) {
    return size > 0 ? static_cast<double>(infected) / static_cast<double>(size) : 0.0;
  };
  EqualityCurve curve;
  curve.delta.reserve(bins);
  for (std::size_t b = 1; b <= bins; ++b) {
    const std::size_t t = nearest_step(b, bins, trace.T);
    const double maj = fraction(trace.infected_maj[t], tally.n_maj);
    const double min = fraction(trace.infected_min[t], tally.n_min);
    curve.maj_fraction.push_back(maj);
    curve.min_fraction.push_back(min);
    curve.delta.push_back(relative_gap(maj, min));
  }
  return curve;
}

// Total infected fraction I(t) for t = 0..T in raw time.
inline std::vector<double> efficiency_curve(const SpreadTrace& trace, const LabeledGraph& graph) {
  std::vector<double> out;
  out.reserve(trace.infected_maj.size());
  const auto n = static_cast<double>(graph.node_count());
  for (std::size_t t = 0; t < trace.infected_maj.size(); ++t) {
    out.push_back(n > 0 ? static_cast<double>(trace.infected_maj[t] + trace.infected_min[t]) / n
                        : 0.0);
  }
  return out;
}

}  // namespace fairnet
