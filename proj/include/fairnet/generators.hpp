#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairnet/error.hpp"
#include "fairnet/graph.hpp"
#include "fairnet/rng.hpp"
#include "fairnet/sampling.hpp"

namespace fairnet {

enum class Preset {
  random_network,
  ba,
  random_homophily,
  homophily_ba,
  diversified_homophily,
  diversified_homophily_ba,
};

inline constexpr std::array<Preset, 6> kAllPresets = {
    Preset::random_network,        Preset::ba,
    Preset::random_homophily,      Preset::homophily_ba,
    Preset::diversified_homophily, Preset::diversified_homophily_ba,
};

inline const char* to_string(Preset p) {
  switch (p) {
    case Preset::random_network: return "random";
    case Preset::ba: return "ba";
    case Preset::random_homophily: return "random-homophily";
    case Preset::homophily_ba: return "homophily-ba";
    case Preset::diversified_homophily: return "diversified-homophily";
    case Preset::diversified_homophily_ba: return "diversified-homophily-ba";
  }
  return "?";
}

inline std::optional<Preset> parse_preset(std::string_view token) {
  for (Preset p : kAllPresets) {
    if (token == to_string(p)) return p;
  }
  return std::nullopt;
}

inline bool is_diversified(Preset p) {
  return p == Preset::diversified_homophily || p == Preset::diversified_homophily_ba;
}

struct GeneratorConfig {
  std::size_t n = 5000;       // target node count
  double m = 0.2;             // minority fraction
  std::size_t l = 2;          // links per arriving node
  double h = 0.8;             // h_maj,maj = h_min,min; off-diagonal 1 - h
  double alpha = 1.0;         // preferential attachment exponent
  std::size_t l_d = 0;        // diversified links per node
  double p_d = 0.6;           // diversification probability
  Preset preset = Preset::homophily_ba;
  std::uint64_t rng_seed = 0;
};

// Overwrite the parameters a preset pins down. Free parameters keep their
// values, so one template can be specialized to every preset.
inline GeneratorConfig apply_preset(GeneratorConfig config, Preset preset) {
  config.preset = preset;
  switch (preset) {
    case Preset::random_network:
      config.h = 0.5;
      config.alpha = 0.0;
      config.l_d = 0;
      break;
    case Preset::ba:
      config.h = 0.5;
      config.l_d = 0;
      break;
    case Preset::random_homophily:
      config.alpha = 0.0;
      config.l_d = 0;
      break;
    case Preset::homophily_ba:
      config.l_d = 0;
      break;
    case Preset::diversified_homophily:
      config.alpha = 0.0;
      break;
    case Preset::diversified_homophily_ba:
      break;
  }
  return config;
}

inline void validate(const GeneratorConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError("generator config: " + msg); };
  if (c.n < 2) fail("N must be >= 2");
  if (!(c.m > 0.0 && c.m <= 0.5)) fail("m must lie in (0, 0.5]");
  if (c.l < 1) fail("l must be >= 1");
  if (!(c.h >= 0.0 && c.h <= 1.0)) fail("h must lie in [0, 1]");
  if (!(c.alpha >= 0.0) || !std::isfinite(c.alpha)) fail("alpha must be >= 0");
  if (c.l_d > c.l) fail("l_d must not exceed l");
  if (!(c.p_d >= 0.0 && c.p_d <= 1.0)) fail("p_d must lie in [0, 1]");
  const GeneratorConfig pinned = apply_preset(c, c.preset);
  if (pinned.h != c.h || pinned.alpha != c.alpha || pinned.l_d != c.l_d) {
    fail(std::string("parameters conflict with preset ") + to_string(c.preset));
  }
  if (is_diversified(c.preset) && c.l_d < 1) {
    fail(std::string("preset ") + to_string(c.preset) + " needs l_d >= 1");
  }
}

// Per-run counters for the degenerate paths the growth rules can hit.
struct GenerationStats {
  // Homophily links not formed because every remaining candidate had zero
  // weight (only possible for h in {0, 1}).
  std::size_t homophily_links_skipped = 0;
  // Diversified links not formed because the candidate set was empty or
  // carried zero weight.
  std::size_t diversified_links_skipped = 0;
};

struct AttachmentWeights {
  std::vector<NodeId> candidates;
  std::vector<double> weights;
  double normalization = 0.0;

  std::vector<double> probabilities() const {
    std::vector<double> p(weights.size(), 0.0);
    if (normalization > 0.0) {
      for (std::size_t i = 0; i < weights.size(); ++i) p[i] = weights[i] / normalization;
    }
    return p;
  }
};

inline double homophily_affinity(Group newcomer, Group target, double h) {
  return newcomer == target ? h : 1.0 - h;
}

// d^alpha with 0^0 = 1.
inline double degree_power(std::size_t degree, double alpha) {
  if (alpha == 0.0) return 1.0;
  if (alpha == 1.0) return static_cast<double>(degree);
  return std::pow(static_cast<double>(degree), alpha);
}

// Attachment weights h_{g_j g_i} * d_i^alpha for a newcomer of `new_group`.
inline AttachmentWeights homophily_weights(const LabeledGraph& graph, Group new_group,
                                           std::span<const NodeId> candidates, double h,
                                           double alpha) {
  if (candidates.empty()) throw EmptySupport("homophily_weights: no candidates");
  AttachmentWeights out;
  out.candidates.assign(candidates.begin(), candidates.end());
  out.weights.reserve(candidates.size());
  for (NodeId i : candidates) {
    const double w =
        homophily_affinity(new_group, graph.group_of(i), h) * degree_power(graph.degree(i), alpha);
    out.weights.push_back(w);
    out.normalization += w;
  }
  if (!(out.normalization > 0.0)) {
    throw EmptySupport("homophily_weights: every candidate has zero weight");
  }
  return out;
}

// Diversified-link weights over the neighbors of `anchors`. A candidate k
// reached through anchor i contributes p_jk / (|d_k - d_i| + 1); contributions
// from several anchors are summed. The newcomer and its current neighbors are
// excluded. Candidates are listed in ascending id order.
inline AttachmentWeights diversified_weights(const LabeledGraph& graph, NodeId newcomer,
                                             std::span<const NodeId> anchors, double p_d) {
  if (anchors.empty()) throw EmptySupport("diversified_weights: no anchors");
  const Group new_group = graph.group_of(newcomer);
  std::vector<std::pair<NodeId, double>> contrib;
  for (NodeId i : anchors) {
    const auto di = static_cast<double>(graph.degree(i));
    for (NodeId k : graph.neighbors(i)) {
      if (k == newcomer || graph.has_edge(newcomer, k)) continue;
      const double pjk = graph.group_unchecked(k) != new_group ? p_d : 1.0 - p_d;
      const double gap = std::abs(static_cast<double>(graph.degree(k)) - di);
      contrib.emplace_back(k, pjk / (gap + 1.0));
    }
  }
  if (contrib.empty()) throw EmptySupport("diversified_weights: empty candidate set");
  std::stable_sort(contrib.begin(), contrib.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  AttachmentWeights out;
  for (const auto& [k, w] : contrib) {
    if (out.candidates.empty() || out.candidates.back() != k) {
      out.candidates.push_back(k);
      out.weights.push_back(0.0);
    }
    out.weights.back() += w;
  }
  for (double w : out.weights) out.normalization += w;
  if (!(out.normalization > 0.0)) {
    throw EmptySupport("diversified_weights: every candidate has zero weight");
  }
  return out;
}

// Incremental homophilic preferential-attachment sampler. Keeps one Fenwick
// tree of d^alpha per group so each draw costs O(log N); the group is chosen
// first with weight h_eff * (group total), then the node inside that group.
class HomophilyAttachment {
 public:
  HomophilyAttachment(std::size_t capacity, double h, double alpha)
      : h_(h), alpha_(alpha), trees_{FenwickSampler(capacity), FenwickSampler(capacity)} {}

  // Register (or refresh) node v with its current degree.
  void update(NodeId v, Group g, std::size_t degree) {
    trees_[index_of(g)].set(v, degree_power(degree, alpha_));
  }

  // Up to `count` distinct existing nodes for a newcomer of `g`, drawn with
  // probability proportional to the homophily weights, without replacement.
  std::vector<NodeId> draw(Group g, std::size_t count, Rng& rng) {
    std::vector<NodeId> picked;
    std::vector<std::pair<std::size_t, double>> removed;  // (group, weight)
    picked.reserve(count);
    bool rebuilt = false;
    while (picked.size() < count) {
      const double same = homophily_affinity(g, g, h_) * trees_[index_of(g)].total();
      const double cross = homophily_affinity(g, other(g), h_) * trees_[index_of(other(g))].total();
      const double total = std::max(same, 0.0) + std::max(cross, 0.0);
      if (!(total > 0.0)) break;
      const double u = rng.uniform() * total;
      std::size_t group_index;
      double target;
      if (u < same) {
        group_index = index_of(g);
        target = u / homophily_affinity(g, g, h_);
      } else {
        group_index = index_of(other(g));
        target = (u - same) / homophily_affinity(g, other(g), h_);
      }
      auto& tree = trees_[group_index];
      auto hit = tree.find(std::min(target, tree.total()));
      if (!hit) {
        // Accumulated rounding left a positive total with no positive slot.
        if (rebuilt) break;
        tree = rebuild(tree);
        rebuilt = true;
        continue;
      }
      const auto v = static_cast<NodeId>(*hit);
      picked.push_back(v);
      removed.emplace_back(group_index, tree.weight(v));
      tree.set(v, 0.0);
    }
    for (std::size_t i = 0; i < picked.size(); ++i) {
      trees_[removed[i].first].set(picked[i], removed[i].second);
    }
    return picked;
  }

 private:
  static FenwickSampler rebuild(const FenwickSampler& old) {
    FenwickSampler fresh(old.capacity());
    for (std::size_t i = 0; i < old.capacity(); ++i) fresh.set(i, old.weight(i));
    return fresh;
  }

  double h_;
  double alpha_;
  std::array<FenwickSampler, 2> trees_;
};

namespace detail {

inline Group draw_group(double m, Rng& rng) {
  return rng.uniform() < m ? Group::minority : Group::majority;
}

// Shared growth loop. `diversified_links` = 0 gives Homophily BA and its
// variants.
inline LabeledGraph grow(const GeneratorConfig& config, std::size_t homophily_links,
                         std::size_t diversified_links, GenerationStats* stats) {
  Rng rng(config.rng_seed);
  GraphBuilder builder(config.n);
  HomophilyAttachment sampler(config.n, config.h, config.alpha);
  GenerationStats local;

  // Initialization: one majority node linked to one minority node.
  builder.add_node(Group::majority);
  builder.add_node(Group::minority);
  builder.add_edge(0, 1);
  sampler.update(0, Group::majority, 1);
  sampler.update(1, Group::minority, 1);

  std::vector<NodeId> touched;
  for (std::size_t j = 2; j < config.n; ++j) {
    const Group g = draw_group(config.m, rng);
    const std::size_t wanted = std::min(homophily_links, j);
    const auto anchors = sampler.draw(g, wanted, rng);
    local.homophily_links_skipped += wanted - anchors.size();

    const NodeId newcomer = builder.add_node(g);
    touched.assign(anchors.begin(), anchors.end());
    for (NodeId i : anchors) builder.add_edge(newcomer, i);

    if (diversified_links > 0) {
      std::size_t formed = 0;
      if (!anchors.empty()) {
        try {
          const auto w = diversified_weights(builder.view(), newcomer, anchors, config.p_d);
          const auto picks = sample_without_replacement(w.weights, diversified_links, rng);
          for (std::size_t idx : picks) {
            if (builder.add_edge(newcomer, w.candidates[idx])) {
              touched.push_back(w.candidates[idx]);
              ++formed;
            }
          }
        } catch (const EmptySupport&) {
        }
      }
      local.diversified_links_skipped += diversified_links - formed;
    }

    const LabeledGraph& view = builder.view();
    for (NodeId v : touched) sampler.update(v, view.group_unchecked(v), view.degree(v));
    sampler.update(newcomer, g, view.degree(newcomer));
  }
  if (stats) *stats = local;
  return std::move(builder).build();
}

}  // namespace detail

// Homophily BA growth (also BA, Random Homophily and Random Network through
// the preset-pinned parameters).
inline LabeledGraph grow_homophily_ba(const GeneratorConfig& config,
                                      GenerationStats* stats = nullptr) {
  validate(config);
  if (config.l_d != 0) throw ConfigError("grow_homophily_ba: l_d must be 0");
  return detail::grow(config, config.l, 0, stats);
}

// Diversified Homophily BA growth: l - l_d homophily links, then l_d
// diversified links around the nodes just linked.
inline LabeledGraph grow_diversified(const GeneratorConfig& config,
                                     GenerationStats* stats = nullptr) {
  validate(config);
  if (config.l_d < 1) throw ConfigError("grow_diversified: l_d must be >= 1");
  return detail::grow(config, config.l - config.l_d, config.l_d, stats);
}

inline LabeledGraph generate(const GeneratorConfig& config, GenerationStats* stats = nullptr) {
  return is_diversified(config.preset) ? grow_diversified(config, stats)
                                       : grow_homophily_ba(config, stats);
}

}  // namespace fairnet
