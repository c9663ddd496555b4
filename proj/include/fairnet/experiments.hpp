#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "fairnet/contagion.hpp"
#include "fairnet/error.hpp"
#include "fairnet/generators.hpp"
#include "fairnet/graph.hpp"
#include "fairnet/rng.hpp"

namespace fairnet {

// Smallest normalized time b/B after which every bin satisfies |dI| <= eps.
// A curve that is settled from the first bin reports 0; one that still
// exceeds eps in its last bin reports nullopt.
inline std::optional<double> time_to_equality(std::span<const double> delta, double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigError("time_to_equality: epsilon must be > 0");
  std::optional<std::size_t> last_excursion;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (std::abs(delta[i]) > epsilon) last_excursion = i;
  }
  if (!last_excursion) return 0.0;
  if (*last_excursion + 1 == delta.size()) return std::nullopt;
  return static_cast<double>(*last_excursion + 2) / static_cast<double>(delta.size());
}

// First raw step with I(t) >= fraction, if any.
inline std::optional<std::size_t> first_coverage_step(std::span<const double> efficiency,
                                                      double fraction) {
  for (std::size_t t = 0; t < efficiency.size(); ++t) {
    if (efficiency[t] >= fraction) return t;
  }
  return std::nullopt;
}

struct CoverageSummary {
  std::optional<double> mean_steps;  // nullopt when no run got there
  double standard_error = 0.0;
  std::size_t reached = 0;
  std::size_t missed = 0;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

inline MeanSe mean_and_se(std::span<const double> xs) {
  MeanSe out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    out.se = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return out;
}

// Mean raw steps to reach I(t) >= fraction over a set of runs, given each
// run's efficiency curve. Runs that never reach it are excluded and counted.
inline CoverageSummary time_to_coverage(std::span<const std::vector<double>> efficiency_curves,
                                        double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("time_to_coverage: fraction must lie in (0, 1]");
  }
  std::vector<double> steps;
  CoverageSummary out;
  for (const auto& curve : efficiency_curves) {
    if (auto t = first_coverage_step(curve, fraction)) {
      steps.push_back(static_cast<double>(*t));
    } else {
      ++out.missed;
    }
  }
  out.reached = steps.size();
  if (!steps.empty()) {
    const MeanSe ms = mean_and_se(steps);
    out.mean_steps = ms.mean;
    out.standard_error = ms.se;
  }
  return out;
}

enum class SweepAxis { preset, h, alpha, m, p_d, network };

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::preset: return "preset";
    case SweepAxis::h: return "h";
    case SweepAxis::alpha: return "alpha";
    case SweepAxis::m: return "m";
    case SweepAxis::p_d: return "p_d";
    case SweepAxis::network: return "network";
  }
  return "?";
}

inline std::optional<SweepAxis> parse_axis(std::string_view s) {
  for (SweepAxis a : {SweepAxis::preset, SweepAxis::h, SweepAxis::alpha, SweepAxis::m,
                      SweepAxis::p_d, SweepAxis::network}) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

struct ProcessCell {
  ContagionKind kind = ContagionKind::simple;
  bool symmetric = true;
  SeedingBucket bucket = SeedingBucket::low;

  std::string label() const {
    return std::string(to_string(kind)) + (symmetric ? "-symmetric-" : "-asymmetric-") +
           to_string(bucket);
  }
  friend bool operator==(const ProcessCell&, const ProcessCell&) = default;
};

// {simple, complex} x {symmetric, asymmetric} x {low, high}.
inline std::vector<ProcessCell> default_process_grid() {
  std::vector<ProcessCell> cells;
  for (auto kind : {ContagionKind::simple, ContagionKind::complex}) {
    for (bool sym : {true, false}) {
      for (auto bucket : {SeedingBucket::low, SeedingBucket::high}) {
        cells.push_back({kind, sym, bucket});
      }
    }
  }
  return cells;
}

// Process constants shared by every cell of a sweep.
struct ProcessSettings {
  double activation_threshold = 0.1;
  double r_within = 0.7;
  double r_between_asymmetric = 0.3;
  std::size_t seed_count = 10;
  std::size_t bins = 100;
  std::size_t max_steps = 100000;
};

inline ContagionConfig cell_config(const ProcessSettings& p, const ProcessCell& cell,
                                   std::size_t seed_count, std::uint64_t rng_seed) {
  ContagionConfig c;
  c.kind = cell.kind;
  c.activation_threshold = p.activation_threshold;
  c.r_within = p.r_within;
  c.r_between = cell.symmetric ? p.r_within : p.r_between_asymmetric;
  c.seed_count = seed_count;
  c.bucket = cell.bucket;
  c.max_steps = p.max_steps;
  c.bins = p.bins;
  c.rng_seed = rng_seed;
  return c;
}

// Seed count for an ingested network: 0.2% of its nodes, at least 5.
inline std::size_t real_network_seed_count(std::size_t node_count) {
  const auto scaled = static_cast<std::size_t>(std::llround(0.002 * static_cast<double>(node_count)));
  return std::max<std::size_t>(5, scaled);
}

struct SweepSpec {
  std::string name = "sweep";
  SweepAxis axis = SweepAxis::preset;
  std::vector<std::string> axis_values;
  GeneratorConfig generator;  // template; rng_seed is ignored
  ProcessSettings process;
  std::vector<ProcessCell> cells = default_process_grid();
  std::size_t realizations = 20;
  std::uint64_t master_seed = 0;
  double epsilon = 0.05;
  double coverage_fraction = 0.99;
  std::size_t threads = 0;  // 0: hardware concurrency
  // Network axis only: one graph per axis value, loaded by the caller.
  std::vector<LabeledGraph> networks;
};

// Generator config for one row, with the axis value substituted into the
// template. Throws ConfigError on an unusable value.
inline GeneratorConfig row_generator_config(const SweepSpec& spec, std::size_t row) {
  const std::string& token = spec.axis_values.at(row);
  GeneratorConfig c = apply_preset(spec.generator, spec.generator.preset);
  auto number = [&]() {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || token.empty()) {
      throw ConfigError("axis value '" + token + "' is not a number");
    }
    return v;
  };
  switch (spec.axis) {
    case SweepAxis::preset: {
      auto p = parse_preset(token);
      if (!p) throw ConfigError("unknown preset '" + token + "'");
      c = apply_preset(spec.generator, *p);
      break;
    }
    case SweepAxis::h: c.h = number(); break;
    case SweepAxis::alpha: c.alpha = number(); break;
    case SweepAxis::m: c.m = number(); break;
    case SweepAxis::p_d: c.p_d = number(); break;
    case SweepAxis::network: break;
  }
  validate(c);
  return c;
}

struct RunRecord {
  std::size_t row = 0;
  std::size_t cell = 0;
  std::size_t realization = 0;
  std::uint64_t graph_seed = 0;
  std::uint64_t process_seed = 0;
  std::size_t T = 0;
  Termination termination = Termination::stalled;
  std::size_t seed_minority = 0;
  std::optional<double> equality_time;    // time_to_equality at the sweep epsilon
  std::optional<std::size_t> coverage_step;
  std::vector<double> delta;        // empty when T = 0
  std::vector<double> efficiency;   // I(t), t = 0..T
};

struct HeatmapMatrix {
  std::string title;
  bool equality = true;  // false: efficiency map over raw time
  std::vector<std::string> rows;
  std::size_t cols = 0;
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> standard_error;
  std::vector<std::vector<std::size_t>> count;
};

struct SweepResult {
  std::vector<std::string> rows;
  std::vector<ProcessCell> cells;
  std::vector<std::optional<std::string>> row_errors;  // diagnostic per failed row
  std::vector<RunRecord> runs;  // ordered by (row, realization, cell)
  std::vector<HeatmapMatrix> equality;    // one per cell
  std::vector<HeatmapMatrix> efficiency;  // one per cell
  std::size_t max_T = 0;

  std::vector<const RunRecord*> runs_for(std::size_t row, std::size_t cell) const {
    std::vector<const RunRecord*> out;
    for (const auto& r : runs) {
      if (r.row == row && r.cell == cell) out.push_back(&r);
    }
    return out;
  }
};

// Calls fn(i) for i in [0, count) on up to `threads` workers. Exceptions are
// captured per index and the first one (lowest index) is rethrown.
inline void parallel_for(std::size_t count, std::size_t threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(count, 1));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace detail {

inline HeatmapMatrix aggregate(const std::string& title, bool equality,
                               const std::vector<std::string>& rows, std::size_t cols,
                               const std::vector<std::vector<const std::vector<double>*>>& series) {
  HeatmapMatrix hm;
  hm.title = title;
  hm.equality = equality;
  hm.rows = rows;
  hm.cols = cols;
  hm.mean.assign(rows.size(), std::vector<double>(cols, 0.0));
  hm.standard_error.assign(rows.size(), std::vector<double>(cols, 0.0));
  hm.count.assign(rows.size(), std::vector<std::size_t>(cols, 0));
  std::vector<double> column;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      column.clear();
      for (const auto* s : series[r]) {
        if (s->empty()) continue;
        // Efficiency curves shorter than the extent hold their final value.
        column.push_back(c < s->size() ? (*s)[c] : s->back());
      }
      const MeanSe ms = mean_and_se(column);
      hm.mean[r][c] = ms.mean;
      hm.standard_error[r][c] = ms.se;
      hm.count[r][c] = ms.n;
    }
  }
  return hm;
}

}  // namespace detail

// Runs every (axis value, realization) graph once and every process cell on
// it once. Graph and process randomness come from independent streams of the
// master seed: graph (row, r, 0) and process (row, r, 1, cell). A row whose
// configuration is invalid is skipped with a diagnostic.
inline SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.axis_values.empty()) throw ConfigError("sweep: axis has no values");
  if (spec.realizations < 1) throw ConfigError("sweep: realizations must be >= 1");
  if (spec.cells.empty()) throw ConfigError("sweep: process grid is empty");
  if (spec.axis == SweepAxis::network && spec.networks.size() != spec.axis_values.size()) {
    throw ConfigError("sweep: network axis needs one loaded graph per value");
  }

  SweepResult result;
  result.rows = spec.axis_values;
  result.cells = spec.cells;
  result.row_errors.resize(spec.axis_values.size());

  std::vector<std::optional<GeneratorConfig>> row_configs(spec.axis_values.size());
  for (std::size_t row = 0; row < spec.axis_values.size(); ++row) {
    if (spec.axis == SweepAxis::network) continue;
    try {
      row_configs[row] = row_generator_config(spec, row);
    } catch (const Error& e) {
      result.row_errors[row] = e.what();
    }
  }

  const std::size_t rows = spec.axis_values.size();
  const std::size_t cells = spec.cells.size();
  const std::size_t R = spec.realizations;
  std::vector<RunRecord> runs(rows * R * cells);
  std::vector<std::optional<std::string>> job_errors(rows * R);

  parallel_for(rows * R, spec.threads, [&](std::size_t job) {
    const std::size_t row = job / R;
    const std::size_t r = job % R;
    if (result.row_errors[row]) return;
    const std::uint64_t graph_seed = derive_seed(spec.master_seed, {row, r, 0});
    LabeledGraph generated;
    const LabeledGraph* graph = nullptr;
    std::size_t seeds = spec.process.seed_count;
    if (spec.axis == SweepAxis::network) {
      graph = &spec.networks[row];
      seeds = real_network_seed_count(graph->node_count());
    } else {
      GeneratorConfig gc = *row_configs[row];
      gc.rng_seed = graph_seed;
      generated = generate(gc);
      graph = &generated;
    }
    for (std::size_t c = 0; c < cells; ++c) {
      RunRecord& rec = runs[(row * R + r) * cells + c];
      rec.row = row;
      rec.cell = c;
      rec.realization = r;
      rec.graph_seed = graph_seed;
      rec.process_seed = derive_seed(spec.master_seed, {row, r, 1, c});
      try {
        const ContagionConfig cc = cell_config(spec.process, spec.cells[c], seeds, rec.process_seed);
        const SpreadTrace trace = simulate(*graph, cc);
        rec.T = trace.T;
        rec.termination = trace.terminal_reason;
        rec.seed_minority = trace.seed_minority;
        rec.efficiency = efficiency_curve(trace, *graph);
        rec.coverage_step = first_coverage_step(rec.efficiency, spec.coverage_fraction);
        if (trace.T > 0) {
          rec.delta = equality_curve(trace, *graph, spec.process.bins).delta;
          rec.equality_time = time_to_equality(rec.delta, spec.epsilon);
        }
      } catch (const Error& e) {
        job_errors[job] = e.what();
        return;
      }
    }
  });

  for (std::size_t job = 0; job < job_errors.size(); ++job) {
    const std::size_t row = job / R;
    if (job_errors[job] && !result.row_errors[row]) result.row_errors[row] = job_errors[job];
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    auto& rec = runs[i];
    if (!result.row_errors[i / (R * cells)]) {
      result.max_T = std::max(result.max_T, rec.T);
      result.runs.push_back(std::move(rec));
    }
  }

  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<std::vector<const std::vector<double>*>> eq(rows), eff(rows);
    for (const auto& rec : result.runs) {
      if (rec.cell != c) continue;
      eq[rec.row].push_back(&rec.delta);
      eff[rec.row].push_back(&rec.efficiency);
    }
    const std::string label = spec.cells[c].label();
    result.equality.push_back(
        detail::aggregate(label, true, result.rows, spec.process.bins, eq));
    result.efficiency.push_back(
        detail::aggregate(label, false, result.rows, result.max_T + 1, eff));
  }
  return result;
}

}  // namespace fairnet
