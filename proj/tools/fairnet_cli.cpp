// fairnet: generate two-group networks, measure them, and run SI spreading
// experiments on them.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairnet/fairnet.hpp"
#include "fairnet/manifest.hpp"

namespace fs = std::filesystem;
using namespace fairnet;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kInternal = 3;

fs::path default_out_dir() {
  if (const char* env = std::getenv("FAIRNET_OUT_DIR"); env && *env) return env;
  return ".";
}

struct GeneratorFlags {
  std::string preset = "homophily-ba";
  GeneratorConfig config;

  void attach(CLI::App* app) {
    app->add_option("--preset", preset, "random | ba | random-homophily | homophily-ba | "
                                        "diversified-homophily | diversified-homophily-ba")
        ->capture_default_str();
    app->add_option("--n", config.n, "node count")->capture_default_str();
    app->add_option("--m", config.m, "minority fraction")->capture_default_str();
    app->add_option("--l", config.l, "links per arriving node")->capture_default_str();
    app->add_option("--h", config.h, "homophily")->capture_default_str();
    app->add_option("--alpha", config.alpha, "preferential attachment exponent")->capture_default_str();
    app->add_option("--l-d", config.l_d, "diversified links per node (diversified presets)");
    app->add_option("--p-d", config.p_d, "diversification probability")->capture_default_str();
    app->add_option("--rng-seed", config.rng_seed, "generator seed")->capture_default_str();
  }

  // Applies the preset; pinned parameters that the user set are reported.
  GeneratorConfig resolve(const CLI::App* app) const {
    auto p = parse_preset(preset);
    if (!p) throw ConfigError("unknown preset '" + preset + "'");
    GeneratorConfig c = config;
    if (is_diversified(*p) && app->count("--l-d") == 0) c.l_d = 1;
    const GeneratorConfig pinned = apply_preset(c, *p);
    auto warn = [&](const char* flag, bool differs) {
      if (differs && app->count(flag) > 0) {
        std::cerr << "warning: preset " << preset << " pins " << flag << "; value ignored\n";
      }
    };
    warn("--h", pinned.h != c.h);
    warn("--alpha", pinned.alpha != c.alpha);
    warn("--l-d", pinned.l_d != c.l_d);
    validate(pinned);
    return pinned;
  }
};

struct ContagionFlags {
  std::string kind = "simple";
  std::string bucket = "low";
  ContagionConfig config;
  std::optional<double> r_between;

  void attach(CLI::App* app) {
    app->add_option("--kind", kind, "simple | complex")->capture_default_str();
    app->add_option("--a", config.activation_threshold, "activation threshold (complex)")
        ->capture_default_str();
    app->add_option("--r-within", config.r_within, "within-group transmission rate")
        ->capture_default_str();
    app->add_option("--r-between", r_between, "between-group rate (default: = r-within)");
    app->add_option("--seeds", config.seed_count, "seed count")->capture_default_str();
    app->add_option("--bucket", bucket, "minority seeding bucket: low | mid | high")
        ->capture_default_str();
    app->add_option("--bins", config.bins, "normalized-time bins")->capture_default_str();
    app->add_option("--max-steps", config.max_steps, "step cap")->capture_default_str();
    app->add_option("--sim-seed", config.rng_seed, "process seed")->capture_default_str();
  }

  ContagionConfig resolve() const {
    ContagionConfig c = config;
    auto k = parse_kind(kind);
    if (!k) throw ConfigError("unknown contagion kind '" + kind + "'");
    auto b = parse_bucket(bucket);
    if (!b) throw ConfigError("unknown seeding bucket '" + bucket + "'");
    c.kind = *k;
    c.bucket = *b;
    c.r_between = r_between.value_or(c.r_within);
    validate(c);
    return c;
  }
};

void print_ingest_report(const io::IngestReport& r, std::ostream& out) {
  out << "nodes_read\t" << r.nodes_read << '\n'
      << "edges_read\t" << r.edges_read << '\n'
      << "unlabeled_dropped\t" << r.unlabeled_dropped << '\n'
      << "edges_dropped\t" << r.edges_dropped << '\n'
      << "components\t" << r.components << '\n'
      << "largest_components\t";
  for (std::size_t i = 0; i < r.largest_component_sizes.size(); ++i) {
    out << (i ? "," : "") << r.largest_component_sizes[i];
  }
  out << '\n' << "nodes_kept\t" << r.nodes_kept << '\n' << "edges_kept\t" << r.edges_kept << '\n';
}

void write_text(const fs::path& path, const std::string& bytes) {
  if (path == "-") {
    std::cout << bytes;
    return;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Error::Category::internal, "cannot write " + path.string());
  out << bytes;
}

std::string runs_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "row,cell,realization,graph_seed,process_seed,T,termination,seed_minority,"
        "equality_time,coverage_step\n";
  for (const auto& r : result.runs) {
    os << result.rows[r.row] << ',' << result.cells[r.cell].label() << ',' << r.realization << ','
       << r.graph_seed << ',' << r.process_seed << ',' << r.T << ',' << to_string(r.termination)
       << ',' << r.seed_minority << ','
       << (r.equality_time ? io::format_number(*r.equality_time) : std::string("none")) << ','
       << (r.coverage_step ? std::to_string(*r.coverage_step) : std::string("none")) << '\n';
  }
  return os.str();
}

nlohmann::json sweep_summary(const SweepResult& result, double coverage_fraction) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t row = 0; row < result.rows.size(); ++row) {
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
      const auto runs = result.runs_for(row, c);
      if (runs.empty()) continue;
      std::vector<double> tte;
      std::vector<std::vector<double>> eff;
      std::size_t unsettled = 0;
      for (const auto* r : runs) {
        if (r->equality_time) {
          tte.push_back(*r->equality_time);
        } else {
          ++unsettled;
        }
        eff.push_back(r->efficiency);
      }
      const MeanSe ms = mean_and_se(tte);
      const CoverageSummary cov = time_to_coverage(eff, coverage_fraction);
      out.push_back({{"row", result.rows[row]},
                     {"cell", result.cells[c].label()},
                     {"runs", runs.size()},
                     {"time_to_equality_mean", ms.mean},
                     {"time_to_equality_se", ms.se},
                     {"never_equal", unsettled},
                     {"time_to_coverage_mean",
                      cov.mean_steps ? nlohmann::json(*cov.mean_steps) : nlohmann::json(nullptr)},
                     {"time_to_coverage_se", cov.standard_error},
                     {"coverage_missed", cov.missed}});
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-group network growth, structure measures and SI information-access experiments"};
  app.require_subcommand(1);
  // --h is the homophily flag, so help is long-form only.
  app.set_help_flag("--help", "print this help and exit");

  // generate
  auto* gen = app.add_subcommand("generate", "grow a network and write it as an edge list");
  GeneratorFlags gen_flags;
  gen_flags.attach(gen);
  std::string gen_out = "-";
  gen->add_option("--out,-o", gen_out, "output path, '-' for stdout")->capture_default_str();

  // measure
  auto* mea = app.add_subcommand("measure", "compute structural and degree-equality measures");
  std::string mea_graph;
  std::string mea_format = "csv";
  std::string mea_out = "-";
  std::optional<std::size_t> mea_sample;
  bool mea_no_dist = false;
  mea->add_option("--graph,-g", mea_graph, "edge list file")->required();
  mea->add_option("--format", mea_format, "csv | json")->capture_default_str();
  mea->add_option("--out,-o", mea_out, "output path, '-' for stdout")->capture_default_str();
  mea->add_option("--sample-sources", mea_sample, "estimate distances from this many BFS sources");
  mea->add_flag("--no-distances", mea_no_dist, "skip shortest-path statistics");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one spreading process and write its curves");
  std::string sim_graph;
  std::string sim_out_dir;
  GeneratorFlags sim_gen;
  ContagionFlags sim_flags;
  sim->add_option("--graph,-g", sim_graph, "edge list file (default: generate one)");
  sim_gen.attach(sim);
  sim_flags.attach(sim);
  sim->add_option("--out-dir", sim_out_dir, "output directory (default $FAIRNET_OUT_DIR or .)");

  // sweep
  auto* swp = app.add_subcommand("sweep", "run a declarative experiment sweep");
  std::string swp_config;
  std::string swp_out_dir;
  std::optional<std::size_t> swp_threads;
  std::optional<std::size_t> swp_realizations;
  bool swp_no_svg = false;
  swp->add_option("--config,-c", swp_config, "sweep config file")->required();
  swp->add_option("--out-dir", swp_out_dir, "output directory (default $FAIRNET_OUT_DIR or .)");
  swp->add_option("--threads", swp_threads, "worker threads (default: all cores)");
  swp->add_option("--realizations", swp_realizations, "override realizations per row");
  swp->add_flag("--no-svg", swp_no_svg, "skip SVG heatmaps");

  // ingest-check
  auto* ing = app.add_subcommand("ingest-check", "validate an external graph file");
  std::string ing_path;
  bool ing_drop = false;
  bool ing_lcc = false;
  std::string ing_out;
  ing->add_option("path", ing_path, "edge list file")->required();
  ing->add_flag("--drop-unlabeled", ing_drop, "remove nodes without a group label");
  ing->add_flag("--take-lcc", ing_lcc, "keep only the largest connected component");
  ing->add_option("--out,-o", ing_out, "also write the cleaned graph here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*gen) {
      const GeneratorConfig config = gen_flags.resolve(gen);
      GenerationStats stats;
      const LabeledGraph graph = generate(config, &stats);
      write_text(gen_out, io::edge_list_string(graph));
      std::cerr << "generated " << graph.node_count() << " nodes, " << graph.edge_count()
                << " edges; homophily links skipped " << stats.homophily_links_skipped
                << ", diversified links skipped " << stats.diversified_links_skipped << '\n';
    } else if (*mea) {
      const LabeledGraph graph = io::ingest(mea_graph);
      MeasureOptions options;
      options.distances = !mea_no_dist;
      options.sample_sources = mea_sample;
      const MeasureReport report = measure(graph, options);
      std::ostringstream os;
      if (mea_format == "csv") {
        io::write_report_csv(report, os);
      } else if (mea_format == "json") {
        io::write_report_json(report, os);
      } else {
        throw ConfigError("unknown format '" + mea_format + "'");
      }
      write_text(mea_out, os.str());
    } else if (*sim) {
      const ContagionConfig cc = sim_flags.resolve();
      LabeledGraph graph;
      nlohmann::json graph_info;
      if (!sim_graph.empty()) {
        graph = io::ingest(sim_graph);
        graph_info = {{"file", sim_graph}};
      } else {
        const GeneratorConfig gc = sim_gen.resolve(sim);
        graph = generate(gc);
        graph_info = io::to_json(gc);
      }
      const auto start = std::chrono::steady_clock::now();
      const SpreadTrace trace = simulate(graph, cc);
      const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

      io::OutputSet out(sim_out_dir.empty() ? default_out_dir() : fs::path(sim_out_dir));
      out.write_with("trace.csv", [&](std::ostream& os) { io::write_trace_csv(trace, "0", os); });
      if (trace.T > 0) {
        const EqualityCurve curve = equality_curve(trace, graph, cc.bins);
        out.write_with("equality.csv", [&](std::ostream& os) { io::write_equality_csv(curve, "0", os); });
      } else {
        std::cerr << "warning: T = 0, equality curve undefined\n";
      }
      out.write_with("efficiency.csv", [&](std::ostream& os) {
        io::write_efficiency_csv(efficiency_curve(trace, graph), "0", os);
      });
      nlohmann::json manifest = {{"tool_version", io::kToolVersion},
                                 {"command", "simulate"},
                                 {"graph", graph_info},
                                 {"contagion", io::to_json(cc)},
                                 {"T", trace.T},
                                 {"termination", to_string(trace.terminal_reason)},
                                 {"files", out.file_table()},
                                 {"seconds", elapsed.count()}};
      write_text(out.dir() / "manifest.json", manifest.dump(2) + "\n");
      out.commit();
      std::cerr << "T = " << trace.T << " (" << to_string(trace.terminal_reason) << ")\n";
    } else if (*swp) {
      io::LoadedSweep loaded = io::load_sweep(swp_config);
      if (swp_threads) loaded.spec.threads = *swp_threads;
      if (swp_realizations) loaded.spec.realizations = *swp_realizations;
      nlohmann::json ingest_reports = nlohmann::json::array();
      if (loaded.spec.axis == SweepAxis::network) {
        for (const auto& r : io::load_networks(loaded)) {
          ingest_reports.push_back({{"nodes_kept", r.nodes_kept},
                                    {"edges_kept", r.edges_kept},
                                    {"unlabeled_dropped", r.unlabeled_dropped},
                                    {"components", r.components}});
        }
      }
      const auto start = std::chrono::steady_clock::now();
      const SweepResult result = run_sweep(loaded.spec);
      const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

      io::OutputSet out(swp_out_dir.empty() ? default_out_dir() : fs::path(swp_out_dir));
      const std::string axis = to_string(loaded.spec.axis);
      for (std::size_t c = 0; c < result.cells.size(); ++c) {
        const std::string label = result.cells[c].label();
        for (const HeatmapMatrix* hm : {&result.equality[c], &result.efficiency[c]}) {
          const std::string stem = std::string(hm->equality ? "equality_" : "efficiency_") + label;
          out.write_with(stem + ".csv",
                         [&](std::ostream& os) { io::write_heatmap_csv(*hm, axis, hm->mean, os); });
          out.write_with(stem + ".se.csv", [&](std::ostream& os) {
            io::write_heatmap_csv(*hm, axis, hm->standard_error, os);
          });
          if (!swp_no_svg) {
            out.write_with(stem + ".svg", [&](std::ostream& os) { io::write_heatmap_svg(*hm, os); });
          }
        }
      }
      out.write("runs.csv", runs_csv(result));
      nlohmann::json row_errors = nlohmann::json::object();
      for (std::size_t r = 0; r < result.rows.size(); ++r) {
        if (result.row_errors[r]) row_errors[result.rows[r]] = *result.row_errors[r];
      }
      nlohmann::json manifest = {{"tool_version", io::kToolVersion},
                                 {"command", "sweep"},
                                 {"config_file", swp_config},
                                 {"config", io::to_json(loaded.spec)},
                                 {"master_seed", loaded.spec.master_seed},
                                 {"seed_scheme", "graph=derive(master,{row,r,0}); "
                                                 "process=derive(master,{row,r,1,cell})"},
                                 {"row_errors", row_errors},
                                 {"ingest", ingest_reports},
                                 {"summary", sweep_summary(result, loaded.spec.coverage_fraction)},
                                 {"files", out.file_table()},
                                 {"seconds", elapsed.count()}};
      write_text(out.dir() / "manifest.json", manifest.dump(2) + "\n");
      out.commit();
      for (std::size_t r = 0; r < result.rows.size(); ++r) {
        if (result.row_errors[r]) {
          std::cerr << "row " << result.rows[r] << " failed: " << *result.row_errors[r] << '\n';
        }
      }
    } else if (*ing) {
      io::IngestReport report;
      const LabeledGraph graph = io::ingest(ing_path, {ing_drop, ing_lcc}, &report);
      print_ingest_report(report, std::cout);
      if (!ing_out.empty()) write_text(ing_out, io::edge_list_string(graph));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.category()) {
      case Error::Category::usage: return kUsage;
      case Error::Category::data: return kData;
      case Error::Category::internal: return kInternal;
    }
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return 0;
}
