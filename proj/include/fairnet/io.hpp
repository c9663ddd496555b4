#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fairnet/contagion.hpp"
#include "fairnet/error.hpp"
#include "fairnet/experiments.hpp"
#include "fairnet/generators.hpp"
#include "fairnet/graph.hpp"
#include "fairnet/measures.hpp"

namespace fairnet::io {

inline constexpr std::string_view kEdgeListHeader = "fairnet-edgelist v1";
inline constexpr std::string_view kNodeSection = "[nodes]";
inline constexpr std::string_view kEdgeSection = "[edges]";

// Shortest round-trip decimal form, locale independent.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Edge list files
//
//   fairnet-edgelist v1
//   [nodes]
//   <id>\t<maj|min>
//   [edges]
//   <id>\t<id>
//
// Blank lines and lines starting with '#' are ignored. Ids are arbitrary
// whitespace-free tokens; they are re-indexed densely in node-section order.

inline void write_edge_list(const LabeledGraph& graph, std::ostream& out) {
  out << kEdgeListHeader << '\n' << kNodeSection << '\n';
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    out << v << '\t' << to_string(graph.group_unchecked(v)) << '\n';
  }
  out << kEdgeSection << '\n';
  for (const auto& [u, v] : graph.edges()) out << u << '\t' << v << '\n';
}

inline std::string edge_list_string(const LabeledGraph& graph) {
  std::ostringstream os;
  write_edge_list(graph, os);
  return os.str();
}

struct IngestOptions {
  bool drop_unlabeled = false;
  bool take_lcc = false;
};

struct IngestReport {
  std::size_t nodes_read = 0;
  std::size_t edges_read = 0;
  std::size_t unlabeled_dropped = 0;
  std::size_t edges_dropped = 0;  // incident to dropped unlabeled nodes
  std::size_t components = 0;
  std::vector<std::size_t> largest_component_sizes;  // up to 5, descending
  std::size_t nodes_kept = 0;
  std::size_t edges_kept = 0;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

inline bool is_unlabeled_token(std::string_view t) {
  return t == "NA" || t == "na" || t == "?" || t == "-" || t == "unknown";
}

}  // namespace detail

inline LabeledGraph parse_edge_list(std::istream& in, const IngestOptions& options = {},
                                    IngestReport* report = nullptr) {
  IngestReport rep;
  std::string raw;
  std::size_t line_no = 0;
  enum class Section { header, none, nodes, edges } section = Section::header;

  std::unordered_map<std::string, NodeId> ids;
  std::unordered_set<std::string> dropped;
  GraphBuilder builder;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') {
      throw ParseError(ParseCode::malformed_line, line_no, "CR line endings are not accepted");
    }
    if (section == Section::header) {
      if (line != kEdgeListHeader) {
        throw ParseError(ParseCode::bad_header, line_no,
                         "expected '" + std::string(kEdgeListHeader) + "'");
      }
      section = Section::none;
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    if (line == kNodeSection) {
      if (section != Section::none) {
        throw ParseError(ParseCode::malformed_line, line_no, "unexpected [nodes] section");
      }
      section = Section::nodes;
      continue;
    }
    if (line == kEdgeSection) {
      if (section == Section::edges) {
        throw ParseError(ParseCode::malformed_line, line_no, "repeated [edges] section");
      }
      section = Section::edges;
      continue;
    }
    const auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    if (section == Section::none) {
      throw ParseError(ParseCode::malformed_line, line_no, "data before any section");
    }
    if (section == Section::nodes) {
      if (fields.size() > 2) {
        throw ParseError(ParseCode::malformed_line, line_no, "node line needs 'id<TAB>group'");
      }
      ++rep.nodes_read;
      std::string id(fields[0]);
      if (ids.count(id) || dropped.count(id)) {
        throw ParseError(ParseCode::duplicate_node, line_no, "node '" + id + "' declared twice");
      }
      std::optional<Group> group;
      if (fields.size() == 2) {
        if (fields[1] == "maj") {
          group = Group::majority;
        } else if (fields[1] == "min") {
          group = Group::minority;
        } else if (!detail::is_unlabeled_token(fields[1]) && !options.drop_unlabeled) {
          throw ParseError(ParseCode::unknown_group, line_no,
                           "unknown group '" + std::string(fields[1]) + "'");
        }
      }
      if (!group) {
        if (!options.drop_unlabeled) {
          throw ParseError(ParseCode::unlabeled_node, line_no, "node '" + id + "' has no group");
        }
        ++rep.unlabeled_dropped;
        dropped.insert(std::move(id));
        continue;
      }
      ids.emplace(std::move(id), builder.add_node(*group));
      continue;
    }
    // Edge section.
    if (fields.size() != 2) {
      throw ParseError(ParseCode::malformed_line, line_no, "edge line needs 'id<TAB>id'");
    }
    ++rep.edges_read;
    const std::string a(fields[0]);
    const std::string b(fields[1]);
    if (a == b) throw ParseError(ParseCode::self_loop, line_no, "self-loop on '" + a + "'");
    auto ia = ids.find(a);
    auto ib = ids.find(b);
    if (ia == ids.end() || ib == ids.end()) {
      const std::string& missing = ia == ids.end() ? a : b;
      if ((ia == ids.end() && !dropped.count(a)) || (ib == ids.end() && !dropped.count(b))) {
        throw ParseError(ParseCode::dangling_endpoint, line_no,
                         "edge endpoint '" + missing + "' is not a declared node");
      }
      ++rep.edges_dropped;
      continue;
    }
    if (!builder.add_edge(ia->second, ib->second)) {
      throw ParseError(ParseCode::duplicate_edge, line_no, "duplicate edge " + a + " - " + b);
    }
  }
  if (section == Section::header) {
    throw ParseError(ParseCode::bad_header, line_no, "empty file");
  }

  LabeledGraph graph = std::move(builder).build();
  std::size_t count = 0;
  const auto labels = component_labels(graph, &count);
  rep.components = count;
  std::vector<std::size_t> sizes(count, 0);
  for (auto l : labels) ++sizes[l];
  std::sort(sizes.rbegin(), sizes.rend());
  sizes.resize(std::min<std::size_t>(sizes.size(), 5));
  rep.largest_component_sizes = sizes;

  if (options.take_lcc) graph = largest_connected_component(graph);
  rep.nodes_kept = graph.node_count();
  rep.edges_kept = graph.edge_count();
  if (report) *report = rep;
  if (graph.node_count() == 0) throw EmptyResult("ingest: no nodes left after filtering");
  return graph;
}

inline LabeledGraph read_edge_list_string(const std::string& text, const IngestOptions& options = {},
                                          IngestReport* report = nullptr) {
  std::istringstream in(text);
  return parse_edge_list(in, options, report);
}

inline LabeledGraph ingest(const std::filesystem::path& path, const IngestOptions& options = {},
                           IngestReport* report = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(ParseCode::io_failure, 0, "cannot open " + path.string());
  return parse_edge_list(in, options, report);
}

// ---------------------------------------------------------------------------
// Measure reports: one flat record.

inline std::vector<std::pair<std::string, std::string>> report_fields(const MeasureReport& r) {
  auto n = [](auto v) { return std::to_string(v); };
  auto f = [](double v) { return format_number(v); };
  return {
      {"node_count", n(r.node_count)},
      {"edge_count", n(r.edge_count)},
      {"n_maj", n(r.tally.n_maj)},
      {"n_min", n(r.tally.n_min)},
      {"e_maj_maj", n(r.tally.e_mm)},
      {"e_min_min", n(r.tally.e_nn)},
      {"e_maj_min", n(r.tally.e_cross)},
      {"dyadicity_maj", f(r.dyadicity_maj)},
      {"dyadicity_min", f(r.dyadicity_min)},
      {"heterophilicity", f(r.heterophilicity)},
      {"avg_shortest_path", f(r.avg_shortest_path)},
      {"diameter", n(r.diameter)},
      {"distances_on_lcc", r.distances_on_lcc ? "1" : "0"},
      {"distances_sampled", r.distances_sampled ? "1" : "0"},
      {"emd", f(r.emd)},
      {"power_inequality", f(r.power_inequality)},
      {"glass_ceiling", f(r.glass_ceiling)},
      {"avg_degree_maj", f(r.avg_degree_maj)},
      {"avg_degree_min", f(r.avg_degree_min)},
      {"max_degree_maj", n(r.max_degree_maj)},
      {"max_degree_min", n(r.max_degree_min)},
  };
}

inline void write_report_csv(const MeasureReport& r, std::ostream& out) {
  const auto fields = report_fields(r);
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i].first;
  out << '\n';
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i].second;
  out << '\n';
}

inline void write_report_json(const MeasureReport& r, std::ostream& out) {
  const auto fields = report_fields(r);
  out << "{\n";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& [k, v] = fields[i];
    const bool text = v == "nan" || v == "inf" || v == "-inf";
    out << "  \"" << k << "\": " << (text ? "null" : v) << (i + 1 < fields.size() ? ",\n" : "\n");
  }
  out << "}\n";
}

// ---------------------------------------------------------------------------
// Curves in long format: run_id,<axis>,group,value.

inline void write_trace_csv(const SpreadTrace& trace, const std::string& run_id, std::ostream& out,
                            bool header = true) {
  if (header) out << "run_id,step,group,value\n";
  for (std::size_t t = 0; t < trace.infected_maj.size(); ++t) {
    out << run_id << ',' << t << ",maj," << trace.infected_maj[t] << '\n';
    out << run_id << ',' << t << ",min," << trace.infected_min[t] << '\n';
  }
}

inline void write_equality_csv(const EqualityCurve& curve, const std::string& run_id,
                               std::ostream& out, bool header = true) {
  if (header) out << "run_id,bin,group,value\n";
  for (std::size_t b = 0; b < curve.delta.size(); ++b) {
    out << run_id << ',' << b + 1 << ",maj," << format_number(curve.maj_fraction[b]) << '\n';
    out << run_id << ',' << b + 1 << ",min," << format_number(curve.min_fraction[b]) << '\n';
    out << run_id << ',' << b + 1 << ",delta," << format_number(curve.delta[b]) << '\n';
  }
}

inline void write_efficiency_csv(std::span<const double> efficiency, const std::string& run_id,
                                 std::ostream& out, bool header = true) {
  if (header) out << "run_id,step,group,value\n";
  for (std::size_t t = 0; t < efficiency.size(); ++t) {
    out << run_id << ',' << t << ",all," << format_number(efficiency[t]) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Heatmaps: wide CSV (one row per axis value) and SVG.

inline void write_heatmap_csv(const HeatmapMatrix& hm, const std::string& axis_name,
                              const std::vector<std::vector<double>>& values, std::ostream& out) {
  out << axis_name;
  for (std::size_t c = 0; c < hm.cols; ++c) {
    if (hm.equality) {
      out << ',' << format_number(static_cast<double>(c + 1) / static_cast<double>(hm.cols));
    } else {
      out << ',' << c;
    }
  }
  out << '\n';
  for (std::size_t r = 0; r < hm.rows.size(); ++r) {
    out << hm.rows[r];
    for (std::size_t c = 0; c < hm.cols; ++c) out << ',' << format_number(values[r][c]);
    out << '\n';
  }
}

namespace detail {

struct Rgb {
  int r, g, b;
};

// Diverging: blue (-1), white (0), red (+1).
inline Rgb diverging(double v) {
  v = std::clamp(v, -1.0, 1.0);
  const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(v))));
  return v >= 0 ? Rgb{255, fade, fade} : Rgb{fade, fade, 255};
}

// Sequential: white (0) to dark blue (1).
inline Rgb sequential(double v) {
  v = std::clamp(v, 0.0, 1.0);
  auto lerp = [v](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * v)); };
  return {lerp(255, 8), lerp(255, 48), lerp(255, 107)};
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline void write_heatmap_svg(const HeatmapMatrix& hm, std::ostream& out) {
  const int label_w = 190;
  const int top = 30;
  const int cell_h = 22;
  const int plot_w = 600;
  const double cell_w = hm.cols ? static_cast<double>(plot_w) / static_cast<double>(hm.cols) : 0.0;
  const int height = top + cell_h * static_cast<int>(hm.rows.size()) + 30;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << label_w + plot_w + 10
      << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<text x=\"" << label_w << "\" y=\"18\">" << detail::xml_escape(hm.title)
      << (hm.equality ? " (dI vs t/T)" : " (I vs t)") << "</text>\n";
  for (std::size_t r = 0; r < hm.rows.size(); ++r) {
    const int y = top + cell_h * static_cast<int>(r);
    out << "<text x=\"" << label_w - 6 << "\" y=\"" << y + cell_h / 2 + 4
        << "\" text-anchor=\"end\">" << detail::xml_escape(hm.rows[r]) << "</text>\n";
    for (std::size_t c = 0; c < hm.cols; ++c) {
      const auto col = hm.equality ? detail::diverging(hm.mean[r][c]) : detail::sequential(hm.mean[r][c]);
      out << "<rect x=\"" << format_number(label_w + cell_w * static_cast<double>(c)) << "\" y=\"" << y
          << "\" width=\"" << format_number(cell_w + 0.05) << "\" height=\"" << cell_h
          << "\" fill=\"rgb(" << col.r << ',' << col.g << ',' << col.b << ")\"/>\n";
    }
  }
  const int axis_y = top + cell_h * static_cast<int>(hm.rows.size()) + 16;
  out << "<text x=\"" << label_w << "\" y=\"" << axis_y << "\">0</text>\n";
  out << "<text x=\"" << label_w + plot_w << "\" y=\"" << axis_y << "\" text-anchor=\"end\">"
      << (hm.equality ? std::string("1") : std::to_string(hm.cols ? hm.cols - 1 : 0)) << "</text>\n";
  out << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Sweep configuration files: one "key = value" per line, '#' comments, list
// values separated by commas.

using KeyValues = std::map<std::string, std::string>;

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.size() - start
                                                                              : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty() || kv.count(key)) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty or repeated key '" +
                        key + "'");
    }
    kv[key] = trim(std::string_view(line).substr(eq + 1));
  }
  return kv;
}

inline std::optional<ProcessCell> parse_cell(std::string_view label) {
  // <kind>-<symmetric|asymmetric>-<bucket>
  const auto first = label.find('-');
  const auto last = label.rfind('-');
  if (first == std::string_view::npos || first == last) return std::nullopt;
  auto kind = parse_kind(label.substr(0, first));
  auto bucket = parse_bucket(label.substr(last + 1));
  const auto rate = label.substr(first + 1, last - first - 1);
  if (!kind || !bucket || (rate != "symmetric" && rate != "asymmetric")) return std::nullopt;
  return ProcessCell{*kind, rate == "symmetric", *bucket};
}

struct LoadedSweep {
  SweepSpec spec;
  KeyValues raw;
  std::vector<std::filesystem::path> network_paths;
  IngestOptions ingest{true, true};
};

namespace detail {

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  T value{};
  const char* b = text.data();
  const char* e = b + text.size();
  auto [ptr, ec] = std::from_chars(b, e, value);
  if (ec != std::errc() || ptr != e) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

inline bool parse_flag(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false");
}

}  // namespace detail

// Builds a SweepSpec from key-values; unknown keys are rejected. Network
// paths are resolved against `base_dir` but not loaded.
inline LoadedSweep sweep_from_key_values(const KeyValues& kv,
                                         const std::filesystem::path& base_dir = {}) {
  LoadedSweep out;
  out.raw = kv;
  SweepSpec& s = out.spec;
  for (const auto& [key, value] : kv) {
    using detail::parse_value;
    if (key == "name") {
      s.name = value;
    } else if (key == "axis") {
      auto a = parse_axis(value);
      if (!a) throw ConfigError("unknown axis '" + value + "'");
      s.axis = *a;
    } else if (key == "values") {
      s.axis_values = split_list(value);
    } else if (key == "realizations") {
      s.realizations = parse_value<std::size_t>(key, value);
    } else if (key == "seed") {
      s.master_seed = parse_value<std::uint64_t>(key, value);
    } else if (key == "threads") {
      s.threads = parse_value<std::size_t>(key, value);
    } else if (key == "epsilon") {
      s.epsilon = parse_value<double>(key, value);
    } else if (key == "coverage") {
      s.coverage_fraction = parse_value<double>(key, value);
    } else if (key == "preset") {
      auto p = parse_preset(value);
      if (!p) throw ConfigError("unknown preset '" + value + "'");
      s.generator.preset = *p;
    } else if (key == "n") {
      s.generator.n = parse_value<std::size_t>(key, value);
    } else if (key == "m") {
      s.generator.m = parse_value<double>(key, value);
    } else if (key == "l") {
      s.generator.l = parse_value<std::size_t>(key, value);
    } else if (key == "h") {
      s.generator.h = parse_value<double>(key, value);
    } else if (key == "alpha") {
      s.generator.alpha = parse_value<double>(key, value);
    } else if (key == "l_d") {
      s.generator.l_d = parse_value<std::size_t>(key, value);
    } else if (key == "p_d") {
      s.generator.p_d = parse_value<double>(key, value);
    } else if (key == "a") {
      s.process.activation_threshold = parse_value<double>(key, value);
    } else if (key == "r_within") {
      s.process.r_within = parse_value<double>(key, value);
    } else if (key == "r_between") {
      s.process.r_between_asymmetric = parse_value<double>(key, value);
    } else if (key == "seeds") {
      s.process.seed_count = parse_value<std::size_t>(key, value);
    } else if (key == "bins") {
      s.process.bins = parse_value<std::size_t>(key, value);
    } else if (key == "max_steps") {
      s.process.max_steps = parse_value<std::size_t>(key, value);
    } else if (key == "cells") {
      s.cells.clear();
      for (const auto& label : split_list(value)) {
        auto cell = parse_cell(label);
        if (!cell) throw ConfigError("bad process cell '" + label + "'");
        s.cells.push_back(*cell);
      }
    } else if (key == "drop_unlabeled") {
      out.ingest.drop_unlabeled = detail::parse_flag(key, value);
    } else if (key == "take_lcc") {
      out.ingest.take_lcc = detail::parse_flag(key, value);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (s.axis_values.empty()) throw ConfigError("config: 'values' is required");
  if (s.axis == SweepAxis::network) {
    for (const auto& v : s.axis_values) {
      std::filesystem::path p(v);
      out.network_paths.push_back(p.is_relative() ? base_dir / p : p);
    }
  }
  return out;
}

inline LoadedSweep load_sweep(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep config " + path.string());
  return sweep_from_key_values(parse_key_values(in), path.parent_path());
}

// Network axis: read each listed graph into spec.networks.
inline std::vector<IngestReport> load_networks(LoadedSweep& loaded) {
  std::vector<IngestReport> reports;
  loaded.spec.networks.clear();
  for (const auto& p : loaded.network_paths) {
    IngestReport rep;
    loaded.spec.networks.push_back(ingest(p, loaded.ingest, &rep));
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace fairnet::io
