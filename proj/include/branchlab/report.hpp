#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "analysis.hpp"
#include "bfs.hpp"
#include "cc.hpp"
#include "graph.hpp"
#include "predictor.hpp"
#include "stats.hpp"
#include "tracer.hpp"

namespace branchlab {

using json = nlohmann::ordered_json;

/// Bumped whenever a CSV column or JSON key changes.
inline constexpr int report_format_version = 1;

enum class Algorithm { cc, bfs };
enum class VariantChoice { based, avoiding, both };
enum class OutputFormat { csv, json };

struct GeneratorSpec {
  vertex_t num_vertices = 0;
  std::uint64_t num_edges = 0;
  std::uint64_t seed = 0;
};

struct RunConfig {
  std::optional<std::string> graph_path;
  std::optional<GeneratorSpec> generator;
  Algorithm algorithm = Algorithm::cc;
  VariantChoice variant = VariantChoice::both;
  std::optional<vertex_t> root;
  PredictorState initial_state = PredictorState::weakly_not_taken;
  OutputFormat format = OutputFormat::json;
  std::optional<std::string> out_path;
  int timing_repetitions = 5;

  void validate() const {
    if (graph_path.has_value() == generator.has_value()) {
      throw std::invalid_argument("exactly one of a graph file or a generator spec is required");
    }
    if (algorithm == Algorithm::bfs && !root) throw std::invalid_argument("bfs requires a root vertex");
    if (timing_repetitions < 1) throw std::invalid_argument("timing repetitions must be >= 1");
  }
};

/// Parses "N,M[,SEED]"; a missing seed falls back to `default_seed`.
[[nodiscard]] inline GeneratorSpec parse_generator_spec(const std::string& text, std::optional<std::uint64_t> default_seed) {
  std::vector<std::uint64_t> parts;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    std::uint64_t v = 0;
    if (!detail::parse_count(tok, v)) throw std::invalid_argument("bad generator spec '" + text + "'");
    parts.push_back(v);
  }
  if (parts.size() == 2 && default_seed) parts.push_back(*default_seed);
  if (parts.size() != 3) throw std::invalid_argument("generator spec needs N,M,SEED (or BRANCHLAB_SEED)");
  if (parts[0] > std::numeric_limits<vertex_t>::max()) throw std::invalid_argument("N too large");
  return {static_cast<vertex_t>(parts[0]), parts[1], parts[2]};
}

/// METIS unless the extension says edge list (.el, .edges, .txt); edge lists are symmetrized.
[[nodiscard]] inline Graph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".el" || ext == ".edges" || ext == ".txt") {
    // Two passes: the vertex count is the largest id + 1.
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    std::istringstream probe(text);
    auto all = load_edge_list(probe, std::numeric_limits<vertex_t>::max());
    vertex_t n = 0;
    for (auto [u, v] : all.pairs) n = std::max({n, u + 1, v + 1});
    all.num_vertices = n;
    return to_csr(all, /*symmetrize=*/true);
  }
  return load_metis(in);
}

struct VariantBlock {
  Variant variant = Variant::branch_based;
  TraceSnapshot trace;
  std::vector<IterationStats> rows;  // wall_time from the uninstrumented timing pass
  BoundsReport bounds;
  std::uint64_t iterations = 0;
  std::uint64_t components = 0;  // cc only
  std::uint64_t reached = 0;     // bfs only
  std::uint64_t edges_traversed = 0;
  std::uint64_t checksum = 0;  // FNV-1a over labels or distances
};

struct RunReport {
  RunConfig config;
  vertex_t num_vertices = 0;
  edge_t num_edges = 0;
  std::vector<VariantBlock> blocks;
  std::optional<bool> equivalent;  // set when both variants ran
  std::optional<RatioTable> ratios;

  [[nodiscard]] bool ok() const { return !equivalent || *equivalent; }
};

namespace detail {

template <class T>
std::uint64_t fnv1a(const std::vector<T>& values) {
  std::uint64_t h = 1469598103934665603ull;
  for (T v : values) {
    for (std::size_t b = 0; b < sizeof(T); ++b) {
      h ^= (static_cast<std::uint64_t>(v) >> (8 * b)) & 0xff;
      h *= 1099511628211ull;
    }
  }
  return h;
}

inline void apply_times(std::vector<IterationStats>& rows, const std::vector<double>& times) {
  if (rows.size() != times.size()) throw std::logic_error("timing pass iteration count differs");
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].wall_time = times[i];
}

}  // namespace detail

/**
 * Runs the configured algorithm variants on g: one instrumented pass for the
 * counters and `timing_repetitions` uninstrumented passes for wall time.
 */
[[nodiscard]] inline RunReport execute_run(const RunConfig& config, const Graph& g) {
  config.validate();
  RunReport report;
  report.config = config;
  report.num_vertices = g.num_vertices();
  report.num_edges = g.num_edges();

  std::vector<Variant> variants;
  if (config.variant != VariantChoice::avoiding) variants.push_back(Variant::branch_based);
  if (config.variant != VariantChoice::based) variants.push_back(Variant::branch_avoiding);

  std::vector<CcRunResult> cc_runs;
  std::vector<BfsRunResult> bfs_runs;
  for (Variant v : variants) {
    VariantBlock block;
    block.variant = v;
    TraceRecorder rec(config.initial_state);
    if (config.algorithm == Algorithm::cc) {
      auto run = run_sv(v, g, rec);
      const auto times = median_iteration_times(
          [&] {
            NullRecorder null;
            return run_sv(v, g, null).per_iteration;
          },
          config.timing_repetitions);
      detail::apply_times(run.per_iteration, times);
      block.rows = run.per_iteration;
      block.bounds = sv_bounds(run, g);
      block.iterations = run.iterations;
      block.components = count_components(run.labels);
      block.edges_traversed = run.iterations * g.num_edges();
      block.checksum = detail::fnv1a(run.labels);
      cc_runs.push_back(std::move(run));
    } else {
      auto run = run_bfs(v, g, *config.root, rec);
      const auto times = median_iteration_times(
          [&] {
            NullRecorder null;
            return run_bfs(v, g, *config.root, null).per_level;
          },
          config.timing_repetitions);
      detail::apply_times(run.per_level, times);
      block.rows = run.per_level;
      block.bounds = bfs_bounds(run);
      block.iterations = run.per_level.size();
      block.reached = run.reached();
      block.edges_traversed = run.edges_traversed;
      block.checksum = detail::fnv1a(run.distances);
      bfs_runs.push_back(std::move(run));
    }
    block.trace = rec.report();
    report.blocks.push_back(std::move(block));
  }

  if (variants.size() == 2) {
    if (config.algorithm == Algorithm::cc) {
      report.equivalent =
          cc_runs[0].labels == cc_runs[1].labels && cc_runs[0].iterations == cc_runs[1].iterations;
      if (*report.equivalent) report.ratios = iteration_ratio_table(cc_runs[0], cc_runs[1]);
    } else {
      report.equivalent = bfs_runs[0].distances == bfs_runs[1].distances &&
                          bfs_runs[0].per_level.size() == bfs_runs[1].per_level.size();
      if (*report.equivalent) report.ratios = iteration_ratio_table(bfs_runs[0], bfs_runs[1]);
    }
  }
  return report;
}

[[nodiscard]] inline Graph graph_for(const RunConfig& config) {
  config.validate();
  if (config.generator) {
    const auto& s = *config.generator;
    return generate_random(s.num_vertices, s.num_edges, s.seed);
  }
  return load_graph_file(*config.graph_path);
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline double per_edge_time(const IterationStats& s) {
  return s.edges_traversed == 0 ? 0.0 : s.wall_time / static_cast<double>(s.edges_traversed);
}

inline const char* algorithm_name(Algorithm a) { return a == Algorithm::cc ? "cc" : "bfs"; }

}  // namespace detail

inline json to_json(const IterationStats& s) {
  return json{{"index", s.index},
              {"wall_time_s", s.wall_time},
              {"time_per_edge_s", detail::per_edge_time(s)},
              {"ops", s.ops},
              {"branches", s.branches},
              {"mispredictions", s.mispredictions},
              {"loads", s.loads},
              {"stores", s.stores},
              {"queue_loads", s.queue_loads},
              {"queue_stores", s.queue_stores},
              {"conditional_moves", s.conditional_moves},
              {"edges_traversed", s.edges_traversed}};
}

[[nodiscard]] inline IterationStats iteration_stats_from_json(const json& j) {
  IterationStats s;
  s.index = j.at("index").get<std::uint64_t>();
  s.wall_time = j.at("wall_time_s").get<double>();
  s.ops = j.at("ops").get<std::uint64_t>();
  s.branches = j.at("branches").get<std::uint64_t>();
  s.mispredictions = j.at("mispredictions").get<std::uint64_t>();
  s.loads = j.at("loads").get<std::uint64_t>();
  s.stores = j.at("stores").get<std::uint64_t>();
  s.queue_loads = j.value("queue_loads", std::uint64_t{0});
  s.queue_stores = j.value("queue_stores", std::uint64_t{0});
  s.conditional_moves = j.value("conditional_moves", std::uint64_t{0});
  s.edges_traversed = j.at("edges_traversed").get<std::uint64_t>();
  return s;
}

/// Per-site records keyed by label, plus global counters.
inline json to_json(const TraceSnapshot& snap) {
  json sites = json::object();
  for (const auto& s : snap.sites) {
    sites[s.label] = {{"evaluations", s.evaluations},
                      {"taken", s.taken},
                      {"mispredictions", s.mispredictions},
                      {"final_state", std::string(short_name(s.state))}};
  }
  const auto& t = snap.totals;
  return json{{"sites", sites},
              {"totals",
               {{"branches", t.branches},
                {"mispredictions", t.mispredictions},
                {"loads", t.loads},
                {"stores", t.stores},
                {"queue_loads", t.queue_loads},
                {"queue_stores", t.queue_stores},
                {"conditional_moves", t.conditional_moves},
                {"arithmetic", t.arithmetic},
                {"ops", t.ops()}}}};
}

inline json to_json(const BoundsReport& b) {
  return json{{"algorithm", b.algorithm},
              {"measured_mispredictions", b.measured_mispredictions},
              {"lower_bound", b.lower_bound},
              {"upper_bound", b.upper_bound ? json(*b.upper_bound) : json(nullptr)},
              {"ratio_to_lower", b.ratio_to_lower},
              {"within_bounds", b.within()}};
}

inline json to_json(const CorrelationMatrix& cm) {
  json rows = json::array();
  for (const auto& row : cm.r) {
    json r = json::array();
    for (const auto& v : row) r.push_back(detail::opt_json(v));
    rows.push_back(r);
  }
  return json{{"metrics", metric_names}, {"samples", cm.samples}, {"matrix", rows}};
}

inline json to_json(const RunReport& r) {
  json j;
  j["format_version"] = report_format_version;
  const auto& c = r.config;
  json cfg;
  if (c.graph_path) cfg["graph"] = *c.graph_path;
  if (c.generator) {
    cfg["generator"] = {{"n", c.generator->num_vertices}, {"m", c.generator->num_edges}, {"seed", c.generator->seed}};
  }
  cfg["algorithm"] = detail::algorithm_name(c.algorithm);
  cfg["variant"] = c.variant == VariantChoice::both ? "both" : (c.variant == VariantChoice::based ? "based" : "avoiding");
  if (c.root) cfg["root"] = *c.root;
  cfg["initial_state"] = std::string(short_name(c.initial_state));
  j["config"] = cfg;
  j["graph"] = {{"num_vertices", r.num_vertices}, {"num_edges", r.num_edges}};

  json runs = json::array();
  for (const auto& b : r.blocks) {
    json run;
    run["variant"] = std::string(variant_name(b.variant));
    run["iterations"] = b.iterations;
    if (c.algorithm == Algorithm::cc) {
      run["components"] = b.components;
      run["label_checksum"] = b.checksum;
    } else {
      run["reached"] = b.reached;
      run["distance_checksum"] = b.checksum;
    }
    run["edges_traversed"] = b.edges_traversed;
    const auto trace = to_json(b.trace);
    run["sites"] = trace["sites"];
    run["totals"] = trace["totals"];
    run["bounds"] = to_json(b.bounds);
    json rows = json::array();
    for (const auto& s : b.rows) rows.push_back(to_json(s));
    run["per_iteration"] = rows;
    runs.push_back(run);
  }
  j["runs"] = runs;

  if (r.equivalent) {
    json cmp;
    cmp["equivalent"] = *r.equivalent;
    if (r.ratios) {
      cmp["speedup"] = detail::opt_json(r.ratios->speedup);
      json rows = json::array();
      for (const auto& row : r.ratios->rows) {
        rows.push_back({{"index", row.index},
                        {"based_time_ratio", detail::opt_json(row.based_time_ratio)},
                        {"avoiding_time_ratio", detail::opt_json(row.avoiding_time_ratio)},
                        {"branch_ratio", detail::opt_json(row.branch_ratio)},
                        {"misprediction_ratio", detail::opt_json(row.misprediction_ratio)},
                        {"store_ratio", detail::opt_json(row.store_ratio)}});
      }
      cmp["rows"] = rows;
    }
    j["comparison"] = cmp;
  }
  return j;
}

/// Removes every host-timing field ("*time*" keys and "speedup") recursively.
[[nodiscard]] inline json strip_timing(json j) {
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key().find("time") != std::string::npos || it.key() == "speedup") continue;
      out[it.key()] = strip_timing(it.value());
    }
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (auto& e : j) out.push_back(strip_timing(e));
    return out;
  }
  return j;
}

// ---------------------------------------------------------------------------
// CSV

/// Iteration-table columns, in order. Timing columns are wall_time_s and time_per_edge_s.
inline constexpr const char* iteration_csv_header =
    "algorithm,variant,iteration,wall_time_s,time_per_edge_s,ops,branches,mispredictions,loads,stores,"
    "queue_loads,queue_stores,conditional_moves,edges_traversed";

inline void write_csv(std::ostream& out, const RunReport& r) {
  const char* algo = detail::algorithm_name(r.config.algorithm);
  out << std::setprecision(9);
  out << "# branchlab run report, csv format v" << report_format_version << '\n';
  out << "# graph: num_vertices=" << r.num_vertices << " num_edges=" << r.num_edges << '\n';
  out << "# section: iterations\n" << iteration_csv_header << '\n';
  for (const auto& b : r.blocks) {
    for (const auto& s : b.rows) {
      out << algo << ',' << variant_name(b.variant) << ',' << s.index << ',' << s.wall_time << ','
          << detail::per_edge_time(s) << ',' << s.ops << ',' << s.branches << ',' << s.mispredictions << ','
          << s.loads << ',' << s.stores << ',' << s.queue_loads << ',' << s.queue_stores << ','
          << s.conditional_moves << ',' << s.edges_traversed << '\n';
    }
  }
  out << "# section: sites\nvariant,site,evaluations,taken,mispredictions,final_state\n";
  for (const auto& b : r.blocks) {
    for (const auto& s : b.trace.sites) {
      out << variant_name(b.variant) << ',' << s.label << ',' << s.evaluations << ',' << s.taken << ','
          << s.mispredictions << ',' << short_name(s.state) << '\n';
    }
  }
  out << "# section: bounds\nvariant,algorithm,measured,lower_bound,upper_bound,ratio_to_lower,within_bounds\n";
  for (const auto& b : r.blocks) {
    out << variant_name(b.variant) << ',' << b.bounds.algorithm << ',' << b.bounds.measured_mispredictions << ','
        << b.bounds.lower_bound << ',';
    if (b.bounds.upper_bound) out << *b.bounds.upper_bound;
    out << ',' << b.bounds.ratio_to_lower << ',' << (b.bounds.within() ? "true" : "false") << '\n';
  }
  out << "# section: summary\nvariant,iterations,components,reached,edges_traversed,checksum\n";
  for (const auto& b : r.blocks) {
    out << variant_name(b.variant) << ',' << b.iterations << ',' << b.components << ',' << b.reached << ','
        << b.edges_traversed << ',' << b.checksum << '\n';
  }
  if (r.equivalent) {
    out << "# section: comparison\n";
    out << "# equivalent=" << (*r.equivalent ? "true" : "false");
    if (r.ratios && r.ratios->speedup) out << " speedup=" << *r.ratios->speedup;
    out << '\n';
    if (r.ratios) {
      out << "iteration,based_time_ratio,avoiding_time_ratio,branch_ratio,misprediction_ratio,store_ratio\n";
      const auto opt = [&](const std::optional<double>& v) {
        if (v) out << *v;
        else out << "NA";
      };
      for (const auto& row : r.ratios->rows) {
        out << row.index << ',';
        opt(row.based_time_ratio);
        out << ',';
        opt(row.avoiding_time_ratio);
        out << ',';
        opt(row.branch_ratio);
        out << ',';
        opt(row.misprediction_ratio);
        out << ',';
        opt(row.store_ratio);
        out << '\n';
      }
    }
  }
}

inline void write_correlation_csv(std::ostream& out, const CorrelationMatrix& cm) {
  out << std::setprecision(9);
  out << "# samples=" << cm.samples << '\n' << "metric";
  for (const char* name : metric_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < 6; ++i) {
    out << metric_names[i];
    for (const auto& v : cm.r[i]) {
      out << ',';
      if (v) out << *v;
      else out << "NA";
    }
    out << '\n';
  }
}

[[nodiscard]] inline std::string render(const RunReport& r, OutputFormat format) {
  std::ostringstream os;
  if (format == OutputFormat::json) os << to_json(r).dump(2) << '\n';
  else write_csv(os, r);
  return os.str();
}

/// Collects every per-iteration sample from JSON run reports, optionally for one variant.
[[nodiscard]] inline std::vector<IterationStats> samples_from_reports(const std::vector<json>& reports,
                                                                      std::optional<Variant> only = std::nullopt) {
  std::vector<IterationStats> samples;
  for (const auto& rep : reports) {
    for (const auto& run : rep.at("runs")) {
      if (only && run.at("variant").get<std::string>() != variant_name(*only)) continue;
      for (const auto& row : run.at("per_iteration")) samples.push_back(iteration_stats_from_json(row));
    }
  }
  return samples;
}

}  // namespace branchlab
