// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <branchlab/analysis.hpp>
#include <branchlab/lemmas.hpp>
#include <branchlab/report.hpp>

#include "oracles.hpp"

using namespace branchlab;

namespace {

// Pinned tolerances and sizes.
constexpr double fsa_time_limit_ms = 1.0;
constexpr double lemma_time_limit_s = 1.0;
constexpr double closed_form_tolerance = 1e-12;
constexpr int closed_form_distributions = 1000;
constexpr std::uint64_t closed_form_max_n = 10;
constexpr int equivalence_graphs = 100;
constexpr int equivalence_roots = 5;
constexpr double equivalence_time_limit_s = 30.0;
constexpr int bfs_bound_graphs = 50;
constexpr std::uint64_t bfs_lower_slack = 8;
constexpr double ratio_low = 0.8, ratio_high = 1.2;
constexpr int sv_bound_graphs = 20;
constexpr double store_ratio_low = 90.0, store_ratio_high = 110.0;
constexpr int decay_graphs = 20;
constexpr std::uint64_t acceptance_seed = 20240601;

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
  bool passed = true;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, const Outcome& o) {
  std::cout << (o.passed ? "[PASS] " : "[FAIL] ") << id << ' ' << title;
  if (!o.detail.empty()) std::cout << " -- " << o.detail;
  std::cout << '\n';
  if (!o.passed) ++failures;
}

void fail(Outcome& o, const std::string& why) {
  if (o.passed) o.detail = why;  // keep the first failure
  o.passed = false;
}

std::uint64_t reached_degree_sum(const Graph& g, const BfsRunResult& r) {
  std::uint64_t sum = 0;
  for (auto v : r.queue) sum += g.degree(v);
  return sum;
}

// The equivalence graph family: n in [2, 500], m in [0, min(3n, n(n-1)/2)].
std::vector<Graph> equivalence_family() {
  std::mt19937_64 rng(acceptance_seed);
  std::uniform_int_distribution<vertex_t> pick_n(2, 500);
  std::vector<Graph> graphs;
  for (int i = 0; i < equivalence_graphs; ++i) {
    const vertex_t n = pick_n(rng);
    const std::uint64_t cap = std::uint64_t{n} * (n - 1) / 2;
    std::uniform_int_distribution<std::uint64_t> pick_m(0, std::min<std::uint64_t>(3ull * n, cap));
    graphs.push_back(generate_random(n, pick_m(rng), rng()));
  }
  return graphs;
}

std::vector<vertex_t> pick_roots(const Graph& g, std::mt19937_64& rng) {
  std::uniform_int_distribution<vertex_t> pick(0, g.num_vertices() - 1);
  std::vector<vertex_t> roots;
  for (int k = 0; k < equivalence_roots; ++k) roots.push_back(pick(rng));
  return roots;
}

Outcome ac1_fsa() {
  Outcome o;
  const auto t0 = clock_type::now();
  for (int s = 0; s < 4; ++s) {
    for (bool taken : {false, true}) {
      const auto r = step(static_cast<PredictorState>(s), taken);
      if (static_cast<int>(r.next) != oracle::counter_next(s, taken) || r.mispredicted != ((s >= 2) != taken)) {
        fail(o, "transition from state " + std::to_string(s) + (taken ? " on taken" : " on not-taken"));
      }
    }
  }
  const double ms = seconds_since(t0) * 1e3;
  if (ms >= fsa_time_limit_ms) fail(o, "took " + std::to_string(ms) + " ms");
  if (o.passed) o.detail = "8/8 transitions";
  return o;
}

Outcome ac2_lemmas() {
  Outcome o;
  const auto t0 = clock_type::now();
  const auto checks = verify_lemmas(acceptance_seed);
  const double s = seconds_since(t0);
  for (const auto& c : checks) {
    if (!c.passed) fail(o, c.name + ": " + c.detail);
  }
  if (s >= lemma_time_limit_s) fail(o, "took " + std::to_string(s) + " s");
  if (o.passed) o.detail = std::to_string(checks.size()) + " checks in " + std::to_string(s) + " s";
  return o;
}

Outcome ac3_closed_form() {
  Outcome o;
  std::mt19937_64 rng(acceptance_seed);
  std::exponential_distribution<double> e(1.0);
  double worst = 0;
  for (int t = 0; t < closed_form_distributions; ++t) {
    StateDistribution p;
    double sum = 0;
    for (auto& x : p.p) sum += (x = e(rng));
    for (auto& x : p.p) x /= sum;
    for (std::uint64_t n = 0; n <= closed_form_max_n; ++n) {
      for (bool on_continue : {false, true}) {
        double oracle_value = 0;
        for (int s = 0; s < 4; ++s) oracle_value += p.p[s] * static_cast<double>(oracle::loop_misses(s, n, on_continue));
        const auto conv = on_continue ? LoopConvention::taken_on_continue : LoopConvention::taken_on_exit;
        worst = std::max(worst, std::abs(expected_mispredict_loop(p, n, conv) - oracle_value));
      }
    }
  }
  if (worst > closed_form_tolerance) fail(o, "max deviation " + std::to_string(worst));
  const auto u = StateDistribution::uniform();
  const double expected[] = {0.5, 1.25, 1.75};
  for (std::uint64_t n = 0; n < 3; ++n) {
    if (std::abs(expected_mispredict_loop(u, n) - expected[n]) > closed_form_tolerance) {
      fail(o, "uniform prior n=" + std::to_string(n));
    }
  }
  if (o.passed) {
    std::ostringstream d;
    d << "max deviation " << worst << "; uniform 0.5, 1.25, 1.75";
    o.detail = d.str();
  }
  return o;
}

Outcome ac4_equivalence(const std::vector<Graph>& graphs) {
  Outcome o;
  const auto t0 = clock_type::now();
  std::mt19937_64 rng(acceptance_seed + 1);
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto& g = graphs[i];
    NullRecorder r1, r2;
    const auto based = sv_branch_based(g, r1);
    const auto avoiding = sv_branch_avoiding(g, r2);
    const auto expected = oracle::component_minima(g);
    if (based.labels != avoiding.labels || based.labels != expected) fail(o, "sv labels differ on graph " + std::to_string(i));
    for (auto root : pick_roots(g, rng)) {
      NullRecorder r3, r4;
      const auto a = bfs_branch_based(g, root, r3);
      const auto b = bfs_branch_avoiding(g, root, r4);
      if (a.distances != b.distances || a.distances != oracle::bfs_distances(g, root)) {
        fail(o, "bfs distances differ on graph " + std::to_string(i) + " root " + std::to_string(root));
      }
    }
  }
  const double s = seconds_since(t0);
  if (s >= equivalence_time_limit_s) fail(o, "took " + std::to_string(s) + " s");
  if (o.passed) o.detail = std::to_string(graphs.size()) + " graphs x " + std::to_string(equivalence_roots) + " roots";
  return o;
}

Outcome ac5_accounting(const std::vector<Graph>& graphs) {
  Outcome o;
  std::mt19937_64 rng(acceptance_seed + 2);
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto& g = graphs[i];
    const std::uint64_t n = g.num_vertices(), e = g.num_edges();
    TraceRecorder rec;
    const auto run = sv_branch_based(g, rec);
    const auto snap = rec.report();
    const auto it = run.iterations;
    const auto evals = [&](std::string_view label) { return snap.find(label)->evaluations; };
    if (evals(sites::sv_while) != it + 1 || evals(sites::sv_for_vertices) != it * (n + 1) ||
        evals(sites::sv_for_neighbors) != it * (e + n) || evals(sites::sv_if) != it * e) {
      fail(o, "sv site counts on graph " + std::to_string(i));
    }
    for (auto root : pick_roots(g, rng)) {
      TraceRecorder brec;
      const auto b = bfs_branch_based(g, root, brec);
      const auto bsnap = brec.report();
      const auto* s = bsnap.find(sites::bfs_if);
      if (s->evaluations != reached_degree_sum(g, b) || s->taken != b.reached() - 1) {
        fail(o, "bfs.if counts on graph " + std::to_string(i) + " root " + std::to_string(root));
      }
    }
  }
  if (o.passed) o.detail = "sv closed forms and bfs.if on " + std::to_string(graphs.size()) + " graphs";
  return o;
}

Outcome ac6_bfs_bounds() {
  Outcome o;
  double lo = 1e9, hi = 0;
  for (int i = 0; i < bfs_bound_graphs; ++i) {
    std::mt19937_64 rng(acceptance_seed + 100 + i);
    const vertex_t n = std::uniform_int_distribution<vertex_t>(50, 1000)(rng);
    const auto g = oracle::connected_random(n, 4ull * n, acceptance_seed + i);
    for (auto init : all_predictor_states) {
      TraceRecorder a(init), b(init);
      const auto based = bfs_branch_based(g, 0, a);
      const auto avoiding = bfs_branch_avoiding(g, 0, b);
      const std::uint64_t vhat = based.reached(), miss = a.totals().mispredictions;
      if (miss + bfs_lower_slack < vhat || miss > 3 * vhat + bfs_upper_slack) {
        fail(o, "based misses " + std::to_string(miss) + " for |V^|=" + std::to_string(vhat));
      }
      const double r = static_cast<double>(b.totals().mispredictions) / static_cast<double>(vhat);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      if (r < ratio_low || r > ratio_high) fail(o, "avoiding ratio " + std::to_string(r));
    }
  }
  if (o.passed) o.detail = "avoiding misses/|V^| in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
  return o;
}

Outcome ac7_sv_bounds() {
  Outcome o;
  double lo = 1e9, hi = 0;
  for (int i = 0; i < sv_bound_graphs; ++i) {
    std::mt19937_64 rng(acceptance_seed + 200 + i);
    const vertex_t n = std::uniform_int_distribution<vertex_t>(200, 2000)(rng);
    const auto g = generate_random(n, 4ull * n, rng());
    TraceRecorder a, b;
    const auto rb = sv_bounds(sv_branch_based(g, a), g);
    const auto ra = sv_bounds(sv_branch_avoiding(g, b), g);
    lo = std::min(lo, ra.ratio_to_lower);
    hi = std::max(hi, ra.ratio_to_lower);
    if (ra.ratio_to_lower < ratio_low || ra.ratio_to_lower > ratio_high) {
      fail(o, "avoiding ratio " + std::to_string(ra.ratio_to_lower) + " on graph " + std::to_string(i));
    }
    if (rb.ratio_to_lower < ra.ratio_to_lower) fail(o, "based ratio below avoiding on graph " + std::to_string(i));
  }
  if (o.passed) o.detail = "avoiding ratio in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], based >= avoiding";
  return o;
}

Outcome ac8_stores(const std::vector<Graph>& graphs) {
  Outcome o;
  std::string notes;
  std::uint64_t avoiding_bad = 0, based_bad = 0, checked = 0;
  for (const auto& g : graphs) {
    TraceRecorder a, b;
    const auto based = bfs_branch_based(g, 0, a);
    (void)bfs_branch_avoiding(g, 0, b);
    ++checked;
    avoiding_bad += b.totals().stores != reached_degree_sum(g, based);
    based_bad += a.totals().stores != based.reached();
  }
  if (avoiding_bad) fail(o, "avoiding stores != |E^| on " + std::to_string(avoiding_bad) + " graphs");
  if (based_bad) {
    fail(o, "based stores != |V^| on " + std::to_string(based_bad) + "/" + std::to_string(checked) +
                " graphs (measured |V^|-1: the root's d entry is set before the loop)");
  }

  const auto g = generate_random(1000, 50000, acceptance_seed);
  TraceRecorder a, b;
  const auto based = bfs_branch_based(g, 0, a);
  (void)bfs_branch_avoiding(g, 0, b);
  const double ratio = static_cast<double>(b.totals().stores) / static_cast<double>(a.totals().stores);
  if (ratio < store_ratio_low || ratio > store_ratio_high) fail(o, "dense store ratio " + std::to_string(ratio));
  std::ostringstream d;
  if (o.passed) o.detail = "stores match on " + std::to_string(checked) + " graphs";
  d << "; dense n=1000 m=50000 store ratio " << ratio << " (|V^|=" << based.reached() << ")";
  o.detail += d.str();
  return o;
}

Outcome ac9_decay() {
  Outcome o;
  for (int i = 0; i < decay_graphs; ++i) {
    const auto g = oracle::connected_random(500, 1500, acceptance_seed + 300 + i);
    TraceRecorder rec;
    std::vector<std::uint64_t> per_sweep;
    std::uint64_t last = 0;
    (void)sv_branch_based(g, rec, [&](std::span<const vertex_t>) {
      const auto now = rec.report().find(sites::sv_if)->mispredictions;
      per_sweep.push_back(now - last);
      last = now;
    });
    if (per_sweep.back() > per_sweep.front()) {
      fail(o, "graph " + std::to_string(i) + ": final " + std::to_string(per_sweep.back()) + " > first " +
                  std::to_string(per_sweep.front()));
    }
  }
  if (o.passed) o.detail = "sv.if final <= first on " + std::to_string(decay_graphs) + " graphs";
  return o;
}

// Blanks every CSV column whose header mentions time, and the speedup annotation.
std::string strip_csv_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::vector<bool> drop;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("# equivalent=", 0) == 0) {
      out << line.substr(0, line.find(" speedup=")) << '\n';
      continue;
    }
    if (line.empty() || line[0] == '#') {
      out << line << '\n';
      drop.clear();
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (drop.empty()) {
      for (const auto& c : cells) drop.push_back(c.find("time") != std::string::npos);
    }
    for (std::size_t k = 0; k < cells.size(); ++k) out << (k < drop.size() && drop[k] ? "" : cells[k]) << ',';
    out << '\n';
  }
  return out.str();
}

Outcome ac10_determinism() {
  Outcome o;
  for (auto algo : {Algorithm::cc, Algorithm::bfs}) {
    for (auto fmt : {OutputFormat::json, OutputFormat::csv}) {
      RunConfig c;
      c.generator = GeneratorSpec{1000, 4000, acceptance_seed};
      c.algorithm = algo;
      c.root = 0;
      c.format = fmt;
      c.timing_repetitions = 3;
      const auto g = graph_for(c);
      const auto first = execute_run(c, g);
      const auto second = execute_run(c, graph_for(c));
      std::string x, y;
      if (fmt == OutputFormat::json) {
        x = strip_timing(to_json(first)).dump(2);
        y = strip_timing(to_json(second)).dump(2);
      } else {
        x = strip_csv_timing(render(first, fmt));
        y = strip_csv_timing(render(second, fmt));
      }
      if (x != y) fail(o, std::string(algo == Algorithm::cc ? "cc" : "bfs") + (fmt == OutputFormat::json ? " json" : " csv"));
    }
  }
  if (o.passed) o.detail = "cc and bfs, json and csv";
  return o;
}

}  // namespace

int main() {
  const auto graphs = equivalence_family();
  report("AC1", "predictor automaton transitions", ac1_fsa());
  report("AC2", "loop lemma suite", ac2_lemmas());
  report("AC3", "loop closed form vs state enumeration", ac3_closed_form());
  report("AC4", "variant and oracle equivalence", ac4_equivalence(graphs));
  report("AC5", "branch accounting closed forms", ac5_accounting(graphs));
  report("AC6", "bfs misprediction bounds", ac6_bfs_bounds());
  report("AC7", "sv misprediction bounds", ac7_sv_bounds());
  report("AC8", "bfs store blow-up", ac8_stores(graphs));
  report("AC9", "sv.if misprediction decay", ac9_decay());
  report("AC10", "run determinism excluding time", ac10_determinism());
  std::cout << (10 - failures) << "/10 criteria passed\n";
  return failures == 0 ? 0 : 1;
}
