#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfs.hpp"
#include "cc.hpp"
#include "graph.hpp"
#include "stats.hpp"
#include "tracer.hpp"

namespace branchlab {

struct BoundsReport {
  std::string algorithm;
  std::uint64_t measured_mispredictions = 0;
  std::uint64_t lower_bound = 0;
  std::optional<std::uint64_t> upper_bound;
  double ratio_to_lower = 0.0;

  [[nodiscard]] bool within() const noexcept {
    return measured_mispredictions >= lower_bound && (!upper_bound || measured_mispredictions <= *upper_bound);
  }
};

/// Slack for the O(1) terms of the BFS upper bound: while-loop (3) + first for-loop execution (3) + if (2).
inline constexpr std::uint64_t bfs_upper_slack = 8;
/// Two outer loop sites of label propagation, at most 3 misses each.
inline constexpr std::uint64_t sv_outer_loop_slack = 6;

namespace detail {
inline double ratio_or_zero(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace detail

/**
 * Label-propagation misprediction floor: the neighbor loop is a repeated loop
 * run |V| times per sweep, so about one miss per vertex per sweep, plus the
 * outer-loop constants. The comparison branch has no analytic bound, so no
 * upper bound is reported.
 */
[[nodiscard]] inline BoundsReport sv_bounds(const CcRunResult& run, const Graph& g) {
  BoundsReport r;
  r.algorithm = std::string("sv-") + std::string(variant_name(run.variant));
  r.measured_mispredictions = total_of(run.per_iteration).mispredictions;
  r.lower_bound = run.iterations * g.num_vertices() + sv_outer_loop_slack;
  r.ratio_to_lower = detail::ratio_or_zero(r.measured_mispredictions, r.lower_bound);
  return r;
}

/// BFS: about |V̂| misses from the adjacency loop; at most 3|V̂| + O(1) overall.
[[nodiscard]] inline BoundsReport bfs_bounds(const BfsRunResult& run) {
  BoundsReport r;
  r.algorithm = std::string("bfs-") + std::string(variant_name(run.variant));
  r.measured_mispredictions = total_of(run.per_level).mispredictions;
  r.lower_bound = run.reached();
  r.upper_bound = 3 * run.reached() + bfs_upper_slack;
  r.ratio_to_lower = detail::ratio_or_zero(r.measured_mispredictions, r.lower_bound);
  return r;
}

/// Column order of the correlation analysis: time, instructions, branches, mispredictions, loads, stores.
inline constexpr std::array<const char*, 6> metric_names{"T", "I", "B", "M", "L", "S"};

struct CorrelationMatrix {
  // std::nullopt where either column has zero variance.
  std::array<std::array<std::optional<double>, 6>, 6> r{};
  std::size_t samples = 0;
};

/// Per-edge values of the six metrics. Loads and stores include queue traffic.
[[nodiscard]] inline std::array<double, 6> per_edge_metrics(const IterationStats& s) {
  if (s.edges_traversed == 0) throw std::invalid_argument("sample has no traversed edges");
  const double e = static_cast<double>(s.edges_traversed);
  return {s.wall_time / e,
          static_cast<double>(s.ops) / e,
          static_cast<double>(s.branches) / e,
          static_cast<double>(s.mispredictions) / e,
          static_cast<double>(s.loads + s.queue_loads) / e,
          static_cast<double>(s.stores + s.queue_stores) / e};
}

/// Pearson correlation of two equally long columns; nullopt on zero variance.
[[nodiscard]] inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n == 0) throw std::invalid_argument("pearson: column length mismatch");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  // Relative cutoff so columns that are constant up to rounding count as constant.
  const auto flat = [n](double ss, double mean) {
    return ss <= 1e-24 * static_cast<double>(n) * std::max(1.0, mean * mean);
  };
  if (flat(sxx, mx) || flat(syy, my)) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Pairwise Pearson coefficients of per-edge T, I, B, M, L, S over the samples.
[[nodiscard]] inline CorrelationMatrix correlate(std::span<const IterationStats> samples) {
  if (samples.size() < 3) throw std::invalid_argument("correlation needs at least 3 samples");
  std::array<std::vector<double>, 6> cols;
  for (const auto& s : samples) {
    const auto m = per_edge_metrics(s);
    for (std::size_t k = 0; k < 6; ++k) cols[k].push_back(m[k]);
  }
  CorrelationMatrix cm;
  cm.samples = samples.size();
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i; j < 6; ++j) {
      auto c = pearson(cols[i], cols[j]);
      if (i == j && c) c = 1.0;
      cm.r[i][j] = c;
      cm.r[j][i] = c;
    }
  }
  return cm;
}

struct RatioRow {
  std::uint64_t index = 0;
  // Iteration time over the fastest branch-based iteration.
  std::optional<double> based_time_ratio;
  std::optional<double> avoiding_time_ratio;
  // based / avoiding
  std::optional<double> branch_ratio;
  std::optional<double> misprediction_ratio;
  // avoiding / based, state-array stores only
  std::optional<double> store_ratio;
};

struct RatioTable {
  std::vector<RatioRow> rows;
  IterationStats based_total;
  IterationStats avoiding_total;
  /// Total branch-based time over total branch-avoiding time.
  std::optional<double> speedup;
};

namespace detail {
inline std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}
}  // namespace detail

/// Per-iteration comparison of two runs over the same graph. Iteration counts must agree.
[[nodiscard]] inline RatioTable iteration_ratio_table(std::span<const IterationStats> based,
                                                      std::span<const IterationStats> avoiding) {
  if (based.size() != avoiding.size()) {
    throw std::invalid_argument("iteration count mismatch: " + std::to_string(based.size()) + " vs " +
                                std::to_string(avoiding.size()));
  }
  RatioTable t;
  double fastest = 0.0;
  bool have_fastest = false;
  for (const auto& b : based) {
    if (!have_fastest || b.wall_time < fastest) fastest = b.wall_time;
    have_fastest = true;
  }
  for (std::size_t i = 0; i < based.size(); ++i) {
    const auto& b = based[i];
    const auto& a = avoiding[i];
    RatioRow row;
    row.index = i;
    row.based_time_ratio = detail::ratio(b.wall_time, fastest);
    row.avoiding_time_ratio = detail::ratio(a.wall_time, fastest);
    row.branch_ratio = detail::ratio(static_cast<double>(b.branches), static_cast<double>(a.branches));
    row.misprediction_ratio =
        detail::ratio(static_cast<double>(b.mispredictions), static_cast<double>(a.mispredictions));
    row.store_ratio = detail::ratio(static_cast<double>(a.stores), static_cast<double>(b.stores));
    t.rows.push_back(row);
  }
  t.based_total = total_of({based.begin(), based.end()});
  t.avoiding_total = total_of({avoiding.begin(), avoiding.end()});
  t.speedup = detail::ratio(t.based_total.wall_time, t.avoiding_total.wall_time);
  return t;
}

[[nodiscard]] inline RatioTable iteration_ratio_table(const CcRunResult& based, const CcRunResult& avoiding) {
  return iteration_ratio_table(based.per_iteration, avoiding.per_iteration);
}

[[nodiscard]] inline RatioTable iteration_ratio_table(const BfsRunResult& based, const BfsRunResult& avoiding) {
  return iteration_ratio_table(based.per_level, avoiding.per_level);
}

/**
 * Per-iteration wall time of an uninstrumented run: the median over
 * `repetitions` runs, taken index by index. `run` must return the
 * IterationStats sequence of one run and be deterministic in its length.
 */
template <class RunFn>
[[nodiscard]] std::vector<double> median_iteration_times(RunFn&& run, int repetitions = 5) {
  std::vector<std::vector<double>> samples;
  for (int k = 0; k < repetitions; ++k) {
    const std::vector<IterationStats> rows = run();
    if (samples.empty()) samples.resize(rows.size());
    if (rows.size() != samples.size()) throw std::logic_error("timing run changed iteration count");
    for (std::size_t i = 0; i < rows.size(); ++i) samples[i].push_back(rows[i].wall_time);
  }
  std::vector<double> medians;
  medians.reserve(samples.size());
  for (auto& s : samples) {
    std::sort(s.begin(), s.end());
    const std::size_t m = s.size() / 2;
    medians.push_back(s.size() % 2 ? s[m] : 0.5 * (s[m - 1] + s[m]));
  }
  return medians;
}

}  // namespace branchlab
