#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "graph.hpp"
#include "stats.hpp"
#include "tracer.hpp"

namespace branchlab {

enum class Variant { branch_based, branch_avoiding };

[[nodiscard]] constexpr std::string_view variant_name(Variant v) noexcept {
  return v == Variant::branch_based ? "based" : "avoiding";
}

namespace sites {
inline constexpr std::string_view sv_while = "sv.while";
inline constexpr std::string_view sv_for_vertices = "sv.for_vertices";
inline constexpr std::string_view sv_for_neighbors = "sv.for_neighbors";
inline constexpr std::string_view sv_if = "sv.if";
}  // namespace sites

/// Default per-sweep callback: does nothing.
struct NoSweepObserver {
  void operator()(std::span<const vertex_t>) const noexcept {}
};

struct CcRunResult {
  Variant variant = Variant::branch_based;
  std::vector<vertex_t> labels;  // cc_id
  std::uint64_t iterations = 0;  // while-body executions
  std::vector<IterationStats> per_iteration;
};

/**
 * Label propagation with a data-dependent branch on every neighbor comparison.
 *
 * c_v lives in a local; CC_id[v] is written only when a strictly smaller
 * neighbor label is seen. Neighbor labels are read from the live array, so a
 * label may travel several hops within one sweep. Branch outcomes use the
 * taken-when-condition-true convention. `on_sweep` sees the labels after
 * every sweep.
 */
template <Recorder R, class Observer = NoSweepObserver>
CcRunResult sv_branch_based(const Graph& g, R& rec, Observer&& on_sweep = {}) {
  const auto while_site = rec.register_site(sites::sv_while);
  const auto vertex_site = rec.register_site(sites::sv_for_vertices);
  const auto neighbor_site = rec.register_site(sites::sv_for_neighbors);
  const auto if_site = rec.register_site(sites::sv_if);

  const vertex_t n = g.num_vertices();
  CcRunResult result;
  result.variant = Variant::branch_based;
  auto& cc = result.labels;
  cc.resize(n);
  for (vertex_t v = 0; v < n; ++v) cc[v] = v;

  detail::IterationMeter meter(rec);
  bool change = true;
  while (rec.branch(while_site, change)) {
    change = false;
    for (vertex_t v = 0; rec.branch(vertex_site, v < n); ++v) {
      vertex_t cv = cc[v];
      rec.record_load(1);
      const auto adj = g.neighbors(v);
      for (std::size_t i = 0; rec.branch(neighbor_site, i < adj.size()); ++i) {
        const vertex_t cu = cc[adj[i]];
        rec.record_load(1);
        if (rec.branch(if_site, cu < cv)) {
          cc[v] = cu;
          cv = cu;
          change = true;
          rec.record_store(1);
          rec.record_arith(1);
        }
      }
    }
    ++result.iterations;
    meter.close(result.per_iteration, g.num_edges());
    on_sweep(std::span<const vertex_t>(cc));
  }
  meter.fold_into_last(result.per_iteration);
  return result;
}

/**
 * Label propagation without a branch on the label comparison: the running
 * minimum is a conditional select, CC_id[v] is stored once per vertex per
 * sweep, and the change flag accumulates (c_v XOR c_v_init).
 */
template <Recorder R, class Observer = NoSweepObserver>
CcRunResult sv_branch_avoiding(const Graph& g, R& rec, Observer&& on_sweep = {}) {
  const auto while_site = rec.register_site(sites::sv_while);
  const auto vertex_site = rec.register_site(sites::sv_for_vertices);
  const auto neighbor_site = rec.register_site(sites::sv_for_neighbors);

  const vertex_t n = g.num_vertices();
  CcRunResult result;
  result.variant = Variant::branch_avoiding;
  auto& cc = result.labels;
  cc.resize(n);
  for (vertex_t v = 0; v < n; ++v) cc[v] = v;

  detail::IterationMeter meter(rec);
  vertex_t change = 1;
  while (rec.branch(while_site, change != 0)) {
    change = 0;
    for (vertex_t v = 0; rec.branch(vertex_site, v < n); ++v) {
      const vertex_t cv_init = cc[v];
      rec.record_load(1);
      vertex_t cv = cv_init;
      const auto adj = g.neighbors(v);
      for (std::size_t i = 0; rec.branch(neighbor_site, i < adj.size()); ++i) {
        const vertex_t cu = cc[adj[i]];
        rec.record_load(1);
        cv = std::min(cv, cu);
        rec.record_cmov(1);
      }
      cc[v] = cv;
      rec.record_store(1);
      change |= cv ^ cv_init;
      rec.record_arith(1);
    }
    ++result.iterations;
    meter.close(result.per_iteration, g.num_edges());
    on_sweep(std::span<const vertex_t>(cc));
  }
  meter.fold_into_last(result.per_iteration);
  return result;
}

template <Recorder R>
CcRunResult run_sv(Variant variant, const Graph& g, R& rec) {
  return variant == Variant::branch_based ? sv_branch_based(g, rec) : sv_branch_avoiding(g, rec);
}

/// Number of distinct labels.
[[nodiscard]] inline std::uint64_t count_components(const std::vector<vertex_t>& labels) {
  std::vector<vertex_t> sorted(labels);
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::uint64_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

}  // namespace branchlab
