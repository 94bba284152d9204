#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cc.hpp"
#include "graph.hpp"
#include "stats.hpp"
#include "tracer.hpp"

namespace branchlab {

using distance_t = std::uint32_t;

/// Distance of a vertex the traversal never reached. Larger than any hop count.
inline constexpr distance_t unreached = std::numeric_limits<distance_t>::max();

namespace sites {
inline constexpr std::string_view bfs_while = "bfs.while";
inline constexpr std::string_view bfs_for = "bfs.for";
inline constexpr std::string_view bfs_if = "bfs.if";
}  // namespace sites

struct BfsRunResult {
  Variant variant = Variant::branch_based;
  vertex_t root = 0;
  std::vector<distance_t> distances;
  std::vector<vertex_t> queue;  // reached vertices in discovery order
  std::uint64_t edges_traversed = 0;
  std::vector<IterationStats> per_level;

  [[nodiscard]] std::uint64_t reached() const noexcept { return queue.size(); }
};

namespace detail {

inline void require_root(const Graph& g, vertex_t root) {
  if (root >= g.num_vertices()) {
    throw std::out_of_range("root " + std::to_string(root) + " outside [0, " +
                            std::to_string(g.num_vertices()) + ")");
  }
}

}  // namespace detail

// Store accounting for both variants: writes to d made by the traversal loop.
// The initial fill of d and the root's seed d[r] = 0 are setup and not counted,
// matching the uncounted CC_id[v] = v initialization of the label propagation.

/**
 * Queue-based top-down BFS with a branch on "w seen for the first time".
 *
 * Per-level records are cut whenever the dequeued vertex's distance changes;
 * the queue is level-ordered so each record covers exactly one frontier.
 */
template <Recorder R>
BfsRunResult bfs_branch_based(const Graph& g, vertex_t root, R& rec) {
  detail::require_root(g, root);
  const auto while_site = rec.register_site(sites::bfs_while);
  const auto for_site = rec.register_site(sites::bfs_for);
  const auto if_site = rec.register_site(sites::bfs_if);

  BfsRunResult result;
  result.variant = Variant::branch_based;
  result.root = root;
  auto& d = result.distances;
  auto& q = result.queue;
  d.assign(g.num_vertices(), unreached);
  q.reserve(g.num_vertices());
  q.push_back(root);
  d[root] = 0;

  detail::IterationMeter meter(rec);
  std::size_t head = 0;
  distance_t level = 0;
  std::uint64_t level_edges = 0;
  while (rec.branch(while_site, head < q.size())) {
    const vertex_t v = q[head++];
    rec.record_load(1, Region::queue);
    const distance_t dv = d[v];
    rec.record_load(1);
    if (dv != level) {
      meter.close(result.per_level, level_edges);
      level = dv;
      level_edges = 0;
    }
    const distance_t next_level = dv + 1;
    rec.record_arith(1);
    const auto adj = g.neighbors(v);
    for (std::size_t i = 0; rec.branch(for_site, i < adj.size()); ++i) {
      const vertex_t w = adj[i];
      rec.record_load(1);
      if (rec.branch(if_site, d[w] == unreached)) {
        q.push_back(w);
        rec.record_store(1, Region::queue);
        d[w] = next_level;
        rec.record_store(1);
      }
    }
    level_edges += adj.size();
    result.edges_traversed += adj.size();
  }
  meter.close(result.per_level, level_edges);
  return result;
}

/**
 * BFS whose inner loop has no data-dependent branch.
 *
 * Every traversed edge speculatively writes w one slot past the queue tail,
 * selects min(d[w], next_level) and bumps the tail only when d[w] was larger,
 * then stores d[w] back unconditionally. The queue holds |V|+1 slots so the
 * speculative write is always in bounds.
 */
template <Recorder R>
BfsRunResult bfs_branch_avoiding(const Graph& g, vertex_t root, R& rec) {
  detail::require_root(g, root);
  const auto while_site = rec.register_site(sites::bfs_while);
  const auto for_site = rec.register_site(sites::bfs_for);

  BfsRunResult result;
  result.variant = Variant::branch_avoiding;
  result.root = root;
  auto& d = result.distances;
  d.assign(g.num_vertices(), unreached);
  std::vector<vertex_t> q(static_cast<std::size_t>(g.num_vertices()) + 1);
  q[0] = root;
  std::size_t q_len = 1;
  d[root] = 0;

  detail::IterationMeter meter(rec);
  std::size_t head = 0;
  distance_t level = 0;
  std::uint64_t level_edges = 0;
  while (rec.branch(while_site, head < q_len)) {
    const vertex_t v = q[head++];
    rec.record_load(1, Region::queue);
    const distance_t dv = d[v];
    rec.record_load(1);
    if (dv != level) {
      meter.close(result.per_level, level_edges);
      level = dv;
      level_edges = 0;
    }
    const distance_t next_level = dv + 1;
    rec.record_arith(1);
    const auto adj = g.neighbors(v);
    for (std::size_t i = 0; rec.branch(for_site, i < adj.size()); ++i) {
      const vertex_t w = adj[i];
      distance_t temp = d[w];
      rec.record_load(1);
      const bool greater = temp > next_level;
      q[q_len] = w;
      rec.record_store(1, Region::queue);
      temp = greater ? next_level : temp;
      q_len += greater;
      rec.record_cmov(2);
      d[w] = temp;
      rec.record_store(1);
    }
    level_edges += adj.size();
    result.edges_traversed += adj.size();
  }
  meter.close(result.per_level, level_edges);
  q.resize(q_len);
  result.queue = std::move(q);
  return result;
}

template <Recorder R>
BfsRunResult run_bfs(Variant variant, const Graph& g, vertex_t root, R& rec) {
  return variant == Variant::branch_based ? bfs_branch_based(g, root, rec) : bfs_branch_avoiding(g, root, rec);
}

}  // namespace branchlab
