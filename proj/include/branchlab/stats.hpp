#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "tracer.hpp"

namespace branchlab {

/// Counters accumulated over one while-loop iteration (SV) or one BFS level.
struct IterationStats {
  std::uint64_t index = 0;
  double wall_time = 0.0;  // seconds
  std::uint64_t ops = 0;
  std::uint64_t branches = 0;
  std::uint64_t mispredictions = 0;
  std::uint64_t loads = 0;
  std::uint64_t stores = 0;
  std::uint64_t queue_loads = 0;
  std::uint64_t queue_stores = 0;
  std::uint64_t conditional_moves = 0;
  std::uint64_t edges_traversed = 0;

  /// Everything except wall time; used for determinism and equivalence checks.
  [[nodiscard]] bool same_counts(const IterationStats& o) const noexcept {
    return index == o.index && ops == o.ops && branches == o.branches && mispredictions == o.mispredictions &&
           loads == o.loads && stores == o.stores && queue_loads == o.queue_loads &&
           queue_stores == o.queue_stores && conditional_moves == o.conditional_moves &&
           edges_traversed == o.edges_traversed;
  }
};

[[nodiscard]] inline IterationStats make_iteration_stats(std::uint64_t index, const Counters& delta,
                                                         std::uint64_t edges, double seconds) {
  IterationStats s;
  s.index = index;
  s.wall_time = seconds;
  s.ops = delta.ops();
  s.branches = delta.branches;
  s.mispredictions = delta.mispredictions;
  s.loads = delta.loads;
  s.stores = delta.stores;
  s.queue_loads = delta.queue_loads;
  s.queue_stores = delta.queue_stores;
  s.conditional_moves = delta.conditional_moves;
  s.edges_traversed = edges;
  return s;
}

/// Sum of counters over a run; wall_time sums too, index is the row count.
[[nodiscard]] inline IterationStats total_of(const std::vector<IterationStats>& rows) {
  IterationStats t;
  t.index = rows.size();
  for (const auto& r : rows) {
    t.wall_time += r.wall_time;
    t.ops += r.ops;
    t.branches += r.branches;
    t.mispredictions += r.mispredictions;
    t.loads += r.loads;
    t.stores += r.stores;
    t.queue_loads += r.queue_loads;
    t.queue_stores += r.queue_stores;
    t.conditional_moves += r.conditional_moves;
    t.edges_traversed += r.edges_traversed;
  }
  return t;
}

namespace detail {

// Cuts a run into per-iteration records from recorder totals and a monotonic clock.
template <Recorder R>
class IterationMeter {
 public:
  using clock = std::chrono::steady_clock;

  explicit IterationMeter(const R& rec) : rec_(rec), mark_(rec.totals()), start_(clock::now()) {}

  void close(std::vector<IterationStats>& out, std::uint64_t edges) {
    const auto now = clock::now();
    const auto totals = rec_.totals();
    out.push_back(make_iteration_stats(out.size(), totals - mark_, edges,
                                       std::chrono::duration<double>(now - start_).count()));
    mark_ = totals;
    start_ = now;
  }

  // Folds anything recorded since the last close into the final record.
  void fold_into_last(std::vector<IterationStats>& out) {
    if (out.empty()) return;
    const auto now = clock::now();
    const auto totals = rec_.totals();
    const auto delta = totals - mark_;
    auto& last = out.back();
    last.wall_time += std::chrono::duration<double>(now - start_).count();
    last.ops += delta.ops();
    last.branches += delta.branches;
    last.mispredictions += delta.mispredictions;
    last.loads += delta.loads;
    last.stores += delta.stores;
    last.queue_loads += delta.queue_loads;
    last.queue_stores += delta.queue_stores;
    last.conditional_moves += delta.conditional_moves;
    mark_ = totals;
    start_ = now;
  }

 private:
  const R& rec_;
  Counters mark_;
  clock::time_point start_;
};

}  // namespace detail

}  // namespace branchlab
