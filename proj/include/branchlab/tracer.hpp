#pragma once

#include <concepts>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "predictor.hpp"

namespace branchlab {

/// Handle of a registered static branch site.
struct SiteId {
  std::uint32_t index = 0;
  friend constexpr bool operator==(SiteId, SiteId) = default;
};

/// Which array an access touches: the per-vertex result (CC_id or d) or the BFS queue.
enum class Region { state, queue };

/// Global operation counters of one instrumented run.
struct Counters {
  std::uint64_t branches = 0;
  std::uint64_t mispredictions = 0;
  std::uint64_t loads = 0;
  std::uint64_t stores = 0;
  std::uint64_t queue_loads = 0;
  std::uint64_t queue_stores = 0;
  std::uint64_t conditional_moves = 0;
  std::uint64_t arithmetic = 0;

  /// Instruction proxy: every counted operation.
  [[nodiscard]] std::uint64_t ops() const noexcept {
    return branches + loads + stores + queue_loads + queue_stores + conditional_moves + arithmetic;
  }

  Counters& operator+=(const Counters& o) noexcept {
    branches += o.branches;
    mispredictions += o.mispredictions;
    loads += o.loads;
    stores += o.stores;
    queue_loads += o.queue_loads;
    queue_stores += o.queue_stores;
    conditional_moves += o.conditional_moves;
    arithmetic += o.arithmetic;
    return *this;
  }
  friend Counters operator-(Counters a, const Counters& b) noexcept {
    a.branches -= b.branches;
    a.mispredictions -= b.mispredictions;
    a.loads -= b.loads;
    a.stores -= b.stores;
    a.queue_loads -= b.queue_loads;
    a.queue_stores -= b.queue_stores;
    a.conditional_moves -= b.conditional_moves;
    a.arithmetic -= b.arithmetic;
    return a;
  }
  friend bool operator==(const Counters&, const Counters&) = default;
};

struct SiteStats {
  std::string label;
  PredictorState state = PredictorState::weakly_not_taken;
  std::uint64_t evaluations = 0;
  std::uint64_t taken = 0;
  std::uint64_t mispredictions = 0;

  friend bool operator==(const SiteStats&, const SiteStats&) = default;
};

/// Immutable copy of a recorder's state.
struct TraceSnapshot {
  std::vector<SiteStats> sites;  // registration order
  Counters totals;

  [[nodiscard]] const SiteStats* find(std::string_view label) const {
    for (const auto& s : sites) {
      if (s.label == label) return &s;
    }
    return nullptr;
  }

  /// True iff every counter here is >= the matching counter of `earlier`.
  [[nodiscard]] bool dominates(const TraceSnapshot& earlier) const {
    const auto& a = totals;
    const auto& b = earlier.totals;
    if (a.branches < b.branches || a.mispredictions < b.mispredictions || a.loads < b.loads ||
        a.stores < b.stores || a.queue_loads < b.queue_loads || a.queue_stores < b.queue_stores ||
        a.conditional_moves < b.conditional_moves || a.arithmetic < b.arithmetic) {
      return false;
    }
    for (const auto& e : earlier.sites) {
      const auto* s = find(e.label);
      if (!s || s->evaluations < e.evaluations || s->taken < e.taken || s->mispredictions < e.mispredictions) {
        return false;
      }
    }
    return true;
  }

  friend bool operator==(const TraceSnapshot&, const TraceSnapshot&) = default;
};

/// What the instrumented algorithms require of a recorder.
template <class R>
concept Recorder = requires(R r, const R cr, SiteId id, std::uint64_t n) {
  { r.register_site(std::string_view{}) } -> std::same_as<SiteId>;
  { r.branch(id, true) } -> std::same_as<bool>;
  r.record_load(n);
  r.record_load(n, Region::queue);
  r.record_store(n);
  r.record_store(n, Region::queue);
  r.record_cmov(n);
  r.record_arith(n);
  { cr.totals() } -> std::same_as<Counters>;
};

/**
 * Simulates one 2-bit predictor per registered static branch site and counts
 * memory and conditional-move operations.
 *
 * Sites are never evicted. Every site starts in the recorder's initial state.
 */
class TraceRecorder {
 public:
  explicit TraceRecorder(PredictorState initial = PredictorState::weakly_not_taken) : initial_(initial) {}

  SiteId register_site(std::string_view label) {
    if (by_label_.contains(std::string(label))) {
      throw std::invalid_argument("branch site '" + std::string(label) + "' already registered");
    }
    const SiteId id{static_cast<std::uint32_t>(sites_.size())};
    sites_.push_back({std::string(label), initial_, 0, 0, 0});
    by_label_.emplace(std::string(label), id.index);
    return id;
  }

  [[nodiscard]] SiteId site(std::string_view label) const {
    auto it = by_label_.find(std::string(label));
    if (it == by_label_.end()) throw std::out_of_range("unknown branch site '" + std::string(label) + "'");
    return SiteId{it->second};
  }

  void record_branch(SiteId id, bool taken) {
    if (id.index >= sites_.size()) throw std::out_of_range("unknown branch site id");
    auto& s = sites_[id.index];
    const auto r = step(s.state, taken);
    s.state = r.next;
    ++s.evaluations;
    s.taken += taken;
    s.mispredictions += r.mispredicted;
    ++totals_.branches;
    totals_.mispredictions += r.mispredicted;
  }

  /// Records the outcome and passes the condition through, for use inside loop tests.
  bool branch(SiteId id, bool condition) {
    record_branch(id, condition);
    return condition;
  }

  void record_load(std::uint64_t n, Region region = Region::state) noexcept {
    (region == Region::state ? totals_.loads : totals_.queue_loads) += n;
  }
  void record_store(std::uint64_t n, Region region = Region::state) noexcept {
    (region == Region::state ? totals_.stores : totals_.queue_stores) += n;
  }
  void record_cmov(std::uint64_t n) noexcept { totals_.conditional_moves += n; }
  void record_arith(std::uint64_t n) noexcept { totals_.arithmetic += n; }

  [[nodiscard]] Counters totals() const noexcept { return totals_; }
  [[nodiscard]] PredictorState initial_state() const noexcept { return initial_; }

  [[nodiscard]] TraceSnapshot report() const { return {sites_, totals_}; }

 private:
  PredictorState initial_;
  std::vector<SiteStats> sites_;
  std::unordered_map<std::string, std::uint32_t> by_label_;
  Counters totals_;
};

/// No-op recorder for timing runs.
struct NullRecorder {
  SiteId register_site(std::string_view) noexcept { return {}; }
  bool branch(SiteId, bool condition) noexcept { return condition; }
  void record_branch(SiteId, bool) noexcept {}
  void record_load(std::uint64_t, Region = Region::state) noexcept {}
  void record_store(std::uint64_t, Region = Region::state) noexcept {}
  void record_cmov(std::uint64_t) noexcept {}
  void record_arith(std::uint64_t) noexcept {}
  [[nodiscard]] Counters totals() const noexcept { return {}; }
  [[nodiscard]] TraceSnapshot report() const { return {}; }
};

static_assert(Recorder<TraceRecorder>);
static_assert(Recorder<NullRecorder>);

inline void write_sites_csv(std::ostream& out, const TraceSnapshot& snap) {
  out << "site,evaluations,taken,mispredictions,final_state\n";
  for (const auto& s : snap.sites) {
    out << s.label << ',' << s.evaluations << ',' << s.taken << ',' << s.mispredictions << ','
        << short_name(s.state) << '\n';
  }
}

}  // namespace branchlab
