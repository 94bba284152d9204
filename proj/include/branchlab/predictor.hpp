#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace branchlab {

// 2-bit saturating counter. The enumerator order is the counter value, so
// "taken" moves one step up and "not taken" one step down.
enum class PredictorState : std::uint8_t {
  strongly_not_taken = 0,
  weakly_not_taken = 1,
  weakly_taken = 2,
  strongly_taken = 3,
};

inline constexpr std::array<PredictorState, 4> all_predictor_states{
    PredictorState::strongly_not_taken, PredictorState::weakly_not_taken,
    PredictorState::weakly_taken, PredictorState::strongly_taken};

[[nodiscard]] constexpr bool predicts_taken(PredictorState s) noexcept {
  return s >= PredictorState::weakly_taken;
}

struct StepResult {
  PredictorState next;
  bool mispredicted;

  friend constexpr bool operator==(const StepResult&, const StepResult&) = default;
};

[[nodiscard]] constexpr StepResult step(PredictorState state, bool taken) noexcept {
  const auto v = static_cast<std::uint8_t>(state);
  const auto next = taken ? (v == 3 ? 3 : v + 1) : (v == 0 ? 0 : v - 1);
  return {static_cast<PredictorState>(next), predicts_taken(state) != taken};
}

[[nodiscard]] constexpr std::string_view short_name(PredictorState s) noexcept {
  switch (s) {
    case PredictorState::strongly_not_taken: return "snt";
    case PredictorState::weakly_not_taken: return "wnt";
    case PredictorState::weakly_taken: return "wt";
    case PredictorState::strongly_taken: return "st";
  }
  return "?";
}

[[nodiscard]] inline PredictorState parse_predictor_state(std::string_view name) {
  for (auto s : all_predictor_states) {
    if (short_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown predictor state '" + std::string(name) + "'");
}

/// Probability of each predictor state, ordered [snt, wnt, wt, st].
struct StateDistribution {
  std::array<double, 4> p{};

  static constexpr double tolerance = 1e-12;

  [[nodiscard]] static StateDistribution uniform() { return {{0.25, 0.25, 0.25, 0.25}}; }
  [[nodiscard]] static StateDistribution point(PredictorState s) {
    StateDistribution d;
    d.p[static_cast<std::size_t>(s)] = 1.0;
    return d;
  }

  [[nodiscard]] double operator[](PredictorState s) const { return p[static_cast<std::size_t>(s)]; }

  [[nodiscard]] double strongly_not_taken() const { return p[0]; }
  [[nodiscard]] double weakly_not_taken() const { return p[1]; }
  [[nodiscard]] double weakly_taken() const { return p[2]; }
  [[nodiscard]] double strongly_taken() const { return p[3]; }
  [[nodiscard]] double predicts_taken_mass() const { return p[2] + p[3]; }

  [[nodiscard]] bool is_valid() const {
    double sum = 0.0;
    for (double x : p) {
      if (!(x >= -tolerance)) return false;
      sum += x;
    }
    return std::abs(sum - 1.0) <= tolerance;
  }
};

inline void require_distribution(const StateDistribution& d) {
  if (!d.is_valid()) throw std::invalid_argument("not a probability distribution over predictor states");
}

inline void require_probability(double b) {
  if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("branch probability outside [0, 1]");
}

/// Markov transition matrix of the predictor when the branch is taken with probability b.
struct TransitionMatrix {
  std::array<std::array<double, 4>, 4> g{};

  [[nodiscard]] StateDistribution apply(const StateDistribution& row) const {
    StateDistribution out;
    for (std::size_t j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < 4; ++i) acc += row.p[i] * g[i][j];
      out.p[j] = acc;
    }
    return out;
  }
};

[[nodiscard]] inline TransitionMatrix transition_matrix(double b) {
  require_probability(b);
  const double nb = 1.0 - b;
  return {{{{nb, b, 0, 0}, {nb, 0, b, 0}, {0, nb, 0, b}, {0, 0, nb, b}}}};
}

/// p * G_b^steps.
[[nodiscard]] inline StateDistribution evolve(StateDistribution p, double b, std::uint64_t steps) {
  require_distribution(p);
  const auto g = transition_matrix(b);
  // G_0 and G_1 drive every distribution to a fixed point within three steps.
  if ((b == 0.0 || b == 1.0) && steps > 3) steps = 3;
  for (std::uint64_t k = 0; k < steps; ++k) p = g.apply(p);
  return p;
}

/// Probability that a single branch with taken-probability b is predicted correctly.
[[nodiscard]] inline double correct_prediction_probability(const StateDistribution& p, double b) {
  const double taken = p.predicts_taken_mass();
  return taken * b + (1.0 - taken) * (1.0 - b);
}

[[nodiscard]] inline double expected_mispredict_single(const StateDistribution& p, double b) {
  require_distribution(p);
  require_probability(b);
  return 1.0 - correct_prediction_probability(p, b);
}

/// Which machine branch direction a loop's termination test uses.
enum class LoopConvention {
  /// Branch taken while the loop continues; the exit is the single not-taken outcome.
  taken_on_continue,
  /// Branch taken only to leave the loop.
  taken_on_exit,
};

/**
 * Expected mispredictions of a simple n-iteration loop's termination test
 * when the predictor starts in distribution p.
 *
 * With taken-on-exit: 1-(w+s) for n=0, 1+w for n=1, 1+w+2s for n>=2.
 * Taken-on-continue is the mirror image: swap the roles of the taken and
 * not-taken states.
 */
[[nodiscard]] inline double expected_mispredict_loop(const StateDistribution& p, std::uint64_t n,
                                                     LoopConvention convention = LoopConvention::taken_on_exit) {
  require_distribution(p);
  const bool mirrored = convention == LoopConvention::taken_on_continue;
  const double wt = mirrored ? p.weakly_not_taken() : p.weakly_taken();
  const double st = mirrored ? p.strongly_not_taken() : p.strongly_taken();
  if (n == 0) return 1.0 - (wt + st);
  if (n == 1) return 1.0 + wt;
  return 1.0 + wt + 2.0 * st;
}

struct LoopTrace {
  std::uint64_t mispredictions = 0;
  PredictorState final_state = PredictorState::weakly_not_taken;
};

/// Steps the automaton through n continue outcomes followed by one exit outcome.
[[nodiscard]] constexpr LoopTrace simulate_loop(PredictorState initial, std::uint64_t n,
                                                LoopConvention convention) noexcept {
  const bool continue_taken = convention == LoopConvention::taken_on_continue;
  LoopTrace trace{0, initial};
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto r = step(trace.final_state, continue_taken);
    trace.mispredictions += r.mispredicted;
    trace.final_state = r.next;
  }
  const auto exit = step(trace.final_state, !continue_taken);
  trace.mispredictions += exit.mispredicted;
  trace.final_state = exit.next;
  return trace;
}

[[nodiscard]] constexpr std::uint64_t brute_force_loop_misses(PredictorState initial, std::uint64_t n,
                                                              LoopConvention convention) noexcept {
  return simulate_loop(initial, n, convention).mispredictions;
}

}  // namespace branchlab
