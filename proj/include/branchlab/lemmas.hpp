#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "predictor.hpp"

namespace branchlab {

struct LemmaCheck {
  std::string name;
  bool passed = false;
  double max_deviation = 0.0;
  std::string detail;
};

namespace detail {

inline StateDistribution random_distribution(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  StateDistribution d;
  double sum = 0.0;
  for (double& x : d.p) sum += (x = u(rng));
  for (double& x : d.p) x /= sum;
  return d;
}

// Distance of x outside [lo, hi]; 0 when inside.
inline double outside(double x, double lo, double hi) { return x < lo ? lo - x : (x > hi ? x - hi : 0.0); }

inline LemmaCheck exact_range_check(std::string name, std::uint64_t n, double lo, double hi) {
  LemmaCheck c{std::move(name), true, 0.0, {}};
  std::uint64_t seen_min = ~0ull, seen_max = 0;
  for (auto s : all_predictor_states) {
    const auto m = brute_force_loop_misses(s, n, LoopConvention::taken_on_continue);
    seen_min = std::min(seen_min, m);
    seen_max = std::max(seen_max, m);
    c.max_deviation = std::max(c.max_deviation, outside(static_cast<double>(m), lo, hi));
  }
  c.passed = c.max_deviation == 0.0;
  c.detail = "misses in [" + std::to_string(seen_min) + ", " + std::to_string(seen_max) + "]";
  return c;
}

}  // namespace detail

/**
 * Exhaustive and randomized checks of the 2-bit predictor facts: the automaton,
 * the simple-loop and nested-loop miss counts, and the Markov-model closed forms
 * against state enumeration. Loop lemmas use the taken-on-continue convention;
 * the closed forms are checked under both conventions.
 */
[[nodiscard]] inline std::vector<LemmaCheck> verify_lemmas(std::uint64_t seed = 20240601) {
  using PS = PredictorState;
  constexpr auto cont = LoopConvention::taken_on_continue;
  std::vector<LemmaCheck> out;

  {
    struct Row {
      PS from;
      bool taken;
      PS to;
      bool miss;
    };
    // Saturating counter, written out edge by edge.
    const Row table[] = {
        {PS::strongly_not_taken, false, PS::strongly_not_taken, false},
        {PS::strongly_not_taken, true, PS::weakly_not_taken, true},
        {PS::weakly_not_taken, false, PS::strongly_not_taken, false},
        {PS::weakly_not_taken, true, PS::weakly_taken, true},
        {PS::weakly_taken, false, PS::weakly_not_taken, true},
        {PS::weakly_taken, true, PS::strongly_taken, false},
        {PS::strongly_taken, false, PS::weakly_taken, true},
        {PS::strongly_taken, true, PS::strongly_taken, false},
    };
    LemmaCheck c{"fsa-transitions", true, 0.0, "8 (state, outcome) pairs"};
    for (const auto& r : table) {
      if (step(r.from, r.taken) != StepResult{r.to, r.miss}) {
        c.passed = false;
        c.max_deviation = 1.0;
      }
    }
    out.push_back(c);
  }

  {
    LemmaCheck c{"fsa-saturation", true, 0.0, "3 identical outcomes reach the strong state"};
    for (auto s : all_predictor_states) {
      for (bool taken : {false, true}) {
        auto cur = s;
        for (int i = 0; i < 3; ++i) cur = step(cur, taken).next;
        if (cur != (taken ? PS::strongly_taken : PS::strongly_not_taken)) {
          c.passed = false;
          c.max_deviation = 1.0;
        }
      }
    }
    out.push_back(c);
  }

  {
    LemmaCheck c{"long-loop-final-weakly-taken", true, 0.0, "n in [3, 200] and n = 10^6, all initial states"};
    for (auto s : all_predictor_states) {
      for (std::uint64_t n = 3; n <= 200; ++n) {
        if (simulate_loop(s, n, cont).final_state != PS::weakly_taken) c.passed = false;
      }
      if (simulate_loop(s, 1000000, cont).final_state != PS::weakly_taken) c.passed = false;
    }
    c.max_deviation = c.passed ? 0.0 : 1.0;
    out.push_back(c);
  }

  {
    LemmaCheck c{"long-loop-misses-1-to-3", true, 0.0, {}};
    std::uint64_t lo = ~0ull, hi = 0;
    for (auto s : all_predictor_states) {
      for (std::uint64_t n = 3; n <= 200; ++n) {
        const auto m = brute_force_loop_misses(s, n, cont);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
        c.max_deviation = std::max(c.max_deviation, detail::outside(static_cast<double>(m), 1, 3));
      }
    }
    c.passed = c.max_deviation == 0.0;
    c.detail = "misses in [" + std::to_string(lo) + ", " + std::to_string(hi) + "] for n in [3, 200]";
    out.push_back(c);
  }

  {
    // k executions of one loop site; state carries over between executions.
    constexpr std::uint64_t k = 1000;
    LemmaCheck c{"repeated-loop-k-plus-2", true, 0.0, {}};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> first_n(3, 20), later_n(1, 20);
    std::uint64_t lo = ~0ull, hi = 0;
    for (auto s : all_predictor_states) {
      for (int pattern = 0; pattern < 8; ++pattern) {
        auto state = s;
        std::uint64_t total = 0;
        for (std::uint64_t e = 0; e < k; ++e) {
          std::uint64_t n = 0;
          if (pattern < 4) {
            constexpr std::uint64_t fixed[] = {3, 4, 7, 50};
            n = e == 0 ? fixed[pattern] : std::max<std::uint64_t>(1, fixed[pattern] - 2);
          } else {
            n = e == 0 ? first_n(rng) : later_n(rng);
          }
          const auto t = simulate_loop(state, n, cont);
          total += t.mispredictions;
          state = t.final_state;
        }
        lo = std::min(lo, total);
        hi = std::max(hi, total);
        c.max_deviation = std::max(c.max_deviation, detail::outside(static_cast<double>(total), k, k + 2));
      }
    }
    c.passed = c.max_deviation == 0.0;
    c.detail = "k=1000 totals in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
    out.push_back(c);
  }

  out.push_back(detail::exact_range_check("lemma-n0-misses-0-to-1", 0, 0, 1));
  out.push_back(detail::exact_range_check("lemma-n1-misses-1-to-2", 1, 1, 2));
  out.push_back(detail::exact_range_check("lemma-n2-misses-1-to-3", 2, 1, 3));

  {
    LemmaCheck c{"lemma-n0-n2-final-states", true, 0.0, "n=0 never strongly taken; n=2 ends weak"};
    for (auto s : all_predictor_states) {
      if (simulate_loop(s, 0, cont).final_state == PS::strongly_taken) c.passed = false;
      const auto f2 = simulate_loop(s, 2, cont).final_state;
      if (f2 != PS::weakly_taken && f2 != PS::weakly_not_taken) c.passed = false;
    }
    c.max_deviation = c.passed ? 0.0 : 1.0;
    out.push_back(c);
  }

  {
    LemmaCheck c{"loop-closed-form-vs-enumeration", true, 0.0, "1000 random p, n in [0, 10], both conventions"};
    std::mt19937_64 rng(seed + 1);
    std::uniform_int_distribution<std::uint64_t> pick_n(0, 10);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto p = detail::random_distribution(rng);
      const auto n = pick_n(rng);
      for (auto conv : {LoopConvention::taken_on_exit, LoopConvention::taken_on_continue}) {
        double oracle = 0.0;
        for (auto s : all_predictor_states) {
          oracle += p[s] * static_cast<double>(brute_force_loop_misses(s, n, conv));
        }
        c.max_deviation = std::max(c.max_deviation, std::abs(oracle - expected_mispredict_loop(p, n, conv)));
      }
    }
    c.passed = c.max_deviation <= 1e-12;
    out.push_back(c);
  }

  {
    const auto u = StateDistribution::uniform();
    const double v0 = expected_mispredict_loop(u, 0), v1 = expected_mispredict_loop(u, 1),
                 v2 = expected_mispredict_loop(u, 2), v9 = expected_mispredict_loop(u, 9);
    LemmaCheck c{"loop-uniform-prior", true, 0.0, {}};
    c.max_deviation = std::max({std::abs(v0 - 0.5), std::abs(v1 - 1.25), std::abs(v2 - 1.75), std::abs(v9 - 1.75)});
    c.passed = c.max_deviation <= 1e-12;
    std::ostringstream os;
    os << v0 << " / " << v1 << " / " << v2;
    c.detail = os.str();
    out.push_back(c);
  }

  {
    LemmaCheck c{"single-branch-vs-enumeration", true, 0.0, "1000 random (p, b); uniform p gives 1/2"};
    std::mt19937_64 rng(seed + 2);
    std::uniform_real_distribution<double> pick_b(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
      const auto p = detail::random_distribution(rng);
      const double b = pick_b(rng);
      double oracle = 0.0;
      for (auto s : all_predictor_states) {
        oracle += p[s] * (b * step(s, true).mispredicted + (1 - b) * step(s, false).mispredicted);
      }
      c.max_deviation = std::max(c.max_deviation, std::abs(oracle - expected_mispredict_single(p, b)));
      c.max_deviation = std::max(c.max_deviation,
                                 std::abs(expected_mispredict_single(StateDistribution::uniform(), b) - 0.5));
    }
    c.passed = c.max_deviation <= 1e-12;
    out.push_back(c);
  }

  {
    LemmaCheck c{"markov-evolution", true, 0.0, "p G_0 / p G_1 shifts, G_0^k -> [1,0,0,0] for k >= 3, rows stochastic"};
    std::mt19937_64 rng(seed + 3);
    std::uniform_real_distribution<double> pick_b(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
      const auto p = detail::random_distribution(rng);
      const auto [snt, wnt, wt, st] = p.p;
      const auto q0 = evolve(p, 0.0, 1), q1 = evolve(p, 1.0, 1);
      const std::array<double, 4> e0{snt + wnt, wt, st, 0.0}, e1{0.0, snt, wnt, wt + st};
      for (std::size_t i = 0; i < 4; ++i) {
        c.max_deviation = std::max({c.max_deviation, std::abs(q0.p[i] - e0[i]), std::abs(q1.p[i] - e1[i])});
      }
      for (std::uint64_t k = 3; k <= 6; ++k) {
        const auto r = evolve(p, 0.0, k);
        c.max_deviation = std::max({c.max_deviation, std::abs(r.p[0] - 1.0), r.p[1], r.p[2], r.p[3]});
      }
      const double b = pick_b(rng);
      const auto g = transition_matrix(b);
      for (const auto& row : g.g) {
        c.max_deviation = std::max(c.max_deviation, std::abs(row[0] + row[1] + row[2] + row[3] - 1.0));
      }
      auto cur = p;
      for (int k = 0; k < 50; ++k) {
        cur = g.apply(cur);
        if (!cur.is_valid()) c.passed = false;
      }
    }
    c.passed = c.passed && c.max_deviation <= 1e-12;
    out.push_back(c);
  }

  return out;
}

[[nodiscard]] inline bool all_passed(const std::vector<LemmaCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.passed; });
}

}  // namespace branchlab
