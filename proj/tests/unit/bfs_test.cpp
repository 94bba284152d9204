#include <gtest/gtest.h>

#include <branchlab/analysis.hpp>
#include <branchlab/bfs.hpp>

#include "oracles.hpp"

using namespace branchlab;

namespace {

const SiteStats& site(const TraceSnapshot& s, std::string_view label) {
  const auto* p = s.find(label);
  if (!p) throw std::out_of_range(std::string(label));
  return *p;
}

std::uint64_t reached_degree_sum(const Graph& g, const BfsRunResult& r) {
  std::uint64_t sum = 0;
  for (auto v : r.queue) sum += g.degree(v);
  return sum;
}

}  // namespace

TEST(BfsBranchBased, PathGraph) {
  const auto g = to_csr({3, {{0, 1}, {1, 2}}}, true);
  TraceRecorder rec;
  EXPECT_EQ(bfs_branch_based(g, 0, rec).distances, (std::vector<distance_t>{0, 1, 2}));
}

TEST(BfsBranchBased, StarFromCenter) {
  const auto g = to_csr({5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}}, true);
  TraceRecorder rec;
  const auto r = bfs_branch_based(g, 0, rec);
  EXPECT_EQ(r.distances, (std::vector<distance_t>{0, 1, 1, 1, 1}));
  const auto& s = site(rec.report(), sites::bfs_if);
  EXPECT_EQ(s.evaluations, 8u);
  EXPECT_EQ(s.taken, 4u);
}

TEST(BfsBranchBased, MatchesOracle) {
  const auto g = generate_random(500, 1500, 7);
  TraceRecorder rec;
  EXPECT_EQ(bfs_branch_based(g, 0, rec).distances, oracle::bfs_distances(g, 0));
}

TEST(BfsBranchAvoiding, PathGraphStores) {
  const auto g = to_csr({3, {{0, 1}, {1, 2}}}, true);
  TraceRecorder rec;
  const auto r = bfs_branch_avoiding(g, 0, rec);
  EXPECT_EQ(r.distances, (std::vector<distance_t>{0, 1, 2}));
  EXPECT_EQ(rec.totals().stores, 4u);
  EXPECT_EQ(rec.report().find(sites::bfs_if), nullptr);
}

TEST(BfsBranchAvoiding, SameQueueAndDistancesAsBranchBased) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = generate_random(300, 700, seed);
    TraceRecorder a, b;
    const auto based = bfs_branch_based(g, 3, a);
    const auto avoiding = bfs_branch_avoiding(g, 3, b);
    EXPECT_EQ(based.distances, avoiding.distances);
    EXPECT_EQ(based.queue, avoiding.queue);
    EXPECT_EQ(based.per_level.size(), avoiding.per_level.size());
  }
}

TEST(Bfs, RootOutOfRange) {
  const auto g = generate_random(10, 10, 1);
  TraceRecorder rec;
  EXPECT_THROW((void)bfs_branch_based(g, 10, rec), std::out_of_range);
  EXPECT_THROW((void)bfs_branch_avoiding(g, 99, rec), std::out_of_range);
}

TEST(BfsProperties, DistanceArrayAgainstOracle) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const vertex_t n = 2 + static_cast<vertex_t>(seed * 17 % 200);
    const std::uint64_t m = std::min<std::uint64_t>(seed * 29 % (3 * n), std::uint64_t{n} * (n - 1) / 2);
    const auto g = generate_random(n, m, seed);
    for (vertex_t root : {vertex_t{0}, n / 2, n - 1}) {
      TraceRecorder a, b;
      const auto based = bfs_branch_based(g, root, a);
      const auto avoiding = bfs_branch_avoiding(g, root, b);
      const auto expected = oracle::bfs_distances(g, root);
      EXPECT_EQ(based.distances, expected);
      EXPECT_EQ(avoiding.distances, expected);
      EXPECT_EQ(based.distances[root], 0u);
      // Adjacent reached vertices differ by at most one level.
      for (vertex_t u = 0; u < n; ++u) {
        if (based.distances[u] == unreached) continue;
        for (auto w : g.neighbors(u)) {
          ASSERT_NE(based.distances[w], unreached);
          EXPECT_LE(based.distances[w], based.distances[u] + 1);
        }
      }
    }
  }
}

TEST(BfsAccounting, ClosedForms) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const auto g = generate_random(400, 900, seed);
    TraceRecorder a, b;
    const auto based = bfs_branch_based(g, 0, a);
    const auto avoiding = bfs_branch_avoiding(g, 0, b);
    const std::uint64_t vhat = based.reached(), ehat = reached_degree_sum(g, based);
    const auto sa = a.report();
    EXPECT_EQ(site(sa, sites::bfs_while).evaluations, vhat + 1);
    EXPECT_EQ(site(sa, sites::bfs_for).evaluations, ehat + vhat);
    EXPECT_EQ(site(sa, sites::bfs_if).evaluations, ehat);
    EXPECT_EQ(site(sa, sites::bfs_if).taken, vhat - 1);
    EXPECT_EQ(based.edges_traversed, ehat);
    EXPECT_EQ(sa.totals.stores, vhat - 1);
    EXPECT_EQ(sa.totals.queue_stores, vhat - 1);
    EXPECT_EQ(b.totals().stores, ehat);
    EXPECT_EQ(b.totals().queue_stores, ehat);
    EXPECT_EQ(b.totals().branches, (vhat + 1) + (ehat + vhat));
    EXPECT_EQ(total_of(based.per_level).edges_traversed, ehat);
    EXPECT_EQ(total_of(avoiding.per_level).stores, ehat);
  }
}

TEST(BfsAccounting, OneRecordPerLevel) {
  const auto g = generate_random(300, 600, 12);
  TraceRecorder rec;
  const auto r = bfs_branch_based(g, 0, rec);
  distance_t deepest = 0;
  for (auto v : r.queue) deepest = std::max(deepest, r.distances[v]);
  EXPECT_EQ(r.per_level.size(), deepest + 1u);
  EXPECT_EQ(total_of(r.per_level).branches, rec.totals().branches);
  EXPECT_EQ(total_of(r.per_level).mispredictions, rec.totals().mispredictions);
}

TEST(BfsBounds, HoldForAllInitialStates) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = oracle::connected_random(200, 500, seed);
    for (auto init : all_predictor_states) {
      TraceRecorder a(init), b(init);
      const auto based = bfs_branch_based(g, 0, a);
      const auto avoiding = bfs_branch_avoiding(g, 0, b);
      EXPECT_TRUE(bfs_bounds(based).within()) << "seed " << seed;
      EXPECT_TRUE(bfs_bounds(avoiding).within()) << "seed " << seed;
      EXPECT_LE(site(a.report(), sites::bfs_if).mispredictions, 2 * based.reached());
    }
  }
}

TEST(BfsEdgeCases, UnreachedVertices) {
  const auto g = to_csr({5, {{0, 1}, {3, 4}}}, true);
  TraceRecorder a, b;
  const auto based = bfs_branch_based(g, 0, a);
  const auto avoiding = bfs_branch_avoiding(g, 0, b);
  const std::vector<distance_t> expected{0, 1, unreached, unreached, unreached};
  EXPECT_EQ(based.distances, expected);
  EXPECT_EQ(avoiding.distances, expected);
  EXPECT_EQ(based.reached(), 2u);
  EXPECT_EQ(avoiding.queue, (std::vector<vertex_t>{0, 1}));
}

TEST(BfsEdgeCases, SingleVertex) {
  const auto g = generate_random(1, 0, 1);
  for (auto init : all_predictor_states) {
    TraceRecorder rec(init);
    const auto r = bfs_branch_based(g, 0, rec);
    EXPECT_EQ(r.reached(), 1u);
    EXPECT_EQ(r.per_level.size(), 1u);
    EXPECT_LE(rec.totals().mispredictions, 3 * 1 + bfs_upper_slack);
  }
}
