#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rotex/rate_table.hpp"
#include "rotex/simulator.hpp"
#include "rotex/stats.hpp"

using namespace rotex;

namespace {

SimConfig small_config(int n = 8, double alpha = 0.5) {
  SimConfig cfg;
  cfg.n = n;
  cfg.alpha = alpha;
  cfg.horizon = 0.05;
  cfg.snapshot_times = {0.0, 0.01, 0.03, 0.05};
  cfg.profile = [](const Point& u) { return 0.5 + 0.25 * std::sin(2 * std::numbers::pi * u[0]); };
  cfg.seed = 42;
  cfg.ensemble_size = 4;
  return cfg;
}

// Oracle rates straight from the model definition.
void expect_table_matches_model(const RateTable& table, const ModelParams& params) {
  const auto& lat = table.lattice();
  const auto& eta = table.configuration();
  for (std::size_t id = 0; id < lat.num_edges(); ++id) {
    const auto e = lat.canonical_edge(id);
    const double fwd = jump_rate(lat, eta, e, params);
    const double bwd = jump_rate(lat, eta, lat.reverse(e), params);
    ASSERT_TRUE(fwd == 0.0 || bwd == 0.0);
    const double w = fwd > 0.0 ? fwd : bwd;
    const int s = fwd > 0.0 ? 1 : (bwd > 0.0 ? -1 : 0);
    ASSERT_NEAR(table.weight(id), w, 1e-14) << id;
    if (w > 0.0) {
      ASSERT_EQ(table.sign(id), s) << id;
    }
  }
}

}  // namespace

TEST(Fenwick, FindMatchesLinearScan) {
  std::mt19937_64 rng(5);
  for (std::size_t n : {1u, 2u, 7u, 64u, 100u}) {
    std::vector<double> w(n);
    for (auto& x : w) x = (rng() % 3 == 0) ? 0.0 : std::uniform_real_distribution<double>(0.1, 2.0)(rng);
    w[n - 1] = 1.0;
    FenwickTree tree(n);
    tree.build(w);
    double total = 0.0;
    for (double x : w) total += x;
    EXPECT_NEAR(tree.total(), total, 1e-12);
    for (int trial = 0; trial < 200; ++trial) {
      const double target = uniform01(rng) * total;
      std::size_t k = 0;
      double acc = w[0];
      while (acc <= target) acc += w[++k];
      EXPECT_EQ(tree.find(target), k);
    }
    for (std::size_t c = 0; c <= n; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < c; ++k) s += w[k];
      EXPECT_NEAR(tree.prefix_sum(c), s, 1e-12);
    }
  }
}

TEST(Fenwick, AddUpdatesPrefixSums) {
  FenwickTree tree(5);
  tree.build({1, 2, 3, 4, 5});
  tree.add(2, -3.0);
  EXPECT_DOUBLE_EQ(tree.total(), 12.0);
  EXPECT_DOUBLE_EQ(tree.prefix_sum(3), 3.0);
  EXPECT_EQ(tree.find(2.5), 1u);
  EXPECT_EQ(tree.find(3.0), 3u);
}

TEST(RateTable, MatchesModelWithAndWithoutField) {
  const TorusLattice lat(5);
  std::mt19937_64 rng(9);
  DiscreteVectorField h(5);
  for (std::size_t id = 0; id < h.size(); ++id) h[id] = std::uniform_real_distribution<double>(-0.2, 0.2)(rng);
  for (const auto& params : {ModelParams(0.5), ModelParams(-0.75, h)}) {
    Configuration eta(5);
    for (std::size_t k = 0; k < eta.size(); ++k) eta.set(k, rng() % 2);
    RateTable table(lat, eta, params);
    expect_table_matches_model(table, params);
  }
}

// Incremental updates after many jumps agree with the model evaluated afresh.
TEST(RateTable, IncrementalUpdatesStayExact) {
  for (int n : {3, 4, 6}) {
    const TorusLattice lat(n);
    const ModelParams params(0.7);
    std::mt19937_64 rng(n);
    Configuration eta(n);
    for (std::size_t k = 0; k < eta.size(); ++k) eta.set(k, rng() % 2);
    RateTable table(lat, eta, params);
    for (int step = 0; step < 2000; ++step) {
      const std::size_t id = table.select(uniform01(rng) * table.total());
      ASSERT_GT(table.weight(id), 0.0);
      table.apply_jump(id);
    }
    expect_table_matches_model(table, params);
    EXPECT_EQ(table.configuration().particle_count(), eta.particle_count());
  }
}

TEST(RateTable, AffectedEdgesCoverTouchingFaces) {
  const TorusLattice lat(6);
  const RateTable table(lat, Configuration(6), ModelParams(0.5));
  // The six faces touching the two endpoints form a 3 x 2 block with 17 edges.
  for (std::size_t id = 0; id < lat.num_edges(); ++id) EXPECT_EQ(table.affected_count(id), 17u);
}

TEST(Simulator, ConservationAndParticleCount) {
  const auto cfg = small_config();
  for (std::uint64_t k = 0; k < 3; ++k) {
    const auto traj = run_trajectory(cfg, k);
    EXPECT_TRUE(conservation_holds(traj));
    EXPECT_GT(traj.event_count, 0u);
    ASSERT_EQ(traj.snapshots.size(), cfg.snapshot_times.size());
    for (const auto& s : traj.snapshots) EXPECT_EQ(s.eta.particle_count(), traj.initial.particle_count());
    EXPECT_EQ(traj.snapshots.front().eta, traj.initial);
    for (auto c : traj.snapshots.front().crossings) EXPECT_EQ(c, 0);
  }
}

TEST(Simulator, DeterministicPerSeedAndIndex) {
  const auto cfg = small_config();
  const auto a = run_trajectory(cfg, 3);
  const auto b = run_trajectory(cfg, 3);
  const auto c = run_trajectory(cfg, 4);
  EXPECT_EQ(a.event_count, b.event_count);
  EXPECT_EQ(a.snapshots.back().eta, b.snapshots.back().eta);
  EXPECT_EQ(a.snapshots.back().crossings, b.snapshots.back().crossings);
  EXPECT_NE(a.snapshots.back().crossings, c.snapshots.back().crossings);
}

TEST(Simulator, EnsembleOrderIndependentOfScheduling) {
  auto cfg = small_config();
  cfg.ensemble_size = 6;
  const auto counts = map_ensemble(cfg, [](Trajectory&& t) { return t.event_count; });
  ASSERT_EQ(counts.size(), 6u);
  for (std::uint64_t k = 0; k < 6; ++k) EXPECT_EQ(counts[k], run_trajectory(cfg, k).event_count);
}

TEST(Simulator, EventLogIsConsistent) {
  auto cfg = small_config(5);
  cfg.record_events = true;
  const auto traj = run_trajectory(cfg, 0);
  ASSERT_TRUE(traj.events);
  EXPECT_EQ(traj.events->size(), traj.event_count);
  std::vector<std::int64_t> crossings(2 * 25, 0);
  for (std::size_t k = 0; k < traj.events->size(); ++k) {
    crossings[traj.events->edge[k]] += traj.events->sign[k];
    if (k) {
      EXPECT_GE(traj.events->time[k], traj.events->time[k - 1]);
    }
    EXPECT_LE(traj.events->time[k], cfg.horizon);
  }
  EXPECT_EQ(crossings, traj.snapshots.back().crossings);
}

TEST(Simulator, EmptyAndFullLatticesAreFrozen) {
  for (double rho : {0.0, 1.0}) {
    auto cfg = small_config(4);
    cfg.profile = [rho](const Point&) { return rho; };
    const auto traj = run_trajectory(cfg, 0);
    EXPECT_EQ(traj.event_count, 0u);
  }
}

// A lone particle never activates a face: it performs a simple random walk
// with total jump rate 4 N^2, so the event count is Poisson(4 N^2 t).
TEST(Simulator, SingleParticleJumpRate) {
  SimConfig cfg;
  cfg.n = 10;
  cfg.alpha = 0.9;
  cfg.horizon = 0.2;
  cfg.snapshot_times = {0.2};
  cfg.profile = [](const Point& u) { return u[0] == 0.0 && u[1] == 0.0 ? 1.0 : 0.0; };
  cfg.ensemble_size = 200;
  const auto counts = map_ensemble(cfg, [](Trajectory&& t) { return static_cast<double>(t.event_count); });
  const auto st = sample_stats(counts);
  const double expected = 4.0 * 100 * 0.2;
  EXPECT_NEAR(st.mean, expected, 5.0 * std::sqrt(expected / 200.0));
  EXPECT_NEAR(st.sd * st.sd, expected, 0.25 * expected);
}

TEST(Simulator, ValidatesConfiguration) {
  auto cfg = small_config();
  cfg.snapshot_times = {0.06};
  EXPECT_THROW(run_trajectory(cfg, 0), std::invalid_argument);
  cfg = small_config();
  cfg.snapshot_times = {0.03, 0.01};
  EXPECT_THROW(run_trajectory(cfg, 0), std::invalid_argument);
  cfg = small_config();
  cfg.alpha = 1.0;
  EXPECT_THROW(run_trajectory(cfg, 0), std::invalid_argument);
  cfg = small_config();
  cfg.profile = [](const Point&) { return 1.5; };
  EXPECT_THROW(run_trajectory(cfg, 0), std::invalid_argument);
  cfg = small_config();
  EXPECT_THROW(run_trajectory(cfg, 0).at_time(0.02), std::invalid_argument);
}

TEST(Stats, SampleStatsByHand) {
  const auto s = sample_stats(std::vector<double>{1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.sd, std::sqrt(5.0 / 3.0));
  EXPECT_DOUBLE_EQ(s.se, std::sqrt(5.0 / 3.0) / 2.0);
  const Comparison c{1.0, 1.05, 0.01};
  EXPECT_FALSE(c.within(4.0, 0.01));
  EXPECT_TRUE(c.within(4.0, 0.06));
  EXPECT_NEAR(c.z(), -5.0, 1e-12);
}
