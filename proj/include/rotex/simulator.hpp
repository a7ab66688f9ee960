#pragma once

// Exact continuous-time simulation of the face-rotation exclusion process in
// diffusive scaling (all rates multiplied by N^2, time in macroscopic units).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rotex/fields.hpp"
#include "rotex/model.hpp"
#include "rotex/rate_table.hpp"
#include "rotex/torus.hpp"

namespace rotex {

using Profile = std::function<double(const Point&)>;

inline constexpr const char* kRngName = "std::mt19937_64 seeded by std::seed_seq{seed_lo, seed_hi, index_lo, index_hi}";

struct SimConfig {
  int n = 16;
  double horizon = 0.05;
  double alpha = 0.0;
  std::optional<FourierVectorField> field;
  Profile profile = [](const Point&) { return 0.5; };
  std::uint64_t seed = 1;
  std::vector<double> snapshot_times{0.0, 0.05};
  int ensemble_size = 1;
  bool record_events = false;

  void validate() const {
    if (n < TorusLattice::kMinSide) throw std::invalid_argument("n must be at least 3");
    if (!(horizon >= 0.0)) throw std::invalid_argument("time horizon must be non-negative");
    if (!(std::abs(alpha) < 1.0)) throw std::invalid_argument("alpha must satisfy |alpha| < 1");
    if (ensemble_size < 1) throw std::invalid_argument("ensemble size must be positive");
    if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) {
      throw std::invalid_argument("snapshot times must be sorted");
    }
    for (double s : snapshot_times) {
      if (s < 0.0 || s > horizon) throw std::invalid_argument("snapshot time outside [0, T]");
    }
  }

  ModelParams model_params() const {
    const TorusLattice lat(n);
    if (field) return ModelParams(alpha, discretize_field(lat, *field));
    return ModelParams(alpha);
  }
};

struct Snapshot {
  double time = 0.0;
  Configuration eta;
  // Net signed crossings per unoriented edge on its canonical orientation.
  std::vector<std::int64_t> crossings;
};

struct EventLog {
  std::vector<std::uint32_t> edge;
  std::vector<std::int8_t> sign;
  std::vector<double> time;

  std::size_t size() const { return edge.size(); }
};

struct Trajectory {
  int n = 0;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  Configuration initial;
  std::vector<Snapshot> snapshots;
  std::uint64_t event_count = 0;
  std::optional<EventLog> events;

  const Snapshot& at_time(double t) const {
    for (const auto& s : snapshots) {
      if (s.time == t) return s;
    }
    throw std::invalid_argument("time " + std::to_string(t) + " is not a recorded snapshot");
  }
};

inline std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Independent Bernoulli(rho*(x)) occupations.
inline Configuration sample_initial(const Profile& profile, const TorusLattice& lat, std::mt19937_64& rng) {
  Configuration eta(lat.side());
  for (std::size_t k = 0; k < lat.num_vertices(); ++k) {
    const double rho = profile(lat.position(lat.vertex(k)));
    if (!(rho >= 0.0 && rho <= 1.0)) {
      throw std::invalid_argument("density profile value " + std::to_string(rho) + " outside [0, 1]");
    }
    eta.set(k, uniform01(rng) < rho);
  }
  return eta;
}

// Runs one trajectory with an already discretized parameter set.
inline Trajectory run_trajectory(const SimConfig& cfg, const ModelParams& params, std::uint64_t index) {
  const TorusLattice lat(cfg.n);
  auto rng = trajectory_rng(cfg.seed, index);
  Trajectory traj;
  traj.n = cfg.n;
  traj.seed = cfg.seed;
  traj.index = index;
  traj.initial = sample_initial(cfg.profile, lat, rng);
  if (cfg.record_events) traj.events.emplace();

  RateTable table(lat, traj.initial, params);
  std::vector<std::int64_t> crossings(lat.num_edges(), 0);
  const double scale = static_cast<double>(cfg.n) * cfg.n;
  constexpr std::uint64_t kRebuildInterval = 1U << 16;

  double t = 0.0;
  std::size_t next_snap = 0;
  auto record_until = [&](double limit) {
    while (next_snap < cfg.snapshot_times.size() && cfg.snapshot_times[next_snap] < limit) {
      traj.snapshots.push_back({cfg.snapshot_times[next_snap], table.configuration(), crossings});
      ++next_snap;
    }
  };

  while (true) {
    const double total = table.total() * scale;
    if (!(total > 0.0)) break;
    const double dt = -std::log1p(-uniform01(rng)) / total;
    if (t + dt > cfg.horizon) break;
    record_until(t + dt);
    t += dt;

    std::size_t id = table.select(uniform01(rng) * table.total());
    if (table.weight(id) <= 0.0) {
      // Accumulated rounding in the tree pointed at an empty slot.
      table.rebuild();
      id = table.select(uniform01(rng) * table.total());
      if (table.weight(id) <= 0.0) throw std::logic_error("selected edge has zero rate");
    }
    const int s = table.sign(id);
    crossings[id] += s;
    if (traj.events) {
      traj.events->edge.push_back(static_cast<std::uint32_t>(id));
      traj.events->sign.push_back(static_cast<std::int8_t>(s));
      traj.events->time.push_back(t);
    }
    table.apply_jump(id);
    ++traj.event_count;
    if (traj.event_count % kRebuildInterval == 0) table.rebuild();
  }
  // Snapshots at times beyond the last event (including t == horizon).
  while (next_snap < cfg.snapshot_times.size()) {
    traj.snapshots.push_back({cfg.snapshot_times[next_snap], table.configuration(), crossings});
    ++next_snap;
  }
  return traj;
}

inline Trajectory run_trajectory(const SimConfig& cfg, std::uint64_t index) {
  cfg.validate();
  return run_trajectory(cfg, cfg.model_params(), index);
}

// Checks eta_t(x) - eta_s(x) + div (J_t - J_s)(x) == 0 for all consecutive
// snapshot pairs (starting from the initial configuration).
inline bool conservation_holds(const Trajectory& traj) {
  const TorusLattice lat(traj.n);
  const Configuration* prev_eta = &traj.initial;
  std::vector<std::int64_t> zero(lat.num_edges(), 0);
  const std::vector<std::int64_t>* prev_j = &zero;
  for (const auto& snap : traj.snapshots) {
    for (std::size_t k = 0; k < lat.num_vertices(); ++k) {
      const Vertex x = lat.vertex(k);
      std::int64_t div = 0;
      for (Dir d : kAllDirs) {
        const auto r = lat.edge_ref({x, d});
        div += r.sign * (snap.crossings[r.id] - (*prev_j)[r.id]);
      }
      if (static_cast<std::int64_t>(snap.eta[k]) - static_cast<std::int64_t>((*prev_eta)[k]) + div != 0) {
        return false;
      }
    }
    prev_eta = &snap.eta;
    prev_j = &snap.crossings;
  }
  return true;
}

inline unsigned worker_count(std::size_t jobs) {
  const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(jobs, 1)));
}

// Runs the ensemble and maps each trajectory through `fn`; results are in
// trajectory order regardless of scheduling.
template <class Fn>
auto map_ensemble(const SimConfig& cfg, Fn&& fn) -> std::vector<decltype(fn(std::declval<Trajectory&&>()))> {
  using Result = decltype(fn(std::declval<Trajectory&&>()));
  cfg.validate();
  const ModelParams params = cfg.model_params();
  const std::size_t m = static_cast<std::size_t>(cfg.ensemble_size);
  std::vector<std::optional<Result>> slots(m);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= m) return;
      try {
        slots[k].emplace(fn(run_trajectory(cfg, params, k)));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned workers = worker_count(m);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<Result> out;
  out.reserve(m);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace rotex
