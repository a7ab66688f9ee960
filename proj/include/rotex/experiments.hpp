#pragma once

// Ensemble experiments comparing simulated pairings with continuum
// predictions. Shared by the command-line tool and the acceptance suite.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rotex/fields.hpp"
#include "rotex/hydro.hpp"
#include "rotex/observables.hpp"
#include "rotex/simulator.hpp"
#include "rotex/stats.hpp"
#include "rotex/torus.hpp"

namespace rotex {

struct ScalarTest {
  std::string id;
  std::function<double(const Point&)> f;
};

struct VectorTest {
  std::string id;
  FourierVectorField g;
};

// h_z as a scalar test function.
inline ScalarTest fourier_test(int z1, int z2) {
  return {"h(" + std::to_string(z1) + "," + std::to_string(z2) + ")",
          [z1, z2](const Point& u) { return fourier_basis(z1, z2, u).value; }};
}

// The five density test functions: 1, sqrt2 sin 2pi u1, sqrt2 cos 2pi u1,
// sqrt2 cos 2pi u2, sqrt2 cos 2pi (u1 + u2).
inline std::vector<ScalarTest> default_density_tests() {
  std::vector<ScalarTest> out{fourier_test(0, 0), fourier_test(1, 0), fourier_test(0, 1), fourier_test(1, 1)};
  out.insert(out.begin() + 1, {"sqrt2*sin(2pi u1)", [](const Point& u) {
                                 return std::numbers::sqrt2 * std::sin(2.0 * std::numbers::pi * u[0]);
                               }});
  return out;
}

// sin(2 pi m u1) e_j and cos(2 pi m u1) e_j as Fourier fields.
inline FourierVectorField sine_field(int component, int m, double amplitude = 1.0) {
  return FourierVectorField({{{component, -m, 0}, -amplitude / std::numbers::sqrt2}});
}
inline FourierVectorField cosine_field(int component, int m, double amplitude = 1.0) {
  return FourierVectorField({{{component, m, 0}, amplitude / std::numbers::sqrt2}});
}

// Per-trajectory pairings: values[trajectory][time][test].
struct EnsemblePairings {
  std::vector<double> times;
  std::vector<std::string> density_ids;
  std::vector<std::string> current_ids;
  std::vector<std::vector<std::vector<double>>> density;
  std::vector<std::vector<std::vector<double>>> current;
  std::uint64_t events = 0;
};

inline EnsemblePairings collect_pairings(const SimConfig& cfg, const std::vector<ScalarTest>& scalars,
                                         const std::vector<VectorTest>& vectors) {
  const TorusLattice lat(cfg.n);
  std::vector<DiscreteVectorField> g_n;
  for (const auto& v : vectors) g_n.push_back(discretize_field(lat, v.g));
  // Test functions are tabulated once per lattice site.
  std::vector<std::vector<double>> table(scalars.size(), std::vector<double>(lat.num_vertices()));
  for (std::size_t s = 0; s < scalars.size(); ++s) {
    for (std::size_t k = 0; k < lat.num_vertices(); ++k) table[s][k] = scalars[s].f(lat.position(lat.vertex(k)));
  }
  struct PerTrajectory {
    std::vector<std::vector<double>> density, current;
    std::uint64_t events = 0;
  };
  auto per = map_ensemble(cfg, [&](Trajectory&& traj) {
    PerTrajectory out;
    out.events = traj.event_count;
    for (const auto& snap : traj.snapshots) {
      std::vector<double> d(scalars.size(), 0.0), c(vectors.size(), 0.0);
      for (std::size_t s = 0; s < scalars.size(); ++s) {
        double acc = 0.0;
        for (std::size_t k = 0; k < lat.num_vertices(); ++k) {
          if (snap.eta[k]) acc += table[s][k];
        }
        d[s] = acc / static_cast<double>(lat.num_vertices());
      }
      for (std::size_t v = 0; v < vectors.size(); ++v) c[v] = current_functional(g_n[v], snap.crossings);
      out.density.push_back(std::move(d));
      out.current.push_back(std::move(c));
    }
    return out;
  });
  EnsemblePairings res;
  res.times = cfg.snapshot_times;
  for (const auto& s : scalars) res.density_ids.push_back(s.id);
  for (const auto& v : vectors) res.current_ids.push_back(v.id);
  for (auto& p : per) {
    res.density.push_back(std::move(p.density));
    res.current.push_back(std::move(p.current));
    res.events += p.events;
  }
  return res;
}

struct ComparisonRow : Comparison {
  std::string id;
  double time = 0.0;
};

inline std::vector<double> column(const std::vector<std::vector<std::vector<double>>>& v, std::size_t time,
                                  std::size_t test) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& traj : v) out.push_back(traj[time][test]);
  return out;
}

// Observed density pairings against int f rho_t from the spectral heat flow
// on the lattice grid.
inline std::vector<ComparisonRow> compare_density(const EnsemblePairings& data, const SimConfig& cfg,
                                                  const std::vector<ScalarTest>& scalars) {
  const DensityField initial = sample_profile(cfg.profile, cfg.n);
  HeatFlow flow(initial);
  std::vector<ComparisonRow> rows;
  for (std::size_t ti = 0; ti < data.times.size(); ++ti) {
    const auto rho = flow.at(data.times[ti]);
    for (std::size_t s = 0; s < scalars.size(); ++s) {
      const auto st = sample_stats(column(data.density, ti, s));
      rows.push_back({{st.mean, predicted_density_pairing(rho, scalars[s].f), st.se}, scalars[s].id, data.times[ti]});
    }
  }
  return rows;
}

// Observed current pairings against the weak-form prediction.
inline std::vector<ComparisonRow> compare_current(const EnsemblePairings& data, const SimConfig& cfg,
                                                  const std::vector<VectorTest>& vectors) {
  const DensityField initial = sample_profile(cfg.profile, cfg.n);
  std::vector<ComparisonRow> rows;
  for (std::size_t ti = 0; ti < data.times.size(); ++ti) {
    for (std::size_t v = 0; v < vectors.size(); ++v) {
      const auto st = sample_stats(column(data.current, ti, v));
      const double pred = predicted_current_pairing(initial, vectors[v].g, data.times[ti], cfg.alpha, cfg.field);
      rows.push_back({{st.mean, pred, st.se}, vectors[v].id, data.times[ti]});
    }
  }
  return rows;
}

// Difference of two independent ensembles for the same test: SE combines in
// quadrature.
inline ComparisonRow difference_row(const std::string& id, double time, const std::vector<double>& a,
                                    const std::vector<double>& b, double predicted) {
  const auto sa = sample_stats(a), sb = sample_stats(b);
  return {{sa.mean - sb.mean, predicted, std::sqrt(sa.se * sa.se + sb.se * sb.se)}, id, time};
}

// ---------------------------------------------------------------------------
// Martingale study: residual and quadratic variation per trajectory.

struct MartingaleStudy {
  double time = 0.0;
  SampleStats residual;
  double mean_square = 0.0;
  double mean_qv = 0.0;
  double bound = 0.0;  // 4 t (1 + |alpha|) |G|_inf^2 / N^2
};

inline MartingaleStudy martingale_study(SimConfig cfg, const FourierVectorField& g) {
  cfg.record_events = true;
  const TorusLattice lat(cfg.n);
  const auto g_n = discretize_field(lat, g);
  const ModelParams params = cfg.model_params();
  auto samples = map_ensemble(cfg, [&](Trajectory&& traj) {
    const auto m = martingale_diagnostics(traj, params, g_n);
    return m.back();
  });
  MartingaleStudy out;
  out.time = cfg.snapshot_times.back();
  std::vector<double> res;
  double sq = 0.0, qv = 0.0;
  for (const auto& s : samples) {
    res.push_back(s.residual);
    sq += s.residual * s.residual;
    qv += s.quadratic_variation;
  }
  out.residual = sample_stats(res);
  out.mean_square = sq / samples.size();
  out.mean_qv = qv / samples.size();
  const double sup = g.sup_norm();
  out.bound = 4.0 * out.time * (1.0 + std::abs(cfg.alpha)) * sup * sup / (static_cast<double>(cfg.n) * cfg.n);
  return out;
}

// ---------------------------------------------------------------------------
// Bounded-in-N dual norm of the current field.

inline SampleStats dual_norm_study(const SimConfig& cfg, double k, int zmax) {
  const TorusLattice lat(cfg.n);
  const FourierPairingBank bank(lat, zmax);
  auto norms = map_ensemble(cfg, [&](Trajectory&& traj) {
    return sobolev_dual_norm(bank.pair(traj.snapshots.back().crossings), k, zmax).squared;
  });
  return sample_stats(norms);
}

}  // namespace rotex
