#pragma once

// Observables on trajectories: empirical-measure pairings, the integrated
// current field, box densities and approximate-identity kernels, and the
// martingale / quadratic-variation diagnostics of the current.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotex/fields.hpp"
#include "rotex/model.hpp"
#include "rotex/rate_table.hpp"
#include "rotex/simulator.hpp"
#include "rotex/torus.hpp"

namespace rotex {

// N^{-2} sum_x eta(x) f(x)
template <class Fn>
double empirical_pairing(const TorusLattice& lat, const Configuration& eta, Fn&& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < lat.num_vertices(); ++k) {
    if (eta[k]) s += f(lat.position(lat.vertex(k)));
  }
  return s / static_cast<double>(lat.num_vertices());
}

// N^{-2} sum over unoriented edges of G_N J on the canonical orientation.
inline double current_functional(const DiscreteVectorField& g_n, const std::vector<std::int64_t>& crossings) {
  if (g_n.size() != crossings.size()) throw std::invalid_argument("field and counters differ in size");
  double s = 0.0;
  for (std::size_t id = 0; id < crossings.size(); ++id) s += g_n[id] * static_cast<double>(crossings[id]);
  const double n = g_n.side();
  return s / (n * n);
}

inline double current_functional(const Trajectory& traj, const DiscreteVectorField& g_n, double t) {
  return current_functional(g_n, traj.at_time(t).crossings);
}

// ---------------------------------------------------------------------------
// Boxes B^l_{p,q}(x): the l x l box with x as a corner, lying in quadrant
// (p, q) and excluding x's own row and column.

inline double box_density(const TorusLattice& lat, const Configuration& eta, Vertex x, int p, int q, int ell) {
  if ((p != 1 && p != -1) || (q != 1 && q != -1)) throw std::invalid_argument("quadrant signs must be +1 or -1");
  if (ell < 1 || ell >= lat.side()) throw std::invalid_argument("box side must lie in [1, N-1]");
  std::int64_t count = 0;
  for (int a = 1; a <= ell; ++a) {
    for (int b = 1; b <= ell; ++b) count += eta.at(lat, lat.shift(x, p * a, q * b));
  }
  return static_cast<double>(count) / (static_cast<double>(ell) * ell);
}

namespace detail {

// Torus offset (v - u) measured in lattice units, wrapped to [-N/2, N/2) and
// snapped to the nearest integer when within rounding distance of it.
inline double lattice_offset(double v, double u, int n) {
  double d = (v - u) * n;
  d = std::fmod(d, static_cast<double>(n));
  if (d < -0.5 * n) d += n;
  if (d >= 0.5 * n) d -= n;
  const double r = std::round(d);
  return std::abs(d - r) < 1e-9 ? r : d;
}

// Membership of an offset in the kernel interval for sign p and width w (in
// lattice units). `open_left_end` selects the fully open interval used by the
// (-1,-1) kernel's first coordinate.
inline bool in_kernel_interval(double d, int p, double w, bool open_left_end) {
  if (p == 1) return d >= 0.0 && d < w;        // [u, u + eps)
  if (open_left_end) return d > -w && d < 0.0;  // (u - eps, u)
  return d > -w && d <= 0.0;                    // (u - eps, u]
}

}  // namespace detail

// pi^N(i^{(p,q,u)}_eps): eps^{-2} times the empirical mass in the half-open
// rectangle attached to u in quadrant (p, q).
inline double kernel_pairing(const TorusLattice& lat, const Configuration& eta, const Point& u, double eps, int p,
                             int q) {
  if ((p != 1 && p != -1) || (q != 1 && q != -1)) throw std::invalid_argument("quadrant signs must be +1 or -1");
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("kernel width must lie in (0, 1/2)");
  const int n = lat.side();
  const double w = eps * n;
  const bool open_first = (p == -1 && q == -1);
  std::int64_t count = 0;
  for (std::size_t k = 0; k < lat.num_vertices(); ++k) {
    if (!eta[k]) continue;
    const auto v = lat.position(lat.vertex(k));
    const double d1 = detail::lattice_offset(v[0], u[0], n);
    const double d2 = detail::lattice_offset(v[1], u[1], n);
    if (detail::in_kernel_interval(d1, p, w, open_first) && detail::in_kernel_interval(d2, q, w, false)) ++count;
  }
  return static_cast<double>(count) / (static_cast<double>(n) * n) / (eps * eps);
}

// ---------------------------------------------------------------------------
// Martingale diagnostics, evaluated exactly from the event log by replaying
// the dynamics with piecewise-constant integrands between events.

struct MartingaleSample {
  double time = 0.0;
  double current = 0.0;       // J^N_t(G)
  double compensator = 0.0;   // int_0^t sum_{unoriented} j_eta(x,y) G_N(x,y) ds
  double residual = 0.0;      // current - compensator
  double quadratic_variation = 0.0;  // N^{-2} int_0^t sum (c_xy + c_yx) G_N^2 ds
};

inline std::vector<MartingaleSample> martingale_diagnostics(const Trajectory& traj, const ModelParams& params,
                                                            const DiscreteVectorField& g_n) {
  if (!traj.events) throw std::invalid_argument("martingale diagnostics need a recorded event log");
  const TorusLattice lat(traj.n);
  RateTable table(lat, traj.initial, params);

  // drift = sum s w G, quad = sum w G^2 on the current configuration.
  double drift = 0.0;
  double quad = 0.0;
  auto recompute = [&] {
    drift = 0.0;
    quad = 0.0;
    for (std::size_t id = 0; id < lat.num_edges(); ++id) {
      drift += table.sign(id) * table.weight(id) * g_n[id];
      quad += table.weight(id) * g_n[id] * g_n[id];
    }
  };
  recompute();

  const double inv_n2 = 1.0 / (static_cast<double>(traj.n) * traj.n);
  double t = 0.0;
  double drift_integral = 0.0;
  double quad_integral = 0.0;
  std::vector<std::int64_t> crossings(lat.num_edges(), 0);
  std::vector<MartingaleSample> out;
  std::size_t snap = 0;
  const auto& log = *traj.events;
  constexpr std::size_t kResync = 4096;
  std::vector<std::size_t> changed;

  auto emit_until = [&](double limit, bool inclusive) {
    while (snap < traj.snapshots.size() &&
           (inclusive ? traj.snapshots[snap].time <= limit : traj.snapshots[snap].time < limit)) {
      const double ts = traj.snapshots[snap].time;
      MartingaleSample m;
      m.time = ts;
      m.current = current_functional(g_n, crossings);
      m.compensator = drift_integral + (ts - t) * drift;
      m.residual = m.current - m.compensator;
      m.quadratic_variation = inv_n2 * (quad_integral + (ts - t) * quad);
      out.push_back(m);
      ++snap;
    }
  };

  for (std::size_t k = 0; k < log.size(); ++k) {
    const double te = log.time[k];
    emit_until(te, false);
    drift_integral += (te - t) * drift;
    quad_integral += (te - t) * quad;
    t = te;
    const std::size_t id = log.edge[k];
    if (table.sign(id) != log.sign[k]) throw std::logic_error("event log inconsistent with replayed dynamics");
    crossings[id] += log.sign[k];
    changed.clear();
    table.apply_jump(id, [&](std::size_t e, double old_w, int old_s) {
      drift -= old_s * old_w * g_n[e];
      quad -= old_w * g_n[e] * g_n[e];
      changed.push_back(e);
    });
    for (std::size_t e : changed) {
      drift += table.sign(e) * table.weight(e) * g_n[e];
      quad += table.weight(e) * g_n[e] * g_n[e];
    }
    if ((k + 1) % kResync == 0) recompute();
  }
  emit_until(std::numeric_limits<double>::infinity(), true);
  return out;
}

// Pairings J^N_t(I^{j,z}) for all Fourier modes with |z|_inf <= zmax; the
// discretized modes are computed once per lattice.
class FourierPairingBank {
 public:
  FourierPairingBank(const TorusLattice& lat, int zmax) : modes_(fourier_modes(zmax)) {
    fields_.reserve(modes_.size());
    for (const auto& m : modes_) fields_.push_back(discretize_field(lat, FourierVectorField::mode(m)));
  }

  const std::vector<FourierMode>& modes() const { return modes_; }

  std::map<FourierMode, double> pair(const std::vector<std::int64_t>& crossings) const {
    std::map<FourierMode, double> out;
    for (std::size_t k = 0; k < modes_.size(); ++k) out[modes_[k]] = current_functional(fields_[k], crossings);
    return out;
  }

 private:
  std::vector<FourierMode> modes_;
  std::vector<DiscreteVectorField> fields_;
};

}  // namespace rotex
