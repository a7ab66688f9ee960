#pragma once

// Discrete Hodge decomposition on the torus:
//   Gamma^1 = grad Gamma^0 (+) delta Gamma^2 (+) Gamma^1_H.
//
// The gradient potential solves the graph Poisson equation
// div grad f = div phi through the FFT-diagonalized Laplacian; the harmonic
// part is given by the two axis means; the circulation is the remainder,
// checked to be divergence-free with zero axis means.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotex/fft.hpp"
#include "rotex/fields.hpp"
#include "rotex/torus.hpp"

namespace rotex {

struct HodgeParts {
  DiscreteVectorField grad;
  DiscreteVectorField circ;
  DiscreteVectorField harm;
  std::vector<double> potential;  // zero-mean f with grad = grad f
  double harmonic_coef[2] = {0.0, 0.0};
  // max |div circ| and max |axis mean of circ| after the split.
  double residual = 0.0;
};

// Zero-mean solution of div grad f = rhs (rhs must have zero sum).
inline std::vector<double> solve_graph_poisson(const TorusLattice& lat, const std::vector<double>& rhs) {
  const int n = lat.side();
  Fft2d fft(n);
  auto spec = fft.forward(rhs);
  fft.apply(spec, [n](int k1, int k2) {
    if (k1 == 0 && k2 == 0) return 0.0;
    const double lambda = 2.0 * std::cos(2.0 * std::numbers::pi * k1 / n) +
                          2.0 * std::cos(2.0 * std::numbers::pi * k2 / n) - 4.0;
    return 1.0 / lambda;
  });
  return fft.inverse(spec);
}

inline double axis_mean(const DiscreteVectorField& phi, int axis) {
  double s = 0.0;
  for (std::size_t id = static_cast<std::size_t>(axis); id < phi.size(); id += 2) s += phi[id];
  return s / (phi.size() / 2);
}

inline HodgeParts hodge_decompose(const TorusLattice& lat, const DiscreteVectorField& phi,
                                  double tolerance = 1e-9) {
  HodgeParts out;
  out.harmonic_coef[0] = axis_mean(phi, 0);
  out.harmonic_coef[1] = axis_mean(phi, 1);
  out.harm = out.harmonic_coef[0] * harmonic_basis(lat, 1) + out.harmonic_coef[1] * harmonic_basis(lat, 2);

  out.potential = solve_graph_poisson(lat, divergence(lat, phi));
  out.grad = gradient(lat, out.potential);
  out.circ = phi - out.grad - out.harm;

  const auto div_circ = divergence(lat, out.circ);
  double res = 0.0;
  for (double d : div_circ) res = std::max(res, std::abs(d));
  res = std::max({res, std::abs(axis_mean(out.circ, 0)), std::abs(axis_mean(out.circ, 1))});
  out.residual = res;
  const double scale = std::max(1.0, phi.max_abs());
  if (res > tolerance * scale) {
    throw std::runtime_error("Hodge decomposition residual " + std::to_string(res) +
                             " exceeds tolerance " + std::to_string(tolerance * scale));
  }
  return out;
}

}  // namespace rotex
