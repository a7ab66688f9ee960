#pragma once

// Continuum reference objects: transport coefficients, the heat flow, the
// drift-diffusion equation under a weak field, and predicted current pairings.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "rotex/fft.hpp"
#include "rotex/fields.hpp"

namespace rotex {

using Matrix2 = std::array<std::array<double, 2>, 2>;

struct Coefficients {
  double rho = 0.0;
  double alpha = 0.0;
  double a = 0.0;        // 2 alpha rho^2 (1 - rho)^2
  double a_prime = 0.0;  // 4 alpha rho (1 - rho)(1 - 2 rho)
  Matrix2 A{};           // [[0, -a'], [a', 0]]
  Matrix2 sigma{};       // rho (1 - rho) Identity
  double f = 0.0;        // rho log rho + (1 - rho) log(1 - rho)
  // f'' and the Einstein gap are undefined at rho in {0, 1}.
  std::optional<double> f_second;
  std::optional<double> einstein_gap;
};

inline void check_density(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("density " + std::to_string(rho) + " outside [0, 1]");
}

inline double circulation_coefficient(double rho, double alpha) {
  check_density(rho);
  const double m = rho * (1.0 - rho);
  return 2.0 * alpha * m * m;
}

inline double circulation_coefficient_derivative(double rho, double alpha) {
  check_density(rho);
  return 4.0 * alpha * rho * (1.0 - rho) * (1.0 - 2.0 * rho);
}

inline double mobility(double rho) {
  check_density(rho);
  return rho * (1.0 - rho);
}

inline double free_energy(double rho) {
  check_density(rho);
  auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
  return xlogx(rho) + xlogx(1.0 - rho);
}

inline double free_energy_curvature(double rho) {
  check_density(rho);
  if (rho == 0.0 || rho == 1.0) throw std::domain_error("f'' is singular at rho = 0 and rho = 1");
  return 1.0 / (rho * (1.0 - rho));
}

inline Coefficients coefficients(double rho, double alpha) {
  Coefficients c;
  c.rho = rho;
  c.alpha = alpha;
  c.a = circulation_coefficient(rho, alpha);
  c.a_prime = circulation_coefficient_derivative(rho, alpha);
  c.A = {{{0.0, -c.a_prime}, {c.a_prime, 0.0}}};
  const double s = mobility(rho);
  c.sigma = {{{s, 0.0}, {0.0, s}}};
  c.f = free_energy(rho);
  if (rho > 0.0 && rho < 1.0) {
    c.f_second = free_energy_curvature(rho);
    // Frobenius norm of D - sigma f'' with D = Identity.
    double gap = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double d = (i == j ? 1.0 : 0.0) - c.sigma[i][j] * *c.f_second;
        gap += d * d;
      }
    }
    c.einstein_gap = std::sqrt(gap);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Density fields on the M x M grid u = (i/M, j/M), row-major j * M + i.

struct DensityField {
  int m = 0;
  double t = 0.0;
  std::vector<double> values;

  Point position(std::size_t k) const {
    return {static_cast<double>(k % m) / m, static_cast<double>(k / m) / m};
  }
  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / values.size();
  }
  double min() const { return *std::min_element(values.begin(), values.end()); }
  double max() const { return *std::max_element(values.begin(), values.end()); }
};

template <class Fn>
DensityField sample_profile(Fn&& profile, int m, double t = 0.0) {
  if (m < 2) throw std::invalid_argument("grid size must be at least 2");
  DensityField d{m, t, std::vector<double>(static_cast<std::size_t>(m) * m)};
  for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] = profile(d.position(k));
  return d;
}

// Grid average of fn(u, rho(u)), spectrally accurate for smooth periodic data.
template <class Fn>
double grid_integral(const DensityField& rho, Fn&& fn) {
  double s = 0.0;
  for (std::size_t k = 0; k < rho.values.size(); ++k) s += fn(rho.position(k), rho.values[k]);
  return s / rho.values.size();
}

namespace detail {

// |2 pi k|^2 for the half spectrum entry (row, col).
inline double laplace_symbol(int k1, int k2) {
  const double w1 = 2.0 * std::numbers::pi * k1, w2 = 2.0 * std::numbers::pi * k2;
  return w1 * w1 + w2 * w2;
}

}  // namespace detail

// Exact spectral heat flow of a grid profile.
class HeatFlow {
 public:
  explicit HeatFlow(const DensityField& initial) : m_(initial.m), t0_(initial.t), fft_(initial.m) {
    spectrum_ = fft_.forward(initial.values);
  }

  DensityField at(double t) {
    if (t < t0_) throw std::invalid_argument("heat flow cannot run backwards");
    auto spec = spectrum_;
    const double dt = t - t0_;
    fft_.apply(spec, [dt](int k1, int k2) { return std::exp(-detail::laplace_symbol(k1, k2) * dt); });
    return {m_, t, fft_.inverse(spec)};
  }

 private:
  int m_;
  double t0_;
  Fft2d fft_;
  std::vector<std::complex<double>> spectrum_;
};

inline DensityField solve_heat(const DensityField& initial, double t) { return HeatFlow(initial).at(initial.t + t); }

// Second-order finite differences in space (5-point Laplacian, scaled by M^2)
// with classical RK4 in time; cross-check for the spectral solver.
inline DensityField solve_heat_fd(const DensityField& initial, double t, double dt_factor = 0.1) {
  const int m = initial.m;
  const double h2inv = static_cast<double>(m) * m;
  const int steps = std::max(1, static_cast<int>(std::ceil(t / (dt_factor / h2inv))));
  const double dt = t / steps;
  auto lap = [&](const std::vector<double>& u) {
    std::vector<double> out(u.size());
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        const auto at = [&](int a, int b) { return u[static_cast<std::size_t>((b + m) % m) * m + (a + m) % m]; };
        out[static_cast<std::size_t>(j) * m + i] =
            h2inv * (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4.0 * at(i, j));
      }
    }
    return out;
  };
  auto axpy = [](const std::vector<double>& x, double a, const std::vector<double>& y) {
    std::vector<double> out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] + a * y[k];
    return out;
  };
  std::vector<double> u = initial.values;
  for (int s = 0; s < steps; ++s) {
    const auto k1 = lap(u);
    const auto k2 = lap(axpy(u, 0.5 * dt, k1));
    const auto k3 = lap(axpy(u, 0.5 * dt, k2));
    const auto k4 = lap(axpy(u, dt, k3));
    for (std::size_t k = 0; k < u.size(); ++k) u[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  }
  return {m, initial.t + t, u};
}

// ---------------------------------------------------------------------------
// d rho = div(grad rho - 2 sigma(rho) H), pseudo-spectral with exponential
// (integrating-factor) Euler steps: the diffusion is integrated exactly, the
// drift flux is evaluated on the grid and differentiated spectrally.

struct DriftDiffusionOptions {
  double dt_factor = 0.25;  // dt = dt_factor / M^2
  double max_cfl = 1.0;
};

struct DriftDiffusionResult {
  DensityField rho;
  int steps = 0;
  double dt = 0.0;
  double cfl = 0.0;
};

class DriftDiffusion {
 public:
  DriftDiffusion(int m, const FourierVectorField& h) : m_(m), fft_(m), h1_(m * m), h2_(m * m) {
    DensityField grid{m, 0.0, std::vector<double>(static_cast<std::size_t>(m) * m)};
    for (std::size_t k = 0; k < grid.values.size(); ++k) {
      const auto v = h.value(grid.position(k));
      h1_[k] = v[0];
      h2_[k] = v[1];
      h_sup_ = std::max({h_sup_, std::abs(v[0]), std::abs(v[1])});
    }
  }

  // Advances `rho` by `t`, using the largest step <= dt_factor/M^2 that
  // divides t evenly.
  DriftDiffusionResult run(const DensityField& rho0, double t, const DriftDiffusionOptions& opt = {}) {
    if (rho0.m != m_) throw std::invalid_argument("grid size mismatch");
    DriftDiffusionResult res;
    const double dt_max = opt.dt_factor / (static_cast<double>(m_) * m_);
    res.steps = t > 0.0 ? static_cast<int>(std::ceil(t / dt_max - 1e-12)) : 0;
    res.dt = res.steps > 0 ? t / res.steps : 0.0;
    // sigma <= 1/4, so the drift flux speed is at most |H|/2.
    res.cfl = res.dt * std::numbers::pi * m_ * 0.5 * h_sup_;
    if (res.cfl > opt.max_cfl) {
      throw std::domain_error("drift step rejected: CFL number " + std::to_string(res.cfl) + " exceeds " +
                              std::to_string(opt.max_cfl));
    }
    auto spec = fft_.forward(rho0.values);
    const int h = fft_.half();
    std::vector<double> decay(spec.size()), phi1(spec.size());
    for (int row = 0; row < m_; ++row) {
      const int k2 = fft_.signed_frequency(row);
      for (int k1 = 0; k1 < h; ++k1) {
        const double lam = detail::laplace_symbol(k1, k2);
        const std::size_t idx = static_cast<std::size_t>(row) * h + k1;
        decay[idx] = std::exp(-lam * res.dt);
        phi1[idx] = lam > 0.0 ? -std::expm1(-lam * res.dt) / lam : res.dt;
      }
    }
    for (int s = 0; s < res.steps; ++s) {
      const auto rho = fft_.inverse(spec);
      const auto n_hat = drift_spectrum(rho);
      for (std::size_t k = 0; k < spec.size(); ++k) spec[k] = decay[k] * spec[k] + phi1[k] * n_hat[k];
    }
    res.rho = {m_, rho0.t + t, fft_.inverse(spec)};
    return res;
  }

  // Spectrum of -div(2 sigma(rho) H) on the grid.
  std::vector<std::complex<double>> drift_spectrum(const std::vector<double>& rho) {
    std::vector<double> f1(rho.size()), f2(rho.size());
    for (std::size_t k = 0; k < rho.size(); ++k) {
      const double s = 2.0 * rho[k] * (1.0 - rho[k]);
      f1[k] = s * h1_[k];
      f2[k] = s * h2_[k];
    }
    auto s1 = fft_.forward(f1);
    const auto s2 = fft_.forward(f2);
    const int h = fft_.half();
    for (int row = 0; row < m_; ++row) {
      const int k2 = fft_.signed_frequency(row);
      for (int k1 = 0; k1 < h; ++k1) {
        const std::size_t idx = static_cast<std::size_t>(row) * h + k1;
        // Odd derivatives drop the Nyquist modes.
        const double w1 = (2 * k1 == m_) ? 0.0 : 2.0 * std::numbers::pi * k1;
        const double w2 = (2 * row == m_) ? 0.0 : 2.0 * std::numbers::pi * k2;
        const std::complex<double> div = std::complex<double>(0.0, w1) * s1[idx] + std::complex<double>(0.0, w2) * s2[idx];
        s1[idx] = -div;
      }
    }
    return s1;
  }

 private:
  int m_;
  Fft2d fft_;
  std::vector<double> h1_, h2_;
  double h_sup_ = 0.0;
};

inline DriftDiffusionResult solve_drift_diffusion(const DensityField& initial, const FourierVectorField& h, double t,
                                                  const DriftDiffusionOptions& opt = {}) {
  return DriftDiffusion(initial.m, h).run(initial, t, opt);
}

// H = grad(coef * h_z): d_j h_z = 2 pi z_j h_{-z}.
inline FourierVectorField fourier_gradient(int z1, int z2, double coef) {
  const double w = 2.0 * std::numbers::pi * coef;
  return FourierVectorField({{{1, -z1, -z2}, w * z1}, {{2, -z1, -z2}, w * z2}});
}

// Stationary profile for H = grad V: logit rho = 2V + c with c fixed by the
// mean density.
template <class Fn>
DensityField logit_stationary_profile(Fn&& potential, double mean_density, int m) {
  if (!(mean_density > 0.0 && mean_density < 1.0)) throw std::domain_error("mean density must lie in (0, 1)");
  DensityField v = sample_profile(potential, m);
  auto profile_mean = [&](double c) {
    double s = 0.0;
    for (double x : v.values) s += 1.0 / (1.0 + std::exp(-(2.0 * x + c)));
    return s / v.values.size() - mean_density;
  };
  double lo = -50.0, hi = 50.0;
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(profile_mean, lo, hi,
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
  const double c = 0.5 * (a + b);
  DensityField out = v;
  for (double& x : out.values) x = 1.0 / (1.0 + std::exp(-(2.0 * x + c)));
  return out;
}

// ---------------------------------------------------------------------------
// Predicted current pairing int_0^t int J(rho_s) . G du ds with
// J = -grad rho - A(rho) grad rho (+ 2 sigma(rho) H).

enum class PairingRoute { Weak, Strong };

namespace detail {

// Integrand int J(rho) . G du at one time, on the grid.
inline double current_pairing_density(const DensityField& rho, const FourierVectorField& g, double alpha,
                                      const FourierVectorField* h, PairingRoute route, Fft2d* fft) {
  double s = 0.0;
  if (route == PairingRoute::Weak) {
    s = grid_integral(rho, [&](const Point& u, double r) {
      return r * g.divergence(u) + circulation_coefficient(r, alpha) * g.curl(u);
    });
  } else {
    const int m = rho.m;
    auto spec = fft->forward(rho.values);
    auto d1 = spec, d2 = spec;
    const int hh = fft->half();
    for (int row = 0; row < m; ++row) {
      const int k2 = fft->signed_frequency(row);
      for (int k1 = 0; k1 < hh; ++k1) {
        const std::size_t idx = static_cast<std::size_t>(row) * hh + k1;
        const double w1 = (2 * k1 == m) ? 0.0 : 2.0 * std::numbers::pi * k1;
        const double w2 = (2 * row == m) ? 0.0 : 2.0 * std::numbers::pi * k2;
        d1[idx] *= std::complex<double>(0.0, w1);
        d2[idx] *= std::complex<double>(0.0, w2);
      }
    }
    const auto g1 = fft->inverse(d1), g2 = fft->inverse(d2);
    for (std::size_t k = 0; k < rho.values.size(); ++k) {
      const Point u = rho.position(k);
      const auto gv = g.value(u);
      const double ap = circulation_coefficient_derivative(rho.values[k], alpha);
      // -grad rho - A grad rho, A grad rho = (-a' d2 rho, a' d1 rho)
      const double j1 = -g1[k] + ap * g2[k];
      const double j2 = -g2[k] - ap * g1[k];
      s += j1 * gv[0] + j2 * gv[1];
    }
    s /= rho.values.size();
  }
  if (h) {
    s += grid_integral(rho, [&](const Point& u, double r) {
      const auto hv = h->value(u);
      const auto gv = g.value(u);
      return 2.0 * mobility(r) * (hv[0] * gv[0] + hv[1] * gv[1]);
    });
  }
  return s;
}

}  // namespace detail

struct PairingOptions {
  PairingRoute route = PairingRoute::Weak;
  DriftDiffusionOptions drift;
};

// Without a field the heat flow is evaluated exactly at 20-point
// Gauss-Legendre nodes in time on each of `panels` subintervals; with a field
// the drift-diffusion steps are integrated by the trapezoidal rule.
inline double predicted_current_pairing(const DensityField& initial, const FourierVectorField& g, double t,
                                        double alpha, const std::optional<FourierVectorField>& h = std::nullopt,
                                        const PairingOptions& opt = {}, int panels = 4) {
  if (t < 0.0) throw std::invalid_argument("time must be non-negative");
  if (t == 0.0) return 0.0;
  Fft2d fft(initial.m);
  if (!h) {
    HeatFlow flow(initial);
    using Quad = boost::math::quadrature::gauss<double, 20>;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = t * p / panels, b = t * (p + 1) / panels;
      total += Quad::integrate(
          [&](double s) {
            return detail::current_pairing_density(flow.at(initial.t + s), g, alpha, nullptr, opt.route, &fft);
          },
          a, b);
    }
    return total;
  }
  DriftDiffusion solver(initial.m, *h);
  const double dt_max = opt.drift.dt_factor / (static_cast<double>(initial.m) * initial.m);
  const int steps = static_cast<int>(std::ceil(t / dt_max - 1e-12));
  const double dt = t / steps;
  DriftDiffusionOptions one = opt.drift;
  one.dt_factor = dt * initial.m * initial.m;
  DensityField rho = initial;
  double prev = detail::current_pairing_density(rho, g, alpha, &*h, opt.route, &fft);
  double total = 0.0;
  for (int s = 0; s < steps; ++s) {
    rho = solver.run(rho, dt, one).rho;
    const double cur = detail::current_pairing_density(rho, g, alpha, &*h, opt.route, &fft);
    total += 0.5 * dt * (prev + cur);
    prev = cur;
  }
  return total;
}

// Predicted pairing of the density with a test function, int f rho_t du.
template <class Fn>
double predicted_density_pairing(const DensityField& rho_t, Fn&& f) {
  return grid_integral(rho_t, [&](const Point& u, double r) { return f(u) * r; });
}

}  // namespace rotex
