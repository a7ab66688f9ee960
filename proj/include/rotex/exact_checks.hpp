#pragma once

// Finite verification of the exact algebraic identities of the model by
// exhaustive enumeration, in exact rational arithmetic wherever possible.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "rotex/fields.hpp"
#include "rotex/hodge.hpp"
#include "rotex/hydro.hpp"
#include "rotex/model.hpp"
#include "rotex/torus.hpp"

namespace rotex {

using Rational = boost::rational<std::int64_t>;
using BigRational = boost::multiprecision::cpp_rational;

// "1/2", "-3/4", "0.7", "2": decimals are converted exactly.
inline Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(std::stoll(text));
    const std::string digits = text.substr(dot + 1);
    if (digits.size() > 15) throw std::invalid_argument("too many decimals");
    std::int64_t den = 1;
    for (std::size_t k = 0; k < digits.size(); ++k) den *= 10;
    const bool negative = !text.empty() && text[0] == '-';
    const std::string whole = text.substr(0, dot);
    const std::int64_t w = whole.empty() || whole == "-" || whole == "+" ? 0 : std::llabs(std::stoll(whole));
    const std::int64_t frac = digits.empty() ? 0 : std::stoll(digits);
    const Rational r(w * den + frac, den);
    return negative ? -r : r;
  } catch (const std::logic_error&) {
    throw std::invalid_argument("cannot parse '" + text + "' as a rational number");
  }
}

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }
inline double to_double(const BigRational& r) { return r.convert_to<double>(); }

struct CheckReport {
  std::string name;
  std::uint64_t instances = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double runtime_seconds = 0.0;
  std::string detail;
};

namespace detail {

// Splits [0, count) into chunks over worker threads; each chunk returns its
// maximal violation, reduced by max.
inline double parallel_max(std::uint64_t count, const std::function<double(std::uint64_t, std::uint64_t)>& chunk) {
  const unsigned workers = std::max(1U, std::min<unsigned>(std::thread::hardware_concurrency(), 16));
  if (workers == 1 || count < 1024) return chunk(0, count);
  std::vector<double> partial(workers, 0.0);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::uint64_t lo = count * w / workers, hi = count * (w + 1) / workers;
        try {
          partial[w] = chunk(lo, hi);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return *std::max_element(partial.begin(), partial.end());
}

inline std::uint64_t configuration_count(int n) {
  if (n * n > 30) throw std::invalid_argument("exhaustive enumeration is limited to N <= 5");
  return std::uint64_t{1} << (n * n);
}

template <class Body>
CheckReport timed(std::string name, double tolerance, Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckReport r;
  r.name = std::move(name);
  r.tolerance = tolerance;
  body(r);
  r.pass = r.max_violation <= tolerance;
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace detail

// sum_{(x,y)} c_{x,y}(eta) == sum_{(x,y)} c_{y,x}(eta^{x,y}) for every eta.
inline CheckReport verify_invariance(int n, Rational alpha, RateMutation mutation = RateMutation::None) {
  return detail::timed("invariance", 0.0, [&](CheckReport& r) {
    const TorusLattice lat(n);
    const FaceRule<Rational> rule{alpha, mutation};
    const std::uint64_t count = detail::configuration_count(n);
    r.instances = count;
    r.max_violation = detail::parallel_max(count, [&](std::uint64_t lo, std::uint64_t hi) {
      double worst = 0.0;
      for (std::uint64_t bits = lo; bits < hi; ++bits) {
        const auto eta = Configuration::from_bits(n, bits);
        Rational lhs = 0, rhs = 0;
        for (std::size_t k = 0; k < lat.num_vertices(); ++k) {
          for (Dir d : kAllDirs) {
            const DirectedEdge e{lat.vertex(k), d};
            lhs += jump_rate(lat, eta, e, rule);
            if (eta.at(lat, e.tail) != eta.at(lat, lat.head(e))) {
              rhs += jump_rate(lat, swap(lat, eta, e), lat.reverse(e), rule);
            } else {
              rhs += jump_rate(lat, eta, lat.reverse(e), rule);
            }
          }
        }
        worst = std::max(worst, std::abs(to_double(lhs - rhs)));
      }
      return worst;
    });
  });
}

struct FaceIdentityRow {
  FacePattern pattern = 0;
  Rational anticlockwise = 0;
  Rational clockwise = 0;
};

// Per-face sums sum_{(x,y) in f} eta(x) [g(eta) + g(eta^{x,y})] around both
// orientations, for all 16 occupation patterns of one face.
inline std::vector<FaceIdentityRow> face_identity_table(Rational alpha, RateMutation mutation = RateMutation::None) {
  const TorusLattice lat(3);
  const FaceRule<Rational> rule{alpha, mutation};
  const Vertex anchor{0, 0};
  const auto corners = lat.face_corners(anchor);
  std::vector<FaceIdentityRow> rows;
  for (FacePattern p = 0; p < 16; ++p) {
    Configuration eta(3);
    for (int k = 0; k < 4; ++k) eta.set(lat.index(corners[k]), (p >> k) & 1U);
    auto side = [&](Orientation o) {
      Rational s = 0;
      for (const auto& e : lat.face_edges({anchor, o})) {
        if (!eta.at(lat, e.tail)) continue;
        s += g_value(lat, eta, anchor, rule) + g_value(lat, swap(lat, eta, e), anchor, rule);
      }
      return s;
    };
    rows.push_back({p, side(Orientation::Anticlockwise), side(Orientation::Clockwise)});
  }
  return rows;
}

inline CheckReport verify_face_identity(Rational alpha, RateMutation mutation = RateMutation::None) {
  return detail::timed("face-identity", 0.0, [&](CheckReport& r) {
    const auto rows = face_identity_table(alpha, mutation);
    r.instances = rows.size();
    for (const auto& row : rows) {
      r.max_violation = std::max(r.max_violation, std::abs(to_double(row.anticlockwise - row.clockwise)));
      if (row.pattern == kDiagonalMain || row.pattern == kDiagonalAnti) {
        // Each side of an activated face carries two edges labelled alpha.
        r.max_violation = std::max(r.max_violation, std::abs(to_double(row.anticlockwise - 2 * alpha)));
      }
    }
  });
}

// (i) j = j_grad + j_circ on every edge, (ii) div j_circ = 0 at every vertex,
// (iii) sum_x j(x, x + e_k) = 0 for k = 1, 2; exhaustively over configurations.
inline CheckReport verify_current_structure(int n, Rational alpha, RateMutation mutation = RateMutation::None) {
  return detail::timed("current-structure", 0.0, [&](CheckReport& r) {
    const TorusLattice lat(n);
    const FaceRule<Rational> rule{alpha, mutation};
    const std::uint64_t count = detail::configuration_count(n);
    r.instances = count;
    r.max_violation = detail::parallel_max(count, [&](std::uint64_t lo, std::uint64_t hi) {
      double worst = 0.0;
      for (std::uint64_t bits = lo; bits < hi; ++bits) {
        const auto eta = Configuration::from_bits(n, bits);
        Rational axis_sum[2] = {0, 0};
        std::vector<Rational> circ(lat.num_edges());
        for (std::size_t id = 0; id < lat.num_edges(); ++id) {
          const auto split = instantaneous_current(lat, eta, lat.canonical_edge(id), rule);
          worst = std::max(worst, std::abs(to_double(split.total - split.grad_part - split.circ_part)));
          circ[id] = split.circ_part;
          axis_sum[id % 2] += split.total;
        }
        for (std::size_t k = 0; k < lat.num_vertices(); ++k) {
          Rational div = 0;
          for (Dir d : kAllDirs) {
            const auto ref = lat.edge_ref({lat.vertex(k), d});
            div += ref.sign * circ[ref.id];
          }
          worst = std::max(worst, std::abs(to_double(div)));
        }
        worst = std::max({worst, std::abs(to_double(axis_sum[0])), std::abs(to_double(axis_sum[1]))});
      }
      return worst;
    });
  });
}

// Harmonic component of hodge_decompose(j_eta) for every configuration.
inline CheckReport verify_current_harmonic_part(int n, double alpha, RateMutation mutation = RateMutation::None,
                                                double tolerance = 1e-10) {
  return detail::timed("current-harmonic", tolerance, [&](CheckReport& r) {
    const TorusLattice lat(n);
    const FaceRule<double> rule{alpha, mutation};
    const std::uint64_t count = detail::configuration_count(n);
    r.instances = count;
    r.max_violation = detail::parallel_max(count, [&](std::uint64_t lo, std::uint64_t hi) {
      double worst = 0.0;
      for (std::uint64_t bits = lo; bits < hi; ++bits) {
        const auto eta = Configuration::from_bits(n, bits);
        DiscreteVectorField j(n);
        for (std::size_t id = 0; id < lat.num_edges(); ++id) {
          j[id] = instantaneous_current(lat, eta, lat.canonical_edge(id), rule).total;
        }
        // Decomposition residuals are checked inside; a mutated rate still
        // decomposes, only its harmonic part becomes visible.
        const auto parts = hodge_decompose(lat, j, 1e-9);
        worst = std::max({worst, std::abs(parts.harmonic_coef[0]), std::abs(parts.harmonic_coef[1])});
      }
      return worst;
    });
  });
}

// ---------------------------------------------------------------------------
// Grandcanonical expectations over a finite window of sites, exact in rho.

// fn receives the window occupations as a bit mask (bit k = site k).
template <class Fn>
BigRational grandcanonical_expectation(Fn&& fn, int window, const BigRational& rho) {
  if (window < 0 || window > 20) throw std::invalid_argument("window must hold at most 20 sites");
  if (rho < 0 || rho > 1) throw std::domain_error("density outside [0, 1]");
  BigRational total = 0;
  const BigRational q = 1 - rho;
  for (std::uint32_t mask = 0; mask < (1U << window); ++mask) {
    const int ones = std::popcount(mask);
    BigRational w = 1;
    for (int k = 0; k < ones; ++k) w *= rho;
    for (int k = ones; k < window; ++k) w *= q;
    if (w == 0) continue;
    total += w * BigRational(fn(mask));
  }
  return total;
}

inline BigRational to_big(const Rational& r) { return BigRational(r.numerator()) / BigRational(r.denominator()); }

// E[g] over one face: bits are the four corners in (anchor, +e1, +e1+e2, +e2) order.
inline BigRational expected_face_weight(const Rational& alpha, const BigRational& rho,
                                        RateMutation mutation = RateMutation::None) {
  const FaceRule<Rational> rule{alpha, mutation};
  return grandcanonical_expectation([&](std::uint32_t mask) { return to_big(rule(mask)); }, 4, rho);
}

// Window of a vertical edge (x, x+e2) together with its two faces:
// sites 0: x, 1: x+e2, 2: x-e1, 3: x-e1+e2, 4: x+e1, 5: x+e1+e2.
// f+ = face anchored at x-e1 (corners 2, 0, 1, 3), f- = face at x (0, 4, 5, 1).
inline BigRational mixed_expectation(const Rational& alpha, const BigRational& rho,
                                     RateMutation mutation = RateMutation::None) {
  const FaceRule<Rational> rule{alpha, mutation};
  auto bit = [](std::uint32_t m, int k) { return (m >> k) & 1U; };
  auto pattern = [&](std::uint32_t m, int c0, int c1, int c2, int c3) {
    return bit(m, c0) | (bit(m, c1) << 1) | (bit(m, c2) << 2) | (bit(m, c3) << 3);
  };
  return grandcanonical_expectation(
      [&](std::uint32_t m) {
        const int grad = static_cast<int>(bit(m, 0)) - static_cast<int>(bit(m, 1));
        const Rational circ = rule(pattern(m, 2, 0, 1, 3)) - rule(pattern(m, 0, 4, 5, 1));
        return to_big(grad * circ);
      },
      6, rho);
}

inline BigRational expected_squared_gradient(const BigRational& rho) {
  return grandcanonical_expectation(
      [](std::uint32_t m) {
        const int d = static_cast<int>(m & 1U) - static_cast<int>((m >> 1) & 1U);
        return BigRational(d * d);
      },
      2, rho);
}

// E[g] = 2 alpha rho^2 (1-rho)^2 at rho = k/10, E[(eta(x)-eta(y))^2] =
// 2 rho (1-rho), the mixed expectation is 0, all exact; plus the floating
// closed form of a(rho) and the Einstein gap on a grid of (0,1).
inline CheckReport verify_coefficients(Rational alpha, RateMutation mutation = RateMutation::None) {
  return detail::timed("coefficients", 0.0, [&](CheckReport& r) {
    const BigRational a = to_big(alpha);
    double worst = 0.0;
    for (int k = 1; k <= 9; ++k) {
      const BigRational rho(BigRational(k) / 10);
      const BigRational m = rho * (1 - rho);
      worst = std::max(worst, abs(to_double(expected_face_weight(alpha, rho, mutation) - 2 * a * m * m)));
      worst = std::max(worst, abs(to_double(expected_squared_gradient(rho) - 2 * m)));
      worst = std::max(worst, abs(to_double(mixed_expectation(alpha, rho, mutation))));
      r.instances += 3;
    }
    r.max_violation = worst;
  });
}

// Closed-form a(rho) in double precision against the exact expectation, and
// the Einstein relation on a grid of (0, 1).
inline CheckReport verify_closed_forms(const Rational& alpha, RateMutation mutation = RateMutation::None,
                                       double tolerance = 1e-12) {
  const double alpha_value = to_double(alpha);
  return detail::timed("closed-forms", tolerance, [&](CheckReport& r) {
    for (int k = 1; k <= 9; ++k) {
      const double rho = k / 10.0;
      const double exact = to_double(expected_face_weight(alpha, BigRational(k) / 10, mutation));
      r.max_violation = std::max(r.max_violation, std::abs(circulation_coefficient(rho, alpha_value) - exact));
      ++r.instances;
    }
    for (int k = 1; k < 100; ++k) {
      const auto c = coefficients(k / 100.0, alpha_value);
      r.max_violation = std::max(r.max_violation, *c.einstein_gap);
      ++r.instances;
    }
  });
}

// ---------------------------------------------------------------------------
// Dirichlet form identity under nu_rho on the N = 3 torus:
//   -<L sqrt f, sqrt f> == 1/2 sum_{(x,y)} E[c_{x,y} (sqrt f(eta^{x,y}) - sqrt f(eta))^2].

struct DirichletSides {
  double generator_side = 0.0;
  double dirichlet_side = 0.0;
};

inline DirichletSides dirichlet_sides(int n, double rho, double alpha, const std::function<double(std::uint64_t)>& density,
                                      RateMutation mutation = RateMutation::None) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("density must lie in (0, 1)");
  const TorusLattice lat(n);
  const FaceRule<double> rule{alpha, mutation};
  const std::uint64_t count = detail::configuration_count(n);
  std::vector<double> weight(count), f(count);
  double norm = 0.0;
  for (std::uint64_t b = 0; b < count; ++b) {
    const int ones = std::popcount(b);
    weight[b] = std::pow(rho, ones) * std::pow(1.0 - rho, n * n - ones);
    f[b] = density(b);
    if (!(f[b] > 0.0)) throw std::invalid_argument("density function must be positive");
    norm += weight[b] * f[b];
  }
  std::vector<double> root(count);
  for (std::uint64_t b = 0; b < count; ++b) root[b] = std::sqrt(f[b] / norm);

  DirichletSides out;
  for (std::uint64_t b = 0; b < count; ++b) {
    const auto eta = Configuration::from_bits(n, b);
    double gen = 0.0, dir = 0.0;
    for (std::size_t k = 0; k < lat.num_vertices(); ++k) {
      for (Dir d : kAllDirs) {
        const DirectedEdge e{lat.vertex(k), d};
        const double c = jump_rate(lat, eta, e, rule);
        if (c == 0.0) continue;
        const std::size_t x = lat.index(e.tail), y = lat.index(lat.head(e));
        const std::uint64_t swapped = b ^ (std::uint64_t{1} << x) ^ (std::uint64_t{1} << y);
        const double diff = root[swapped] - root[b];
        gen += c * diff * root[b];
        dir += c * diff * diff;
      }
    }
    out.generator_side -= weight[b] * gen;
    out.dirichlet_side += 0.5 * weight[b] * dir;
  }
  return out;
}

struct NamedDensity {
  std::string name;
  std::function<double(std::uint64_t)> fn;
};

// exp(beta * #particles), a position-weighted exponential, and a fixed random
// positive table. The first is conserved by the dynamics and so tests only
// the trivial case; the other two exercise invariance.
inline std::vector<NamedDensity> dirichlet_test_densities(int n) {
  std::vector<NamedDensity> out;
  out.push_back({"exp-particle-count", [](std::uint64_t b) { return std::exp(0.3 * std::popcount(b)); }});
  out.push_back({"exp-position-weighted", [n](std::uint64_t b) {
                   double s = 0.0;
                   for (int k = 0; k < n * n; ++k) {
                     if ((b >> k) & 1U) s += 0.1 * (k % n) + 0.25 * (k / n) - 0.05 * k;
                   }
                   return std::exp(s);
                 }});
  const std::uint64_t count = detail::configuration_count(n);
  auto table = std::make_shared<std::vector<double>>(count);
  std::mt19937_64 rng(20240531);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (auto& v : *table) v = u(rng);
  out.push_back({"random-table", [table](std::uint64_t b) { return (*table)[b]; }});
  return out;
}

inline CheckReport verify_dirichlet_identity(int n, double rho, double alpha,
                                             RateMutation mutation = RateMutation::None, double tolerance = 1e-12) {
  return detail::timed("dirichlet", tolerance, [&](CheckReport& r) {
    for (const auto& d : dirichlet_test_densities(n)) {
      const auto s = dirichlet_sides(n, rho, alpha, d.fn, mutation);
      r.max_violation = std::max(r.max_violation, std::abs(s.generator_side - s.dirichlet_side));
      r.instances += detail::configuration_count(n);
    }
  });
}

// ---------------------------------------------------------------------------
// Detailed balance under the uniform canonical measure requires
// c_{x,y}(eta) == c_{y,x}(eta^{x,y}); returns the first violating pair.

struct BalanceWitness {
  std::string configuration;
  Vertex tail;
  Dir dir = Dir::East;
  Rational forward = 0;
  Rational backward = 0;
};

inline std::optional<BalanceWitness> detailed_balance_witness(int n, Rational alpha) {
  const TorusLattice lat(n);
  const FaceRule<Rational> rule{alpha, RateMutation::None};
  for (std::uint64_t bits = 0; bits < detail::configuration_count(n); ++bits) {
    const auto eta = Configuration::from_bits(n, bits);
    for (std::size_t k = 0; k < lat.num_vertices(); ++k) {
      for (Dir d : kAllDirs) {
        const DirectedEdge e{lat.vertex(k), d};
        const Rational fwd = jump_rate(lat, eta, e, rule);
        if (fwd == Rational(0)) continue;
        const Rational bwd = jump_rate(lat, swap(lat, eta, e), lat.reverse(e), rule);
        if (fwd != bwd) return BalanceWitness{eta.to_string(), e.tail, d, fwd, bwd};
      }
    }
  }
  return std::nullopt;
}

// The mutation each check is documented to detect.
inline RateMutation documented_mutation(const std::string& check) {
  if (check == "current-structure" || check == "current-harmonic") return RateMutation::AdjacentPairFires;
  return RateMutation::DoubleMainDiagonal;
}

}  // namespace rotex
