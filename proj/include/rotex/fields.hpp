#pragma once

// Discrete vector fields and 2-forms on the torus, their elementary
// operators, continuum Fourier test fields, line-integral discretization and
// the truncated dual Sobolev norm.

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "rotex/torus.hpp"

namespace rotex {

using Point = std::array<double, 2>;

// Antisymmetric edge function. One value per unoriented edge, read on the
// canonical (rightward / upward) orientation; the reversed edge carries the
// negated value, so antisymmetry holds by construction.
class DiscreteVectorField {
 public:
  DiscreteVectorField() = default;
  explicit DiscreteVectorField(int n) : n_(n), v_(2 * static_cast<std::size_t>(n) * n, 0.0) {}

  int side() const { return n_; }
  std::size_t size() const { return v_.size(); }

  double& operator[](std::size_t id) { return v_[id]; }
  double operator[](std::size_t id) const { return v_[id]; }

  double at(const TorusLattice& lat, const DirectedEdge& e) const {
    const auto r = lat.edge_ref(e);
    return r.sign * v_[r.id];
  }
  void set(const TorusLattice& lat, const DirectedEdge& e, double value) {
    const auto r = lat.edge_ref(e);
    v_[r.id] = r.sign * value;
  }

  const std::vector<double>& values() const { return v_; }

  DiscreteVectorField& operator+=(const DiscreteVectorField& o) {
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
    return *this;
  }
  DiscreteVectorField& operator-=(const DiscreteVectorField& o) {
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
    return *this;
  }
  DiscreteVectorField& operator*=(double s) {
    for (auto& x : v_) x *= s;
    return *this;
  }
  friend DiscreteVectorField operator+(DiscreteVectorField a, const DiscreteVectorField& b) { return a += b; }
  friend DiscreteVectorField operator-(DiscreteVectorField a, const DiscreteVectorField& b) { return a -= b; }
  friend DiscreteVectorField operator*(double s, DiscreteVectorField a) { return a *= s; }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  int n_ = 0;
  std::vector<double> v_;
};

// <phi, psi> summed over directed edges (each unoriented edge counted twice).
inline double inner(const DiscreteVectorField& a, const DiscreteVectorField& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return 2.0 * s;
}

// 2-form stored on anticlockwise faces, indexed by the anchor's vertex index;
// the clockwise face carries the negated value.
class TwoForm {
 public:
  TwoForm() = default;
  explicit TwoForm(int n) : n_(n), v_(static_cast<std::size_t>(n) * n, 0.0) {}

  int side() const { return n_; }
  std::size_t size() const { return v_.size(); }
  double& operator[](std::size_t k) { return v_[k]; }
  double operator[](std::size_t k) const { return v_[k]; }

  double at(const TorusLattice& lat, const OrientedFace& f) const {
    const double v = v_[lat.index(f.anchor)];
    return f.orientation == Orientation::Anticlockwise ? v : -v;
  }

 private:
  int n_ = 0;
  std::vector<double> v_;
};

// Sum of phi over the four edges leaving x.
inline double divergence(const TorusLattice& lat, const DiscreteVectorField& phi, Vertex x) {
  double s = 0.0;
  for (Dir d : kAllDirs) s += phi.at(lat, {x, d});
  return s;
}

inline std::vector<double> divergence(const TorusLattice& lat, const DiscreteVectorField& phi) {
  std::vector<double> out(lat.num_vertices());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = divergence(lat, phi, lat.vertex(k));
  return out;
}

inline DiscreteVectorField gradient(const TorusLattice& lat, const std::vector<double>& f) {
  DiscreteVectorField g(lat.side());
  for (std::size_t id = 0; id < lat.num_edges(); ++id) {
    const auto e = lat.canonical_edge(id);
    g[id] = f[lat.index(lat.head(e))] - f[lat.index(e.tail)];
  }
  return g;
}

// delta psi(e) = psi(f+(e)) - psi(f-(e)).
inline DiscreteVectorField two_form_boundary(const TorusLattice& lat, const TwoForm& psi) {
  DiscreteVectorField out(lat.side());
  for (std::size_t id = 0; id < lat.num_edges(); ++id) {
    const auto [fp, fm] = lat.adjacent_faces(lat.canonical_edge(id));
    out[id] = psi.at(lat, fp) - psi.at(lat, fm);
  }
  return out;
}

// Sum of phi along the traversal of the face (a discrete curl).
inline double face_circulation(const TorusLattice& lat, const DiscreteVectorField& phi,
                               const OrientedFace& f) {
  double s = 0.0;
  for (const auto& e : lat.face_edges(f)) s += phi.at(lat, e);
  return s;
}

// phi^(i)(x, x + e^(j)) = delta_ij, i in {1, 2}.
inline DiscreteVectorField harmonic_basis(const TorusLattice& lat, int i) {
  if (i != 1 && i != 2) throw std::invalid_argument("harmonic basis index must be 1 or 2");
  DiscreteVectorField h(lat.side());
  for (std::size_t id = 0; id < lat.num_edges(); ++id) h[id] = (id % 2 == static_cast<std::size_t>(i - 1)) ? 1.0 : 0.0;
  return h;
}

// ---------------------------------------------------------------------------
// Fourier test fields.
//
// h_0 = 1, h_z(u) = sqrt2 cos(2 pi z.u) for z > 0 and sqrt2 sin(2 pi z.u) for
// z < 0 in lexicographic order. I^{j,z} is the vector field with h_z in
// component j and 0 in the other.

struct FourierMode {
  int component = 1;  // j in {1, 2}
  int z1 = 0;
  int z2 = 0;

  double eigenvalue() const {
    return 1.0 + 4.0 * std::numbers::pi * std::numbers::pi * (double(z1) * z1 + double(z2) * z2);
  }

  friend auto operator<=>(const FourierMode&, const FourierMode&) = default;
};

inline bool lexicographically_positive(int z1, int z2) { return z1 > 0 || (z1 == 0 && z2 > 0); }

// Value and gradient of h_z at u.
struct BasisEval {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

inline BasisEval fourier_basis(int z1, int z2, const Point& u) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (z1 == 0 && z2 == 0) return {1.0, 0.0, 0.0};
  const double phase = kTwoPi * (z1 * u[0] + z2 * u[1]);
  const double c = std::numbers::sqrt2 * std::cos(phase);
  const double s = std::numbers::sqrt2 * std::sin(phase);
  if (lexicographically_positive(z1, z2)) return {c, -kTwoPi * z1 * s, -kTwoPi * z2 * s};
  return {s, kTwoPi * z1 * c, kTwoPi * z2 * c};
}

// Exact integral of h_z along the axis-parallel segment u0 -> u0 + length e_axis.
inline double fourier_basis_segment_integral(int z1, int z2, const Point& u0, int axis, double length) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const int za = axis == 0 ? z1 : z2;
  if (za == 0) return fourier_basis(z1, z2, u0).value * length;
  const double w = kTwoPi * za;
  const double p0 = kTwoPi * (z1 * u0[0] + z2 * u0[1]);
  const double p1 = p0 + w * length;
  if (z1 == 0 && z2 == 0) return length;
  if (lexicographically_positive(z1, z2)) {
    return std::numbers::sqrt2 * (std::sin(p1) - std::sin(p0)) / w;
  }
  return -std::numbers::sqrt2 * (std::cos(p1) - std::cos(p0)) / w;
}

struct FourierTerm {
  FourierMode mode;
  double coef = 0.0;
};

// Finite linear combination of I^{j,z}; values, divergence, curl and line
// integrals are all closed form.
class FourierVectorField {
 public:
  FourierVectorField() = default;
  explicit FourierVectorField(std::vector<FourierTerm> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      if (t.mode.component != 1 && t.mode.component != 2) {
        throw std::invalid_argument("Fourier term component must be 1 or 2");
      }
    }
  }

  static FourierVectorField mode(FourierMode m, double coef = 1.0) { return FourierVectorField({{m, coef}}); }
  static FourierVectorField constant(double g1, double g2) {
    return FourierVectorField({{{1, 0, 0}, g1}, {{2, 0, 0}, g2}});
  }

  const std::vector<FourierTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Point value(const Point& u) const {
    Point g{0.0, 0.0};
    for (const auto& t : terms_) g[t.mode.component - 1] += t.coef * fourier_basis(t.mode.z1, t.mode.z2, u).value;
    return g;
  }

  double divergence(const Point& u) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      const auto b = fourier_basis(t.mode.z1, t.mode.z2, u);
      s += t.coef * (t.mode.component == 1 ? b.d1 : b.d2);
    }
    return s;
  }

  // -d2 G1 + d1 G2
  double curl(const Point& u) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      const auto b = fourier_basis(t.mode.z1, t.mode.z2, u);
      s += t.coef * (t.mode.component == 1 ? -b.d2 : b.d1);
    }
    return s;
  }

  double line_integral(const Point& u0, int axis, double length) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      if (t.mode.component - 1 != axis) continue;
      s += t.coef * fourier_basis_segment_integral(t.mode.z1, t.mode.z2, u0, axis, length);
    }
    return s;
  }

  // sup_i sup_u |G_i(u)|, estimated on a uniform grid of the given resolution.
  double sup_norm(int resolution = 256) const {
    double m = 0.0;
    for (int a = 0; a < resolution; ++a) {
      for (int b = 0; b < resolution; ++b) {
        const auto g = value({double(a) / resolution, double(b) / resolution});
        m = std::max({m, std::abs(g[0]), std::abs(g[1])});
      }
    }
    return m;
  }

 private:
  std::vector<FourierTerm> terms_;
};

// G_N(x, y) = line integral of G along the segment (x, y), 4-point
// Gauss-Legendre per segment. G is any callable Point -> Point.
template <class Field>
  requires std::invocable<Field&, const Point&>
DiscreteVectorField discretize_field(const TorusLattice& lat, Field&& g) {
  using Quad = boost::math::quadrature::gauss<double, 4>;
  DiscreteVectorField out(lat.side());
  const double h = lat.mesh();
  for (std::size_t id = 0; id < lat.num_edges(); ++id) {
    const auto e = lat.canonical_edge(id);
    const auto p = lat.position(e.tail);
    const int axis = static_cast<int>(id % 2);
    out[id] = Quad::integrate(
        [&](double s) {
          Point q = p;
          q[axis] += s;
          return g(q)[axis];
        },
        0.0, h);
  }
  return out;
}

// Closed-form discretization of a Fourier field.
inline DiscreteVectorField discretize_field(const TorusLattice& lat, const FourierVectorField& g) {
  DiscreteVectorField out(lat.side());
  for (std::size_t id = 0; id < lat.num_edges(); ++id) {
    const auto e = lat.canonical_edge(id);
    out[id] = g.line_integral(lat.position(e.tail), static_cast<int>(id % 2), lat.mesh());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truncated H_{-k} norm: sum over j and |z|_inf <= zmax of gamma_z^{-k} phi(I^{j,z})^2.

struct DualNorm {
  double squared = 0.0;
  // Contribution of the outermost shell |z|_inf == zmax.
  double last_shell = 0.0;
};

inline constexpr double kCriticalSobolevIndex = 2.0;

inline DualNorm sobolev_dual_norm(const std::map<FourierMode, double>& pairings, double k, int zmax) {
  if (!(k > kCriticalSobolevIndex)) {
    throw std::invalid_argument("dual Sobolev index k = " + std::to_string(k) +
                                " must exceed k* = 2 for the defining sum to converge");
  }
  if (zmax < 0) throw std::invalid_argument("zmax must be non-negative");
  DualNorm out;
  for (int j = 1; j <= 2; ++j) {
    for (int z1 = -zmax; z1 <= zmax; ++z1) {
      for (int z2 = -zmax; z2 <= zmax; ++z2) {
        const FourierMode m{j, z1, z2};
        const auto it = pairings.find(m);
        if (it == pairings.end()) {
          throw std::invalid_argument("missing pairing for mode (j=" + std::to_string(j) + ", z=(" +
                                      std::to_string(z1) + "," + std::to_string(z2) + "))");
        }
        const double c = std::pow(m.eigenvalue(), -k) * it->second * it->second;
        out.squared += c;
        if (std::max(std::abs(z1), std::abs(z2)) == zmax) out.last_shell += c;
      }
    }
  }
  return out;
}

inline std::vector<FourierMode> fourier_modes(int zmax) {
  std::vector<FourierMode> modes;
  for (int j = 1; j <= 2; ++j)
    for (int z1 = -zmax; z1 <= zmax; ++z1)
      for (int z2 = -zmax; z2 <= zmax; ++z2) modes.push_back({j, z1, z2});
  return modes;
}

}  // namespace rotex
