#pragma once

// Exclusion process with face-rotation rates.
//
// A particle at x jumps to an empty neighbour y with rate
//
//   c_{x,y}(eta) = eta(x)(1 - eta(y)) + eta(x) [ g(f+(x,y)) - g(f-(x,y)) ]
//
// where g(face) = alpha when the face holds exactly two particles at
// opposite corners ("activated" face) and 0 otherwise. A weak external field
// multiplies every rate by exp(H_N(x,y)).
//
// Rates are templated on the scalar type so the same code path runs in
// double precision (simulation) and in exact rational arithmetic (finite
// verification of the algebraic identities).

#include <cassert>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rotex/fields.hpp"
#include "rotex/torus.hpp"

namespace rotex {

class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(int n) : n_(n), occ_(static_cast<std::size_t>(n) * n, 0) {}

  // Bit k of `bits` is the occupation of the vertex with row-major index k.
  static Configuration from_bits(int n, std::uint64_t bits) {
    Configuration c(n);
    for (std::size_t k = 0; k < c.occ_.size(); ++k) c.occ_[k] = (bits >> k) & 1U;
    return c;
  }

  // Row-major string of '0'/'1', rows indexed by j.
  static Configuration from_string(int n, std::string_view s) {
    Configuration c(n);
    if (s.size() != c.occ_.size()) {
      throw std::invalid_argument("configuration string has " + std::to_string(s.size()) +
                                  " sites, expected " + std::to_string(c.occ_.size()));
    }
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] != '0' && s[k] != '1') throw std::invalid_argument("configuration string must be 0/1");
      c.occ_[k] = s[k] == '1';
    }
    return c;
  }

  std::string to_string() const {
    std::string s(occ_.size(), '0');
    for (std::size_t k = 0; k < occ_.size(); ++k) s[k] = occ_[k] ? '1' : '0';
    return s;
  }

  int side() const { return n_; }
  std::size_t size() const { return occ_.size(); }

  std::uint8_t operator[](std::size_t k) const { return occ_[k]; }
  std::uint8_t at(const TorusLattice& lat, Vertex v) const { return occ_[lat.index(v)]; }
  void set(std::size_t k, bool occupied) { occ_[k] = occupied ? 1 : 0; }

  std::size_t particle_count() const {
    std::size_t total = 0;
    for (auto b : occ_) total += b;
    return total;
  }

  void swap_sites(std::size_t a, std::size_t b) { std::swap(occ_[a], occ_[b]); }

  const std::vector<std::uint8_t>& occupations() const { return occ_; }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  int n_ = 0;
  std::vector<std::uint8_t> occ_;
};

// eta^{x,y}: occupations at the two endpoints of e exchanged.
inline Configuration swap(const TorusLattice& lat, const Configuration& eta, const DirectedEdge& e) {
  Configuration out = eta;
  out.swap_sites(lat.index(e.tail), lat.index(lat.head(e)));
  return out;
}

// [tau_z eta](x) = eta(x - z)
inline Configuration translate(const TorusLattice& lat, const Configuration& eta, Vertex z) {
  Configuration out(lat.side());
  for (std::size_t k = 0; k < eta.size(); ++k) {
    out.set(lat.index(lat.translate(lat.vertex(k), z)), eta[k] != 0);
  }
  return out;
}

// Four corner occupations packed as bits (anchor, +e1, +e1+e2, +e2) -> bits 0..3.
using FacePattern = unsigned;

inline FacePattern face_pattern(const TorusLattice& lat, const Configuration& eta, Vertex anchor) {
  const auto c = lat.face_corners(anchor);
  FacePattern p = 0;
  for (int k = 0; k < 4; ++k) p |= static_cast<FacePattern>(eta.at(lat, c[k])) << k;
  return p;
}

inline constexpr FacePattern kDiagonalMain = 0b0101;  // anchor and anchor+e1+e2
inline constexpr FacePattern kDiagonalAnti = 0b1010;  // anchor+e1 and anchor+e2

// Deliberate corruptions of the face weight used as negative controls for
// the exact checks.
enum class RateMutation {
  None,
  // g = 2 alpha on the (anchor, anchor+e1+e2) diagonal, alpha on the other.
  DoubleMainDiagonal,
  // g additionally fires (value alpha) on the pattern (1,1,0,0).
  AdjacentPairFires,
};

inline std::string_view to_string(RateMutation m) {
  switch (m) {
    case RateMutation::None: return "none";
    case RateMutation::DoubleMainDiagonal: return "double-diagonal";
    case RateMutation::AdjacentPairFires: return "adjacent-pair";
  }
  return "none";
}

inline RateMutation parse_mutation(std::string_view s) {
  if (s == "none") return RateMutation::None;
  if (s == "double-diagonal") return RateMutation::DoubleMainDiagonal;
  if (s == "adjacent-pair") return RateMutation::AdjacentPairFires;
  throw std::invalid_argument("unknown rate mutation '" + std::string(s) + "'");
}

// The local face weight g as a function of the face pattern.
template <class Scalar>
struct FaceRule {
  Scalar alpha{};
  RateMutation mutation = RateMutation::None;

  Scalar operator()(FacePattern p) const {
    switch (mutation) {
      case RateMutation::None: break;
      case RateMutation::DoubleMainDiagonal:
        if (p == kDiagonalMain) return alpha + alpha;
        break;
      case RateMutation::AdjacentPairFires:
        if (p == 0b0011) return alpha;
        break;
    }
    return (p == kDiagonalMain || p == kDiagonalAnti) ? alpha : Scalar(0);
  }
};

template <class Scalar>
Scalar g_value(const TorusLattice& lat, const Configuration& eta, Vertex anchor,
               const FaceRule<Scalar>& rule) {
  return rule(face_pattern(lat, eta, anchor));
}

// Rate without external field, generic over the scalar type.
template <class Scalar>
Scalar jump_rate(const TorusLattice& lat, const Configuration& eta, const DirectedEdge& e,
                 const FaceRule<Scalar>& rule) {
  const auto from = eta.at(lat, e.tail);
  if (from == 0) return Scalar(0);
  const auto to = eta.at(lat, lat.head(e));
  const auto [fp, fm] = lat.adjacent_faces(e);
  Scalar r = Scalar(1 - to);
  r += g_value(lat, eta, fp.anchor, rule) - g_value(lat, eta, fm.anchor, rule);
  return r;
}

struct ModelParams {
  double alpha = 0.0;
  // Discretized field H_N on directed edges; absent for the unperturbed model.
  std::optional<DiscreteVectorField> field;

  ModelParams() = default;
  explicit ModelParams(double a, std::optional<DiscreteVectorField> h = std::nullopt)
      : alpha(a), field(std::move(h)) {
    validate();
  }

  void validate() const {
    if (!(std::abs(alpha) < 1.0)) {
      throw std::invalid_argument("alpha must satisfy |alpha| < 1, got " + std::to_string(alpha));
    }
  }

  FaceRule<double> rule() const { return {alpha, RateMutation::None}; }
};

inline double g_value(const TorusLattice& lat, const Configuration& eta, Vertex anchor,
                      const ModelParams& params) {
  return g_value(lat, eta, anchor, params.rule());
}

inline double jump_rate(const TorusLattice& lat, const Configuration& eta, const DirectedEdge& e,
                        const ModelParams& params) {
  double r = jump_rate(lat, eta, e, params.rule());
  if (r != 0.0 && params.field) r *= std::exp(params.field->at(lat, e));
  assert(r >= 0.0);
  return r;
}

template <class Scalar>
struct CurrentSplit {
  Scalar total{};
  Scalar grad_part{};
  Scalar circ_part{};
};

// j_eta(e) = c_{e-,e+} - c_{e+,e-} together with its gradient part
// (h = -eta(0)) and circulation part g(f+) - g(f-).
template <class Scalar>
CurrentSplit<Scalar> instantaneous_current(const TorusLattice& lat, const Configuration& eta,
                                           const DirectedEdge& e, const FaceRule<Scalar>& rule) {
  const auto [fp, fm] = lat.adjacent_faces(e);
  CurrentSplit<Scalar> out;
  out.total = jump_rate(lat, eta, e, rule) - jump_rate(lat, eta, lat.reverse(e), rule);
  out.grad_part = Scalar(static_cast<int>(eta.at(lat, e.tail)) -
                         static_cast<int>(eta.at(lat, lat.head(e))));
  out.circ_part = g_value(lat, eta, fp.anchor, rule) - g_value(lat, eta, fm.anchor, rule);
  return out;
}

inline CurrentSplit<double> instantaneous_current(const TorusLattice& lat, const Configuration& eta,
                                                  const DirectedEdge& e, const ModelParams& params) {
  if (params.field) {
    throw std::invalid_argument(
        "current decomposition is only defined for the model without external field");
  }
  return instantaneous_current(lat, eta, e, params.rule());
}

// Instantaneous current as a discrete vector field (total current, any params).
inline DiscreteVectorField current_field(const TorusLattice& lat, const Configuration& eta,
                                         const ModelParams& params) {
  DiscreteVectorField j(lat.side());
  for (std::size_t id = 0; id < lat.num_edges(); ++id) {
    const auto e = lat.canonical_edge(id);
    j[id] = jump_rate(lat, eta, e, params) - jump_rate(lat, eta, lat.reverse(e), params);
  }
  return j;
}

}  // namespace rotex
