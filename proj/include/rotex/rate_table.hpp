#pragma once

// Incrementally maintained jump-rate table for the face-rotation exclusion
// process, with a Fenwick tree for exact event selection.
//
// Because of exclusion at most one of the two directed jumps across an
// unoriented edge has a positive rate, so the table keeps one weight per
// unoriented edge plus the sign of the allowed jump relative to the canonical
// orientation. A jump across an edge only changes the rates of edges lying on
// a face that touches one of its endpoints; those lists are precomputed.

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rotex/fields.hpp"
#include "rotex/model.hpp"
#include "rotex/torus.hpp"

namespace rotex {

class FenwickTree {
 public:
  explicit FenwickTree(std::size_t n = 0) { reset(n); }

  void reset(std::size_t n) {
    size_ = n;
    cap_ = std::bit_ceil(std::max<std::size_t>(n, 1));
    tree_.assign(cap_ + 1, 0.0);
  }

  std::size_t size() const { return size_; }

  void build(const std::vector<double>& leaves) {
    std::fill(tree_.begin(), tree_.end(), 0.0);
    for (std::size_t k = 0; k < leaves.size(); ++k) tree_[k + 1] = leaves[k];
    for (std::size_t k = 1; k <= cap_; ++k) {
      const std::size_t parent = k + (k & (~k + 1));
      if (parent <= cap_) tree_[parent] += tree_[k];
    }
  }

  void add(std::size_t k, double delta) {
    for (std::size_t i = k + 1; i <= cap_; i += i & (~i + 1)) tree_[i] += delta;
  }

  double total() const { return tree_[cap_]; }

  // Smallest index k with prefix_sum(k) > target, for target in [0, total).
  std::size_t find(double target) const {
    std::size_t pos = 0;
    for (std::size_t step = cap_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next <= cap_ && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    return std::min(pos, size_ == 0 ? 0 : size_ - 1);
  }

  double prefix_sum(std::size_t count) const {
    double s = 0.0;
    for (std::size_t i = count; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::size_t size_ = 0;
  std::size_t cap_ = 1;
  std::vector<double> tree_;
};

class RateTable {
 public:
  RateTable(const TorusLattice& lat, Configuration eta, const ModelParams& params)
      : lat_(lat), eta_(std::move(eta)), alpha_(params.alpha) {
    params.validate();
    if (eta_.side() != lat.side()) throw std::invalid_argument("configuration does not match lattice");
    const std::size_t m = lat.num_edges();
    tail_.resize(m);
    head_.resize(m);
    face_plus_.resize(m);
    face_minus_.resize(m);
    forward_factor_.assign(m, 1.0);
    backward_factor_.assign(m, 1.0);
    if (params.field) {
      if (params.field->side() != lat.side()) throw std::invalid_argument("field does not match lattice");
      for (std::size_t id = 0; id < m; ++id) {
        forward_factor_[id] = std::exp((*params.field)[id]);
        backward_factor_[id] = std::exp(-(*params.field)[id]);
      }
    }
    corners_.resize(4 * lat.num_faces());
    for (std::size_t f = 0; f < lat.num_faces(); ++f) {
      const auto c = lat.face_corners(lat.vertex(f));
      for (int k = 0; k < 4; ++k) corners_[4 * f + k] = static_cast<std::uint32_t>(lat.index(c[k]));
    }
    affected_offset_.reserve(m + 1);
    affected_offset_.push_back(0);
    for (std::size_t id = 0; id < m; ++id) {
      const auto e = lat.canonical_edge(id);
      tail_[id] = static_cast<std::uint32_t>(lat.index(e.tail));
      head_[id] = static_cast<std::uint32_t>(lat.index(lat.head(e)));
      const auto [fp, fm] = lat.adjacent_faces(e);
      face_plus_[id] = static_cast<std::uint32_t>(lat.index(fp.anchor));
      face_minus_[id] = static_cast<std::uint32_t>(lat.index(fm.anchor));

      std::vector<std::uint32_t> touched;
      for (Vertex v : {e.tail, lat.head(e)}) {
        for (auto [di, dj] : {std::pair{0, 0}, std::pair{-1, 0}, std::pair{0, -1}, std::pair{-1, -1}}) {
          const OrientedFace face{lat.shift(v, di, dj), Orientation::Anticlockwise};
          for (const auto& fe : lat.face_edges(face)) {
            touched.push_back(static_cast<std::uint32_t>(lat.edge_ref(fe).id));
          }
        }
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      affected_.insert(affected_.end(), touched.begin(), touched.end());
      affected_offset_.push_back(affected_.size());
    }
    weight_.assign(m, 0.0);
    sign_.assign(m, 0);
    fenwick_.reset(m);
    rebuild();
  }

  const TorusLattice& lattice() const { return lat_; }
  const Configuration& configuration() const { return eta_; }

  // Total rate sum over edges (without the diffusive N^2 factor).
  double total() const { return fenwick_.total(); }
  double weight(std::size_t id) const { return weight_[id]; }
  // +1 if the allowed jump follows the canonical orientation, -1 if it goes
  // against it, 0 if no jump is possible.
  int sign(std::size_t id) const { return sign_[id]; }

  std::size_t affected_count(std::size_t id) const { return affected_offset_[id + 1] - affected_offset_[id]; }
  const std::uint32_t* affected_begin(std::size_t id) const { return affected_.data() + affected_offset_[id]; }

  std::size_t select(double target) const { return fenwick_.find(target); }

  void rebuild() {
    for (std::size_t id = 0; id < weight_.size(); ++id) compute(id, weight_[id], sign_[id]);
    fenwick_.build(weight_);
  }

  // Perform the allowed jump across edge `id` and refresh affected rates.
  // Calls on_change(id, old_weight, old_sign) before each modified entry is
  // overwritten.
  template <class OnChange>
  void apply_jump(std::size_t id, OnChange&& on_change) {
    assert(sign_[id] != 0);
    eta_.swap_sites(tail_[id], head_[id]);
    const std::uint32_t* a = affected_begin(id);
    const std::size_t count = affected_count(id);
    for (std::size_t k = 0; k < count; ++k) {
      const std::uint32_t e = a[k];
      double w;
      std::int8_t s;
      compute(e, w, s);
      if (w != weight_[e] || s != sign_[e]) {
        on_change(e, weight_[e], sign_[e]);
        fenwick_.add(e, w - weight_[e]);
        weight_[e] = w;
        sign_[e] = s;
      }
    }
  }

  void apply_jump(std::size_t id) {
    apply_jump(id, [](std::size_t, double, int) {});
  }

 private:
  double g(std::uint32_t face) const {
    const auto& occ = eta_.occupations();
    const std::uint32_t* c = corners_.data() + 4 * face;
    const unsigned a = occ[c[0]], b = occ[c[1]], cc = occ[c[2]], d = occ[c[3]];
    return (a == cc && b == d && a != b) ? alpha_ : 0.0;
  }

  void compute(std::size_t id, double& w, std::int8_t& s) const {
    const auto& occ = eta_.occupations();
    const auto from = occ[tail_[id]];
    const auto to = occ[head_[id]];
    if (from == to) {
      w = 0.0;
      s = 0;
      return;
    }
    const double gp = g(face_plus_[id]);
    const double gm = g(face_minus_[id]);
    if (from) {
      w = (1.0 + gp - gm) * forward_factor_[id];
      s = 1;
    } else {
      w = (1.0 + gm - gp) * backward_factor_[id];
      s = -1;
    }
  }

  TorusLattice lat_;
  Configuration eta_;
  double alpha_;
  std::vector<std::uint32_t> tail_, head_, face_plus_, face_minus_, corners_;
  std::vector<double> forward_factor_, backward_factor_;
  std::vector<std::uint32_t> affected_;
  std::vector<std::size_t> affected_offset_;
  std::vector<double> weight_;
  std::vector<std::int8_t> sign_;
  FenwickTree fenwick_;
};

}  // namespace rotex
