#pragma once

// Geometry of the N x N discrete torus: vertices, directed and unoriented
// edges, oriented faces, incidence and translations.
//
// Vertices are integer pairs (i, j) in {0..N-1}^2; i runs along e1, j along
// e2. Physical coordinates are (i/N, j/N) and only appear where continuum
// functions are evaluated. Every unoriented edge has a canonical orientation
// (rightward or upward) and is stored as 2 * vertex_index(tail) + axis.

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace rotex {

struct Vertex {
  int i = 0;
  int j = 0;
  friend constexpr bool operator==(const Vertex&, const Vertex&) = default;
};

// Unit lattice directions, anticlockwise starting from +e1.
enum class Dir : std::uint8_t { East = 0, North = 1, West = 2, South = 3 };

constexpr Dir opposite(Dir d) {
  return static_cast<Dir>((static_cast<int>(d) + 2) % 4);
}
constexpr int dx(Dir d) { return d == Dir::East ? 1 : (d == Dir::West ? -1 : 0); }
constexpr int dy(Dir d) { return d == Dir::North ? 1 : (d == Dir::South ? -1 : 0); }
// 0 for horizontal edges, 1 for vertical ones.
constexpr int axis_of(Dir d) { return static_cast<int>(d) % 2; }

inline constexpr std::array<Dir, 4> kAllDirs{Dir::East, Dir::North, Dir::West, Dir::South};

struct DirectedEdge {
  Vertex tail;
  Dir dir = Dir::East;
  friend constexpr bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

enum class Orientation : std::uint8_t { Anticlockwise, Clockwise };

// A face is identified by its lower-left anchor; the orientation selects the
// traversal sense.
struct OrientedFace {
  Vertex anchor;
  Orientation orientation = Orientation::Anticlockwise;
  friend constexpr bool operator==(const OrientedFace&, const OrientedFace&) = default;

  OrientedFace reversed() const {
    return {anchor, orientation == Orientation::Anticlockwise ? Orientation::Clockwise
                                                              : Orientation::Anticlockwise};
  }
};

// Reference to an unoriented edge through its canonical id, plus the sign of
// the directed edge relative to the canonical orientation.
struct EdgeRef {
  std::size_t id = 0;
  int sign = 1;
};

class TorusLattice {
 public:
  static constexpr int kMinSide = 3;

  explicit TorusLattice(int n) : n_(n) {
    if (n < kMinSide) {
      throw std::invalid_argument("torus side must be at least 3, got " + std::to_string(n));
    }
  }

  int side() const { return n_; }
  std::size_t num_vertices() const { return static_cast<std::size_t>(n_) * n_; }
  std::size_t num_edges() const { return 2 * num_vertices(); }
  std::size_t num_directed_edges() const { return 4 * num_vertices(); }
  std::size_t num_faces() const { return num_vertices(); }
  double mesh() const { return 1.0 / n_; }

  int wrap(int k) const {
    k %= n_;
    return k < 0 ? k + n_ : k;
  }

  Vertex wrap(Vertex v) const { return {wrap(v.i), wrap(v.j)}; }

  Vertex shift(Vertex v, int di, int dj) const { return {wrap(v.i + di), wrap(v.j + dj)}; }
  Vertex step(Vertex v, Dir d) const { return shift(v, dx(d), dy(d)); }

  // Row-major: rows are indexed by j, columns by i.
  std::size_t index(Vertex v) const {
    return static_cast<std::size_t>(v.j) * n_ + static_cast<std::size_t>(v.i);
  }
  Vertex vertex(std::size_t idx) const {
    return {static_cast<int>(idx % n_), static_cast<int>(idx / n_)};
  }

  Vertex head(const DirectedEdge& e) const { return step(e.tail, e.dir); }
  DirectedEdge reverse(const DirectedEdge& e) const { return {head(e), opposite(e.dir)}; }

  DirectedEdge edge_between(Vertex tail, Vertex head_vertex) const {
    for (Dir d : kAllDirs) {
      if (step(tail, d) == head_vertex) return {tail, d};
    }
    throw std::invalid_argument("vertices are not nearest neighbours");
  }

  EdgeRef edge_ref(const DirectedEdge& e) const {
    switch (e.dir) {
      case Dir::East: return {2 * index(e.tail), 1};
      case Dir::North: return {2 * index(e.tail) + 1, 1};
      case Dir::West: return {2 * index(step(e.tail, Dir::West)), -1};
      case Dir::South: return {2 * index(step(e.tail, Dir::South)) + 1, -1};
    }
    return {};
  }

  // Canonically oriented (rightward or upward) edge with the given id.
  DirectedEdge canonical_edge(std::size_t id) const {
    return {vertex(id / 2), id % 2 == 0 ? Dir::East : Dir::North};
  }

  // Anticlockwise faces f+(e) and f-(e): e is traversed along its orientation
  // by f_plus and against it by f_minus.
  std::pair<OrientedFace, OrientedFace> adjacent_faces(const DirectedEdge& e) const {
    const Vertex x = e.tail;
    Vertex plus;
    Vertex minus;
    switch (e.dir) {
      case Dir::East:  // bottom edge of the face at x, top edge of the face below
        plus = x;
        minus = shift(x, 0, -1);
        break;
      case Dir::North:  // right edge of the face to the left, left edge of the face at x
        plus = shift(x, -1, 0);
        minus = x;
        break;
      case Dir::West:  // top edge of the face anchored below-left of x
        plus = shift(x, -1, -1);
        minus = shift(x, -1, 0);
        break;
      case Dir::South:  // left edge of the face anchored below x
        plus = shift(x, 0, -1);
        minus = shift(x, -1, -1);
        break;
    }
    return {{plus, Orientation::Anticlockwise}, {minus, Orientation::Anticlockwise}};
  }

  // Corners in anticlockwise order starting from the anchor:
  // anchor, anchor+e1, anchor+e1+e2, anchor+e2.
  std::array<Vertex, 4> face_corners(Vertex anchor) const {
    return {anchor, shift(anchor, 1, 0), shift(anchor, 1, 1), shift(anchor, 0, 1)};
  }

  std::array<DirectedEdge, 4> face_edges(const OrientedFace& f) const {
    const auto c = face_corners(f.anchor);
    if (f.orientation == Orientation::Anticlockwise) {
      return {DirectedEdge{c[0], Dir::East}, DirectedEdge{c[1], Dir::North},
              DirectedEdge{c[2], Dir::West}, DirectedEdge{c[3], Dir::South}};
    }
    return {DirectedEdge{c[0], Dir::North}, DirectedEdge{c[3], Dir::East},
            DirectedEdge{c[2], Dir::South}, DirectedEdge{c[1], Dir::West}};
  }

  Vertex translate(Vertex v, Vertex z) const { return shift(v, z.i, z.j); }
  DirectedEdge translate(const DirectedEdge& e, Vertex z) const {
    return {translate(e.tail, z), e.dir};
  }
  OrientedFace translate(const OrientedFace& f, Vertex z) const {
    return {translate(f.anchor, z), f.orientation};
  }

  // Continuum coordinates of a vertex on the unit torus.
  std::array<double, 2> position(Vertex v) const {
    return {static_cast<double>(v.i) / n_, static_cast<double>(v.j) / n_};
  }

 private:
  int n_;
};

}  // namespace rotex
