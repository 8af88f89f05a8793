#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace pgrav {

using HalfEdgeId = int;
using VertexId = int;

inline constexpr int kNone = -1;

/// General maps allow multi-edges; simplicial maps forbid them. Loops never occur.
enum class MapClass : std::uint8_t { general, simplicial };

/// Raised when a move is not applicable at the requested place.
class MoveError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a structural invariant of a map does not hold.
class InvariantError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct VertexDegreeProfile {
  std::vector<int> q;
  long long sum() const;
};

/**
 * Rooted planar map stored as half-edges.
 *
 * Half-edges come in twin pairs (h, h ^ 1). `next` walks around a face;
 * the outer face (when present) is marked per half-edge. Vertices are kept
 * as origin labels with one outgoing half-edge each. Deleted edges and
 * vertices go on free lists and are reused.
 *
 * Counters (N inner faces, m outer-face degree, V, L) are maintained
 * incrementally. A single object may temporarily hold several disjoint
 * components while a map is being assembled from Tutte moves; the counters
 * are then sums over components.
 */
class RootedMap {
public:
  RootedMap() = default;

  static RootedMap edge_map(MapClass cls = MapClass::general);
  /// Closed sphere from consistently oriented triangles over vertices 0..n-1.
  static RootedMap from_triangles(int vertex_count, std::span<const std::array<int, 3>> faces,
                                  MapClass cls = MapClass::general);
  static RootedMap tetrahedron();
  static RootedMap octahedron();

  // Counters.
  int inner_faces() const noexcept { return inner_faces_; }
  int boundary_length() const noexcept { return boundary_length_; }
  int vertex_count() const noexcept { return vertex_count_; }
  int edge_count() const noexcept { return edge_count_; }
  int face_count() const noexcept { return inner_faces_ + (closed() ? 0 : 1); }
  bool closed() const noexcept { return boundary_length_ == 0; }
  int euler_characteristic() const noexcept { return vertex_count_ - edge_count_ + face_count(); }
  MapClass map_class() const noexcept { return class_; }

  HalfEdgeId root() const noexcept { return root_; }
  void set_root(HalfEdgeId h);

  // Half-edge navigation.
  static constexpr HalfEdgeId twin(HalfEdgeId h) noexcept { return h ^ 1; }
  HalfEdgeId next(HalfEdgeId h) const { return next_[h]; }
  HalfEdgeId prev(HalfEdgeId h) const { return prev_[h]; }
  VertexId origin(HalfEdgeId h) const { return origin_[h]; }
  VertexId dest(HalfEdgeId h) const { return origin_[twin(h)]; }
  bool is_outer(HalfEdgeId h) const { return (flags_[h] & kOuter) != 0; }
  bool is_alive(HalfEdgeId h) const { return (flags_[h] & kDead) == 0; }
  /// Next outgoing half-edge around origin(h).
  HalfEdgeId rotate(HalfEdgeId h) const { return next_[twin(h)]; }

  int half_edge_capacity() const noexcept { return static_cast<int>(next_.size()); }
  int vertex_capacity() const noexcept { return static_cast<int>(vertex_out_.size()); }
  bool vertex_alive(VertexId v) const { return vertex_out_[v] != kNone; }
  HalfEdgeId vertex_half_edge(VertexId v) const { return vertex_out_[v]; }

  std::vector<HalfEdgeId> live_half_edges() const;
  std::vector<VertexId> live_vertices() const;
  std::vector<HalfEdgeId> outer_half_edges() const;

  int degree(VertexId v) const;
  VertexDegreeProfile degree_profile() const;
  bool on_boundary(VertexId v) const;
  bool adjacent(VertexId a, VertexId b) const;
  int face_degree(HalfEdgeId h) const;

  /// Full traversal check of every structural invariant; throws InvariantError.
  void validate() const;

  // ---- Tutte moves (in place) ----

  /// Appends a disjoint edge map; returns its root half-edge.
  HalfEdgeId add_edge_map();
  /// Move 1 at an outer half-edge `a` of a component with boundary >= 3.
  /// Adds an edge closing the corner a, next(a); returns the new outer half-edge.
  HalfEdgeId close_corner(HalfEdgeId a);
  /// Move 2 on two outer half-edges of different components; `a` precedes `b`.
  /// Identifies dest(a) with origin(b) and closes the triangle; returns the new
  /// outer half-edge.
  HalfEdgeId glue(HalfEdgeId a, HalfEdgeId b);
  /// Copies `other` in as a disjoint component; returns the half-edge offset.
  int append_disjoint(const RootedMap& other);

  /// Inverse of a Tutte move at outer half-edge r. Removes r's edge and returns
  /// one root (move 1) or two roots, left then right (move 2). Requires that
  /// the inner face at r is a triangle and that r is not an edge map.
  struct Split {
    int move = 0;
    HalfEdgeId first = kNone;
    HalfEdgeId second = kNone;
  };
  Split split_at(HalfEdgeId r);

  // ---- Boundary growth and deletion ----

  /// Attaches a triangle with a new apex vertex on outer half-edge h.
  /// Returns the new vertex.
  VertexId attach_triangle(HalfEdgeId h);
  /// Inverse of attach_triangle: removes the degree-2 boundary vertex dest(a).
  void remove_ear(HalfEdgeId a);
  /// Inverse of close_corner: deletes the boundary edge of outer half-edge r
  /// when the apex of its inner triangle is interior.
  void remove_boundary_edge(HalfEdgeId r);
  bool ear_removable(HalfEdgeId a) const;
  bool boundary_edge_removable(HalfEdgeId r) const;

  /// Turns an m = 3 disk into a closed sphere by declaring the hole a face.
  void close_sphere();

  // ---- Internal moves on triangles ----

  bool can_flip(HalfEdgeId h) const;
  void flip(HalfEdgeId h);
  /// Subdivides the edge of h with a new vertex; returns it.
  VertexId subdivide(HalfEdgeId h);
  /// Removes an interior degree-4 vertex, adding the diagonal between its
  /// neighbours (pairing 0: first/third, pairing 1: second/fourth).
  bool can_remove_degree4(VertexId x, int pairing) const;
  void remove_degree4(VertexId x, int pairing);
  /// Outgoing half-edges of v in rotation order; link(h) = next(h) goes to the
  /// following neighbour.
  std::vector<HalfEdgeId> star(VertexId v) const;

private:
  static constexpr std::uint8_t kOuter = 1;
  static constexpr std::uint8_t kDead = 2;

  HalfEdgeId new_edge(VertexId from, VertexId to);
  void kill_edge(HalfEdgeId h);
  VertexId new_vertex();
  void kill_vertex(VertexId v);
  void link(HalfEdgeId a, HalfEdgeId b) {
    next_[a] = b;
    prev_[b] = a;
  }
  void set_outer(HalfEdgeId h, bool outer) {
    if (outer)
      flags_[h] |= kOuter;
    else
      flags_[h] &= static_cast<std::uint8_t>(~kOuter);
  }
  void repoint_vertex(VertexId v, HalfEdgeId avoid_a, HalfEdgeId avoid_b = kNone);
  void relabel_orbit(HalfEdgeId start, VertexId v);

  std::vector<HalfEdgeId> next_;
  std::vector<HalfEdgeId> prev_;
  std::vector<VertexId> origin_;
  std::vector<std::uint8_t> flags_;
  std::vector<HalfEdgeId> vertex_out_;
  std::vector<HalfEdgeId> free_edges_;
  std::vector<VertexId> free_vertices_;

  HalfEdgeId root_ = kNone;
  int inner_faces_ = 0;
  int boundary_length_ = 0;
  int vertex_count_ = 0;
  int edge_count_ = 0;
  MapClass class_ = MapClass::general;
};

// ---- Value-level operations ----

RootedMap new_edge_map(MapClass cls = MapClass::general);
/// (N, m) -> (N + 1, m - 1). Throws MoveError when m = 2.
RootedMap tutte_move_1(const RootedMap& map);
/// ((N1, m1), (N2, m2)) -> (N1 + N2 + 1, m1 + m2 - 1).
RootedMap tutte_move_2(const RootedMap& a, const RootedMap& b);

/// Edge flip on a triangulation; throws MoveError if not applicable.
RootedMap gv_move(const RootedMap& map, HalfEdgeId edge);
/// Substitution S_{i,j;x}: subdivide edge ij with a new vertex x.
std::pair<RootedMap, VertexId> alexander_move(const RootedMap& map, HalfEdgeId edge);

inline constexpr std::uint8_t kCodeVersion = 1;

using CanonicalCode = std::vector<std::uint8_t>;

/// Root-anchored traversal code; equal iff the rooted maps are isomorphic.
CanonicalCode canonical_code(const RootedMap& map);
CanonicalCode canonical_code_from(const RootedMap& map, HalfEdgeId root);
/// Minimum code over all admissible roots: outer half-edges for disks,
/// every half-edge for closed maps.
CanonicalCode unrooted_code(const RootedMap& map);

/// Direct root-preserving isomorphism test by simultaneous traversal.
bool rooted_isomorphic(const RootedMap& a, const RootedMap& b);

/// Curvature 2*pi*(6 - q)/q as the exact rational coefficient of pi.
mpq_class curvature(int q);

/// Sum over vertices of (6 - q_v); 12 on every triangulated sphere.
int gauss_bonnet_defect(const RootedMap& sphere);

} // namespace pgrav
