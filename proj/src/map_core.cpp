#include "pgrav/map_core.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <unordered_set>

namespace pgrav {

long long VertexDegreeProfile::sum() const {
  return std::accumulate(q.begin(), q.end(), 0LL);
}

// ==========================================================
// Storage primitives
// ==========================================================

HalfEdgeId RootedMap::new_edge(VertexId from, VertexId to) {
  HalfEdgeId h;
  if (!free_edges_.empty()) {
    h = free_edges_.back();
    free_edges_.pop_back();
  } else {
    h = static_cast<HalfEdgeId>(next_.size());
    next_.resize(next_.size() + 2, kNone);
    prev_.resize(prev_.size() + 2, kNone);
    origin_.resize(origin_.size() + 2, kNone);
    flags_.resize(flags_.size() + 2, 0);
  }
  origin_[h] = from;
  origin_[h + 1] = to;
  flags_[h] = flags_[h + 1] = 0;
  ++edge_count_;
  return h;
}

void RootedMap::kill_edge(HalfEdgeId h) {
  const HalfEdgeId base = h & ~1;
  flags_[base] = flags_[base + 1] = kDead;
  next_[base] = next_[base + 1] = prev_[base] = prev_[base + 1] = kNone;
  free_edges_.push_back(base);
  --edge_count_;
}

VertexId RootedMap::new_vertex() {
  VertexId v;
  if (!free_vertices_.empty()) {
    v = free_vertices_.back();
    free_vertices_.pop_back();
  } else {
    v = static_cast<VertexId>(vertex_out_.size());
    vertex_out_.push_back(kNone);
  }
  ++vertex_count_;
  return v;
}

void RootedMap::kill_vertex(VertexId v) {
  vertex_out_[v] = kNone;
  free_vertices_.push_back(v);
  --vertex_count_;
}

void RootedMap::repoint_vertex(VertexId v, HalfEdgeId avoid_a, HalfEdgeId avoid_b) {
  const HalfEdgeId cur = vertex_out_[v];
  if (cur != avoid_a && cur != avoid_b) return;
  HalfEdgeId h = rotate(cur);
  while (h == avoid_a || h == avoid_b) {
    h = rotate(h);
    if (h == cur) throw InvariantError("vertex has no surviving half-edge");
  }
  vertex_out_[v] = h;
}

void RootedMap::relabel_orbit(HalfEdgeId start, VertexId v) {
  HalfEdgeId h = start;
  do {
    origin_[h] = v;
    h = rotate(h);
  } while (h != start);
}

// ==========================================================
// Construction
// ==========================================================

RootedMap RootedMap::edge_map(MapClass cls) {
  RootedMap map;
  map.class_ = cls;
  map.root_ = map.add_edge_map();
  return map;
}

RootedMap RootedMap::from_triangles(int vertex_count, std::span<const std::array<int, 3>> faces,
                                    MapClass cls) {
  RootedMap map;
  map.class_ = cls;
  for (int i = 0; i < vertex_count; ++i) map.new_vertex();
  std::map<std::pair<int, int>, HalfEdgeId> directed;
  auto half = [&](int u, int v) {
    if (u == v) throw std::invalid_argument("triangle with repeated vertex");
    if (auto it = directed.find({u, v}); it != directed.end()) {
      if (map.next_[it->second] != kNone) throw std::invalid_argument("directed edge used twice");
      return it->second;
    }
    const HalfEdgeId h = map.new_edge(u, v);
    directed[{u, v}] = h;
    directed[{v, u}] = h + 1;
    return h;
  };
  for (const auto& f : faces) {
    const HalfEdgeId a = half(f[0], f[1]);
    map.next_[a] = a; // reserve against reuse inside this face
    const HalfEdgeId b = half(f[1], f[2]);
    map.next_[b] = b;
    const HalfEdgeId c = half(f[2], f[0]);
    map.link(a, b);
    map.link(b, c);
    map.link(c, a);
    map.vertex_out_[f[0]] = a;
    map.vertex_out_[f[1]] = b;
    map.vertex_out_[f[2]] = c;
  }
  map.inner_faces_ = static_cast<int>(faces.size());
  map.boundary_length_ = 0;
  for (HalfEdgeId h = 0; h < map.half_edge_capacity(); ++h)
    if (map.next_[h] == kNone) throw std::invalid_argument("surface is not closed");
  map.root_ = 0;
  map.validate();
  return map;
}

RootedMap RootedMap::tetrahedron() {
  static constexpr std::array<std::array<int, 3>, 4> faces{{{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}}};
  return from_triangles(4, faces, MapClass::simplicial);
}

RootedMap RootedMap::octahedron() {
  static constexpr std::array<std::array<int, 3>, 8> faces{{{0, 1, 2},
                                                            {0, 2, 3},
                                                            {0, 3, 4},
                                                            {0, 4, 1},
                                                            {5, 2, 1},
                                                            {5, 3, 2},
                                                            {5, 4, 3},
                                                            {5, 1, 4}}};
  return from_triangles(6, faces, MapClass::simplicial);
}

void RootedMap::set_root(HalfEdgeId h) {
  if (h < 0 || h >= half_edge_capacity() || !is_alive(h)) throw std::invalid_argument("root is not a live half-edge");
  if (!closed() && !is_outer(h)) throw std::invalid_argument("root of a disk must lie on the outer face");
  root_ = h;
}

// ==========================================================
// Queries
// ==========================================================

std::vector<HalfEdgeId> RootedMap::live_half_edges() const {
  std::vector<HalfEdgeId> out;
  out.reserve(static_cast<std::size_t>(2 * edge_count_));
  for (HalfEdgeId h = 0; h < half_edge_capacity(); ++h)
    if (is_alive(h)) out.push_back(h);
  return out;
}

std::vector<VertexId> RootedMap::live_vertices() const {
  std::vector<VertexId> out;
  out.reserve(static_cast<std::size_t>(vertex_count_));
  for (VertexId v = 0; v < vertex_capacity(); ++v)
    if (vertex_alive(v)) out.push_back(v);
  return out;
}

std::vector<HalfEdgeId> RootedMap::outer_half_edges() const {
  std::vector<HalfEdgeId> out;
  for (HalfEdgeId h = 0; h < half_edge_capacity(); ++h)
    if (is_alive(h) && is_outer(h)) out.push_back(h);
  return out;
}

int RootedMap::degree(VertexId v) const {
  const HalfEdgeId start = vertex_out_[v];
  int d = 0;
  HalfEdgeId h = start;
  do {
    ++d;
    h = rotate(h);
  } while (h != start);
  return d;
}

VertexDegreeProfile RootedMap::degree_profile() const {
  VertexDegreeProfile p;
  for (VertexId v : live_vertices()) p.q.push_back(degree(v));
  return p;
}

bool RootedMap::on_boundary(VertexId v) const {
  const HalfEdgeId start = vertex_out_[v];
  HalfEdgeId h = start;
  do {
    if (is_outer(h)) return true;
    h = rotate(h);
  } while (h != start);
  return false;
}

bool RootedMap::adjacent(VertexId a, VertexId b) const {
  const HalfEdgeId start = vertex_out_[a];
  HalfEdgeId h = start;
  do {
    if (dest(h) == b) return true;
    h = rotate(h);
  } while (h != start);
  return false;
}

int RootedMap::face_degree(HalfEdgeId h) const {
  int d = 0;
  HalfEdgeId g = h;
  do {
    ++d;
    g = next_[g];
  } while (g != h);
  return d;
}

std::vector<HalfEdgeId> RootedMap::star(VertexId v) const {
  std::vector<HalfEdgeId> out;
  const HalfEdgeId start = vertex_out_[v];
  HalfEdgeId h = start;
  do {
    out.push_back(h);
    h = twin(prev_[h]);
  } while (h != start);
  return out;
}

void RootedMap::validate() const {
  auto fail = [](const std::string& what) { throw InvariantError(what); };
  const int cap = half_edge_capacity();
  int live = 0;
  for (HalfEdgeId h = 0; h < cap; ++h) {
    if (!is_alive(h)) {
      if (is_alive(twin(h))) fail("twin of a dead half-edge is alive");
      continue;
    }
    ++live;
    if (!is_alive(twin(h))) fail("twin is dead");
    const HalfEdgeId n = next_[h];
    if (n < 0 || n >= cap || !is_alive(n)) fail("next is not live");
    if (prev_[n] != h) fail("prev/next mismatch");
    if (origin_[n] != dest(h)) fail("next does not start where half-edge ends");
    if (origin_[h] == dest(h)) fail("loop edge");
    if (is_outer(h) != is_outer(n)) fail("outer marker differs along a face");
    const VertexId v = origin_[h];
    if (v < 0 || v >= vertex_capacity() || !vertex_alive(v)) fail("origin vertex is dead");
  }
  if (live != 2 * edge_count_) fail("edge counter mismatch");

  // Vertex rotations partition the live half-edges.
  int rotated = 0;
  int vertices = 0;
  for (VertexId v = 0; v < vertex_capacity(); ++v) {
    if (!vertex_alive(v)) continue;
    ++vertices;
    const HalfEdgeId s = vertex_out_[v];
    if (!is_alive(s) || origin_[s] != v) fail("vertex handle does not originate at vertex");
    HalfEdgeId h = s;
    do {
      if (origin_[h] != v) fail("rotation leaves vertex");
      ++rotated;
      if (rotated > live) fail("rotation does not close");
      h = rotate(h);
    } while (h != s);
  }
  if (rotated != live) fail("vertex rotations do not cover all half-edges");
  if (vertices != vertex_count_) fail("vertex counter mismatch");

  // Faces.
  std::vector<char> seen(static_cast<std::size_t>(cap), 0);
  int inner = 0;
  int outer_faces = 0;
  int outer_len = 0;
  for (HalfEdgeId h = 0; h < cap; ++h) {
    if (!is_alive(h) || seen[h]) continue;
    int d = 0;
    HalfEdgeId g = h;
    do {
      seen[g] = 1;
      ++d;
      g = next_[g];
    } while (g != h);
    if (is_outer(h)) {
      ++outer_faces;
      outer_len += d;
    } else {
      ++inner;
      if (d != 3) fail("inner face is not a triangle");
    }
  }
  if (inner != inner_faces_) fail("inner face counter mismatch");
  if (outer_len != boundary_length_) fail("boundary length counter mismatch");
  if (outer_faces > 1) fail("more than one outer face");
  if (outer_faces == 1 && boundary_length_ < 2) fail("boundary shorter than 2");

  // Connectivity and Euler characteristic.
  if (live > 0) {
    std::vector<char> reach(static_cast<std::size_t>(cap), 0);
    std::vector<HalfEdgeId> stack{root_};
    if (root_ < 0 || root_ >= cap || !is_alive(root_)) fail("root is not live");
    if (!closed() && !is_outer(root_)) fail("root not on outer face");
    reach[root_] = 1;
    int count = 0;
    while (!stack.empty()) {
      const HalfEdgeId h = stack.back();
      stack.pop_back();
      ++count;
      for (HalfEdgeId g : {next_[h], twin(h)})
        if (!reach[g]) {
          reach[g] = 1;
          stack.push_back(g);
        }
    }
    if (count != live) fail("map is not connected");
  }
  if (euler_characteristic() != 2) fail("Euler characteristic is not 2");

  if (class_ == MapClass::simplicial) {
    for (VertexId v = 0; v < vertex_capacity(); ++v) {
      if (!vertex_alive(v)) continue;
      std::unordered_set<VertexId> nb;
      HalfEdgeId h = vertex_out_[v];
      const HalfEdgeId s = h;
      do {
        if (!nb.insert(dest(h)).second) fail("multi-edge in simplicial map");
        h = rotate(h);
      } while (h != s);
    }
  }
}

// ==========================================================
// Tutte moves
// ==========================================================

HalfEdgeId RootedMap::add_edge_map() {
  const VertexId x = new_vertex();
  const VertexId y = new_vertex();
  const HalfEdgeId e = new_edge(x, y);
  link(e, e + 1);
  link(e + 1, e);
  set_outer(e, true);
  set_outer(e + 1, true);
  vertex_out_[x] = e;
  vertex_out_[y] = e + 1;
  boundary_length_ += 2;
  if (root_ == kNone) root_ = e;
  return e;
}

HalfEdgeId RootedMap::close_corner(HalfEdgeId a) {
  if (!is_alive(a) || !is_outer(a)) throw MoveError("corner must start on the outer face");
  const HalfEdgeId b = next_[a];
  if (next_[b] == a) throw MoveError("linear move needs boundary length at least 3");
  const VertexId u = origin_[a];
  const VertexId v = dest(b);
  if (u == v) throw MoveError("corner closure would create a loop");
  if (class_ == MapClass::simplicial && adjacent(u, v)) throw MoveError("corner closure would create a multi-edge");
  const HalfEdgeId p = prev_[a];
  const HalfEdgeId n = next_[b];
  const HalfEdgeId r = new_edge(u, v);
  const HalfEdgeId e = twin(r);
  link(e, a);
  link(a, b);
  link(b, e);
  link(p, r);
  link(r, n);
  set_outer(r, true);
  set_outer(a, false);
  set_outer(b, false);
  set_outer(e, false);
  ++inner_faces_;
  --boundary_length_;
  if (root_ == a || root_ == b) root_ = r;
  return r;
}

HalfEdgeId RootedMap::glue(HalfEdgeId a, HalfEdgeId b) {
  if (!is_alive(a) || !is_outer(a) || !is_alive(b) || !is_outer(b))
    throw MoveError("gluing needs two outer half-edges");
  const VertexId u = origin_[a];
  const VertexId w = dest(a);
  const VertexId w2 = origin_[b];
  const VertexId v = dest(b);
  if (w == w2) throw MoveError("gluing half-edges already share a vertex");
  const HalfEdgeId p = prev_[a];
  const HalfEdgeId h = next_[a];
  const HalfEdgeId x = prev_[b];
  const HalfEdgeId n = next_[b];

  relabel_orbit(b, w);
  kill_vertex(w2);

  const HalfEdgeId r = new_edge(u, v);
  const HalfEdgeId e = twin(r);
  link(e, a);
  link(a, b);
  link(b, e);
  link(p, r);
  link(r, n);
  link(x, h);
  set_outer(r, true);
  set_outer(a, false);
  set_outer(b, false);
  set_outer(e, false);
  ++inner_faces_;
  --boundary_length_;
  if (root_ == a || root_ == b || root_ == kNone) root_ = r;
  return r;
}

int RootedMap::append_disjoint(const RootedMap& other) {
  const int off = half_edge_capacity();
  const int voff = vertex_capacity();
  auto shift = [](int value, int by) { return value == kNone ? kNone : value + by; };
  for (HalfEdgeId h = 0; h < other.half_edge_capacity(); ++h) {
    next_.push_back(shift(other.next_[h], off));
    prev_.push_back(shift(other.prev_[h], off));
    origin_.push_back(shift(other.origin_[h], voff));
    flags_.push_back(other.flags_[h]);
  }
  for (VertexId v = 0; v < other.vertex_capacity(); ++v) vertex_out_.push_back(shift(other.vertex_out_[v], off));
  for (HalfEdgeId h : other.free_edges_) free_edges_.push_back(h + off);
  for (VertexId v : other.free_vertices_) free_vertices_.push_back(v + voff);
  inner_faces_ += other.inner_faces_;
  boundary_length_ += other.boundary_length_;
  vertex_count_ += other.vertex_count_;
  edge_count_ += other.edge_count_;
  if (root_ == kNone && other.root_ != kNone) root_ = other.root_ + off;
  return off;
}

RootedMap::Split RootedMap::split_at(HalfEdgeId r) {
  if (!is_alive(r) || !is_outer(r)) throw MoveError("split needs an outer half-edge");
  const HalfEdgeId e = twin(r);
  if (is_outer(e)) throw MoveError("edge map has no inner face");
  const HalfEdgeId a = next_[e];
  const HalfEdgeId b = next_[a];
  if (next_[b] != e) throw InvariantError("inner face at root is not a triangle");
  const VertexId u = origin_[r];
  const VertexId v = dest(r);
  const VertexId w = origin_[b];

  HalfEdgeId h = kNone;
  {
    const HalfEdgeId s = vertex_out_[w];
    HalfEdgeId g = s;
    do {
      if (is_outer(g)) {
        if (h != kNone) throw InvariantError("boundary is not a simple cycle");
        h = g;
      }
      g = rotate(g);
    } while (g != s);
  }

  const HalfEdgeId p = prev_[r];
  const HalfEdgeId n = next_[r];
  repoint_vertex(u, r);
  repoint_vertex(v, e);
  kill_edge(r);
  set_outer(a, true);
  set_outer(b, true);
  --inner_faces_;
  ++boundary_length_;

  if (h == kNone) {
    link(p, a);
    link(a, b);
    link(b, n);
    if (root_ == r) root_ = a;
    return {1, a, kNone};
  }

  const HalfEdgeId x = prev_[h];
  link(p, a);
  link(a, h);
  link(x, b);
  link(b, n);
  const VertexId w2 = new_vertex();
  relabel_orbit(b, w2);
  vertex_out_[w2] = b;
  vertex_out_[w] = h;
  if (root_ == r) root_ = a;
  return {2, a, b};
}

// ==========================================================
// Boundary growth / deletion
// ==========================================================

VertexId RootedMap::attach_triangle(HalfEdgeId h) {
  if (!is_alive(h) || !is_outer(h)) throw MoveError("attach needs an outer half-edge");
  const VertexId u = origin_[h];
  const VertexId v = dest(h);
  const VertexId x = new_vertex();
  const HalfEdgeId a = new_edge(u, x);
  const HalfEdgeId b = new_edge(x, v);
  const HalfEdgeId p = prev_[h];
  const HalfEdgeId n = next_[h];
  link(p, a);
  link(a, b);
  link(b, n);
  link(h, twin(b));
  link(twin(b), twin(a));
  link(twin(a), h);
  set_outer(a, true);
  set_outer(b, true);
  set_outer(h, false);
  vertex_out_[x] = b;
  ++inner_faces_;
  ++boundary_length_;
  if (root_ == h) root_ = a;
  return x;
}

bool RootedMap::ear_removable(HalfEdgeId a) const {
  if (!is_alive(a) || !is_outer(a)) return false;
  const HalfEdgeId b = next_[a];
  if (boundary_length_ < 4 || inner_faces_ < 2) return false;
  const VertexId x = dest(a);
  if (degree(x) != 2) return false;
  const HalfEdgeId h = next_[twin(a)];
  return next_[h] == twin(b) && next_[twin(b)] == twin(a);
}

void RootedMap::remove_ear(HalfEdgeId a) {
  if (!ear_removable(a)) throw MoveError("not a removable ear");
  const HalfEdgeId b = next_[a];
  const HalfEdgeId h = next_[twin(a)];
  const VertexId u = origin_[a];
  const VertexId v = dest(b);
  const VertexId x = dest(a);
  const HalfEdgeId p = prev_[a];
  const HalfEdgeId n = next_[b];
  link(p, h);
  link(h, n);
  set_outer(h, true);
  if (vertex_out_[u] == a) vertex_out_[u] = h;
  if (vertex_out_[v] == twin(b)) vertex_out_[v] = n;
  kill_edge(a);
  kill_edge(b);
  kill_vertex(x);
  --inner_faces_;
  --boundary_length_;
  if (root_ == a || root_ == b) root_ = h;
}

bool RootedMap::boundary_edge_removable(HalfEdgeId r) const {
  if (!is_alive(r) || !is_outer(r) || inner_faces_ < 2) return false;
  const HalfEdgeId e = twin(r);
  if (is_outer(e)) return false;
  const HalfEdgeId a = next_[e];
  const HalfEdgeId b = next_[a];
  if (next_[b] != e) return false;
  return !on_boundary(origin_[b]);
}

void RootedMap::remove_boundary_edge(HalfEdgeId r) {
  if (!boundary_edge_removable(r)) throw MoveError("boundary edge cannot be removed");
  const HalfEdgeId e = twin(r);
  const HalfEdgeId a = next_[e];
  const HalfEdgeId b = next_[a];
  const HalfEdgeId p = prev_[r];
  const HalfEdgeId n = next_[r];
  repoint_vertex(origin_[r], r);
  repoint_vertex(origin_[e], e);
  kill_edge(r);
  link(p, a);
  link(a, b);
  link(b, n);
  set_outer(a, true);
  set_outer(b, true);
  --inner_faces_;
  ++boundary_length_;
  if (root_ == r) root_ = a;
}

void RootedMap::close_sphere() {
  if (boundary_length_ != 3) throw MoveError("only a boundary of length 3 closes into a sphere");
  for (HalfEdgeId h = 0; h < half_edge_capacity(); ++h)
    if (is_alive(h)) set_outer(h, false);
  boundary_length_ = 0;
  ++inner_faces_;
}

// ==========================================================
// Internal moves
// ==========================================================

bool RootedMap::can_flip(HalfEdgeId h) const {
  if (h < 0 || h >= half_edge_capacity() || !is_alive(h)) return false;
  const HalfEdgeId t = twin(h);
  if (is_outer(h) || is_outer(t)) return false;
  const HalfEdgeId h1 = next_[h];
  const HalfEdgeId t1 = next_[t];
  if (next_[next_[h1]] != h || next_[next_[t1]] != t) return false;
  const VertexId a = dest(h1);
  const VertexId b = dest(t1);
  if (a == b) return false;
  const int min_degree = class_ == MapClass::simplicial ? 4 : 3;
  if (degree(origin_[h]) < min_degree || degree(dest(h)) < min_degree) return false;
  if (class_ == MapClass::simplicial && adjacent(a, b)) return false;
  return true;
}

void RootedMap::flip(HalfEdgeId h) {
  if (!can_flip(h)) throw MoveError("edge flip not applicable");
  const HalfEdgeId t = twin(h);
  const HalfEdgeId h1 = next_[h];
  const HalfEdgeId h2 = next_[h1];
  const HalfEdgeId t1 = next_[t];
  const HalfEdgeId t2 = next_[t1];
  const VertexId u = origin_[h];
  const VertexId v = origin_[t];
  const VertexId a = dest(h1);
  const VertexId b = dest(t1);
  if (vertex_out_[u] == h) vertex_out_[u] = t1;
  if (vertex_out_[v] == t) vertex_out_[v] = h1;
  origin_[h] = b;
  origin_[t] = a;
  link(h, h2);
  link(h2, t1);
  link(t1, h);
  link(t, t2);
  link(t2, h1);
  link(h1, t);
}

VertexId RootedMap::subdivide(HalfEdgeId h) {
  if (h < 0 || h >= half_edge_capacity() || !is_alive(h)) throw MoveError("dead half-edge");
  const HalfEdgeId t = twin(h);
  if (is_outer(h) || is_outer(t)) throw MoveError("subdivision needs triangles on both sides");
  const HalfEdgeId h1 = next_[h];
  const HalfEdgeId h2 = next_[h1];
  const HalfEdgeId t1 = next_[t];
  const HalfEdgeId t2 = next_[t1];
  if (next_[h2] != h || next_[t2] != t) throw MoveError("subdivision needs triangles on both sides");
  const VertexId v = dest(h);
  const VertexId a = dest(h1);
  const VertexId b = dest(t1);
  const VertexId x = new_vertex();
  const HalfEdgeId g = new_edge(x, v);
  const HalfEdgeId p = new_edge(x, a);
  const HalfEdgeId s = new_edge(x, b);
  if (vertex_out_[v] == t) vertex_out_[v] = twin(g);
  origin_[t] = x;
  link(h, p);
  link(p, h2);
  link(h2, h);
  link(g, h1);
  link(h1, twin(p));
  link(twin(p), g);
  link(t, t1);
  link(t1, twin(s));
  link(twin(s), t);
  link(twin(g), s);
  link(s, t2);
  link(t2, twin(g));
  vertex_out_[x] = t;
  inner_faces_ += 2;
  return x;
}

bool RootedMap::can_remove_degree4(VertexId x, int pairing) const {
  if (x < 0 || x >= vertex_capacity() || !vertex_alive(x)) return false;
  if (degree(x) != 4) return false;
  const auto e = star(x);
  std::array<VertexId, 4> nb{};
  for (int k = 0; k < 4; ++k) {
    if (is_outer(e[k]) || is_outer(next_[e[k]])) return false;
    if (next_[next_[next_[e[k]]]] != e[k]) return false;
    nb[k] = dest(e[k]);
  }
  const VertexId c = nb[pairing & 1];
  const VertexId d = nb[(pairing & 1) + 2];
  if (c == d) return false;
  const int min_degree = class_ == MapClass::simplicial ? 4 : 3;
  const VertexId o1 = nb[(pairing & 1) + 1];
  const VertexId o2 = nb[((pairing & 1) + 3) & 3];
  if (o1 == o2) {
    if (degree(o1) - 2 < min_degree - 1) return false;
  } else if (degree(o1) < min_degree || degree(o2) < min_degree) {
    return false;
  }
  if (class_ == MapClass::simplicial && adjacent(c, d)) return false;
  return true;
}

void RootedMap::remove_degree4(VertexId x, int pairing) {
  if (!can_remove_degree4(x, pairing)) throw MoveError("inverse subdivision not applicable");
  const auto e = star(x);
  std::array<HalfEdgeId, 4> l{};
  std::array<VertexId, 4> nb{};
  for (int k = 0; k < 4; ++k) {
    l[k] = next_[e[k]];
    nb[k] = dest(e[k]);
  }
  for (int k = 0; k < 4; ++k)
    if (vertex_out_[nb[k]] == twin(e[k])) vertex_out_[nb[k]] = l[k];
  for (int k = 0; k < 4; ++k) kill_edge(e[k]);
  kill_vertex(x);
  const int s = pairing & 1;
  const HalfEdgeId d = new_edge(nb[s], nb[s + 2]);
  const HalfEdgeId dt = twin(d);
  // Faces (l_s, l_{s+1}, d') and (l_{s+2}, l_{s+3}, d).
  link(l[s], l[s + 1]);
  link(l[s + 1], dt);
  link(dt, l[s]);
  link(l[s + 2], l[(s + 3) & 3]);
  link(l[(s + 3) & 3], d);
  link(d, l[s + 2]);
  inner_faces_ -= 2;
  if (!is_alive(root_)) root_ = l[0];
}

// ==========================================================
// Value-level API
// ==========================================================

RootedMap new_edge_map(MapClass cls) { return RootedMap::edge_map(cls); }

RootedMap tutte_move_1(const RootedMap& map) {
  if (map.closed()) throw MoveError("closed map has no boundary");
  if (map.boundary_length() < 3) throw MoveError("linear move needs boundary length at least 3");
  RootedMap out = map;
  const HalfEdgeId r = out.close_corner(out.root());
  out.set_root(r);
  return out;
}

RootedMap tutte_move_2(const RootedMap& a, const RootedMap& b) {
  if (a.closed() || b.closed()) throw MoveError("closed map has no boundary");
  RootedMap out = a;
  const int off = out.append_disjoint(b);
  const HalfEdgeId r = out.glue(a.root(), b.root() + off);
  out.set_root(r);
  return out;
}

RootedMap gv_move(const RootedMap& map, HalfEdgeId edge) {
  RootedMap out = map;
  out.flip(edge);
  return out;
}

std::pair<RootedMap, VertexId> alexander_move(const RootedMap& map, HalfEdgeId edge) {
  RootedMap out = map;
  const VertexId x = out.subdivide(edge);
  return {std::move(out), x};
}

// ==========================================================
// Canonical codes
// ==========================================================

namespace {

void put_u32(CanonicalCode& code, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) code.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

} // namespace

CanonicalCode canonical_code_from(const RootedMap& map, HalfEdgeId root) {
  const int cap = map.half_edge_capacity();
  std::vector<int> label(static_cast<std::size_t>(cap), -1);
  std::vector<HalfEdgeId> order;
  order.reserve(static_cast<std::size_t>(2 * map.edge_count()));
  label[root] = 0;
  order.push_back(root);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const HalfEdgeId h = order[i];
    for (HalfEdgeId g : {map.next(h), RootedMap::twin(h)}) {
      if (label[g] < 0) {
        label[g] = static_cast<int>(order.size());
        order.push_back(g);
      }
    }
  }
  CanonicalCode code;
  code.reserve(5 + order.size() * 9);
  code.push_back(kCodeVersion);
  put_u32(code, static_cast<std::uint32_t>(order.size()));
  for (HalfEdgeId h : order) {
    put_u32(code, static_cast<std::uint32_t>(label[map.next(h)]));
    put_u32(code, static_cast<std::uint32_t>(label[RootedMap::twin(h)]));
    code.push_back(map.is_outer(h) ? 1 : 0);
  }
  return code;
}

CanonicalCode canonical_code(const RootedMap& map) { return canonical_code_from(map, map.root()); }

CanonicalCode unrooted_code(const RootedMap& map) {
  const auto candidates = map.closed() ? map.live_half_edges() : map.outer_half_edges();
  CanonicalCode best;
  for (HalfEdgeId h : candidates) {
    auto c = canonical_code_from(map, h);
    if (best.empty() || c < best) best = std::move(c);
  }
  return best;
}

bool rooted_isomorphic(const RootedMap& a, const RootedMap& b) {
  if (a.edge_count() != b.edge_count() || a.vertex_count() != b.vertex_count() ||
      a.inner_faces() != b.inner_faces() || a.boundary_length() != b.boundary_length())
    return false;
  std::vector<HalfEdgeId> fwd(static_cast<std::size_t>(a.half_edge_capacity()), kNone);
  std::vector<HalfEdgeId> bwd(static_cast<std::size_t>(b.half_edge_capacity()), kNone);
  std::deque<HalfEdgeId> queue{a.root()};
  fwd[a.root()] = b.root();
  bwd[b.root()] = a.root();
  while (!queue.empty()) {
    const HalfEdgeId h = queue.front();
    queue.pop_front();
    const HalfEdgeId g = fwd[h];
    if (a.is_outer(h) != b.is_outer(g)) return false;
    const std::array<std::pair<HalfEdgeId, HalfEdgeId>, 2> pairs{
        {{a.next(h), b.next(g)}, {RootedMap::twin(h), RootedMap::twin(g)}}};
    for (auto [x, y] : pairs) {
      if (fwd[x] == kNone && bwd[y] == kNone) {
        fwd[x] = y;
        bwd[y] = x;
        queue.push_back(x);
      } else if (fwd[x] != y || bwd[y] != x) {
        return false;
      }
    }
  }
  return true;
}

// ==========================================================
// Curvature
// ==========================================================

mpq_class curvature(int q) {
  if (q <= 0) throw std::domain_error("vertex degree must be positive");
  mpq_class k(2 * (6 - q), q);
  k.canonicalize();
  return k;
}

int gauss_bonnet_defect(const RootedMap& sphere) {
  if (!sphere.closed()) throw std::invalid_argument("Gauss-Bonnet defect needs a closed sphere");
  sphere.validate();
  int total = 0;
  for (VertexId v : sphere.live_vertices()) total += 6 - sphere.degree(v);
  return total;
}

} // namespace pgrav
