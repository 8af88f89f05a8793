#include "doctest.h"

#include <map>
#include <set>

#include "pgrav/map_core.hpp"
#include "pgrav/rng.hpp"

using namespace pgrav;

namespace {

// All generated maps with N <= n_max, by N, deduplicated by code.
std::vector<std::vector<RootedMap>> generate(int n_max) {
  std::vector<std::vector<RootedMap>> by_n(static_cast<std::size_t>(n_max + 1));
  by_n[0].push_back(new_edge_map());
  for (int n = 1; n <= n_max; ++n) {
    std::map<CanonicalCode, RootedMap> seen;
    for (const auto& x : by_n[n - 1])
      if (x.boundary_length() >= 3) {
        auto y = tutte_move_1(x);
        seen.emplace(canonical_code(y), y);
      }
    for (int n1 = 0; n1 <= n - 1; ++n1)
      for (const auto& a : by_n[n1])
        for (const auto& b : by_n[n - 1 - n1]) {
          auto y = tutte_move_2(a, b);
          seen.emplace(canonical_code(y), y);
        }
    for (auto& [code, map] : seen) by_n[n].push_back(map);
  }
  return by_n;
}

int count_at(const std::vector<RootedMap>& maps, int m) {
  int c = 0;
  for (const auto& x : maps) c += x.boundary_length() == m;
  return c;
}

} // namespace

TEST_CASE("edge map counters") {
  auto e = new_edge_map();
  CHECK(e.inner_faces() == 0);
  CHECK(e.boundary_length() == 2);
  CHECK(e.vertex_count() == 2);
  CHECK(e.edge_count() == 1);
  CHECK(e.euler_characteristic() == 2);
  CHECK(canonical_code(e) == canonical_code(new_edge_map()));
  e.validate();
}

TEST_CASE("linear move rejected on boundary two") {
  CHECK_THROWS_AS(tutte_move_1(new_edge_map()), MoveError);
}

TEST_CASE("gluing two edge maps gives the triangle") {
  auto t = tutte_move_2(new_edge_map(), new_edge_map());
  t.validate();
  CHECK(t.inner_faces() == 1);
  CHECK(t.boundary_length() == 3);
  CHECK(t.vertex_count() == 3);
  auto u = tutte_move_1(t);
  u.validate();
  CHECK(u.inner_faces() == 2);
  CHECK(u.boundary_length() == 2);
}

TEST_CASE("counter arithmetic of quadratic move") {
  auto maps = generate(2);
  for (const auto& a : maps[2]) {
    if (a.boundary_length() != 4) continue;
    auto c = tutte_move_2(a, new_edge_map());
    c.validate();
    CHECK(c.inner_faces() == 3);
    CHECK(c.boundary_length() == 5);
  }
}

TEST_CASE("generated classes have the expected sizes") {
  auto maps = generate(5);
  CHECK(count_at(maps[2], 4) == 2);
  CHECK(count_at(maps[3], 3) == 4);
  CHECK(count_at(maps[5], 3) == 24);
  CHECK(count_at(maps[4], 2) == 4);
  for (const auto& level : maps)
    for (const auto& x : level) {
      x.validate();
      CHECK(x.vertex_count() - x.edge_count() + x.inner_faces() == 1);
      CHECK(x.degree_profile().sum() == 2LL * x.edge_count());
    }
}

TEST_CASE("codes separate exactly the isomorphism classes") {
  auto maps = generate(4);
  std::vector<RootedMap> all;
  for (auto& l : maps) all.insert(all.end(), l.begin(), l.end());
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < all.size(); ++j)
      CHECK((canonical_code(all[i]) == canonical_code(all[j])) == rooted_isomorphic(all[i], all[j]));
}

TEST_CASE("split inverts both moves") {
  auto maps = generate(4);
  for (const auto& level : maps)
    for (const auto& x : level) {
      if (x.inner_faces() == 0) continue;
      RootedMap y = x;
      auto s = y.split_at(y.root());
      if (s.move == 1) {
        RootedMap z = y;
        z.set_root(s.first);
        z.validate();
        CHECK(canonical_code(tutte_move_1(z)) == canonical_code(x));
      } else {
        CHECK(s.move == 2);
        CHECK(canonical_code_from(y, s.first) != CanonicalCode{});
      }
    }
}

TEST_CASE("curvature values") {
  CHECK(curvature(6) == 0);
  CHECK(curvature(3) == 2);
  CHECK(curvature(12) == mpq_class(-1));
  CHECK_THROWS(curvature(0));
}

TEST_CASE("Gauss-Bonnet on platonic solids") {
  CHECK(gauss_bonnet_defect(RootedMap::tetrahedron()) == 12);
  CHECK(gauss_bonnet_defect(RootedMap::octahedron()) == 12);
  CHECK_THROWS(gauss_bonnet_defect(new_edge_map()));
}

TEST_CASE("flips on the octahedron") {
  const auto oct = RootedMap::octahedron();
  CHECK(oct.vertex_count() == 6);
  CHECK(oct.edge_count() == 12);
  CHECK(oct.face_count() == 8);
  const auto base = unrooted_code(oct);
  int flipped = 0;
  for (HalfEdgeId h : oct.live_half_edges()) {
    RootedMap g(oct);
    // Simplicial octahedron: the opposite apexes are never adjacent.
    if (!g.can_flip(h)) continue;
    ++flipped;
    g.flip(h);
    g.validate();
    CHECK(g.vertex_count() == 6);
    CHECK(g.edge_count() == 12);
    CHECK(g.face_count() == 8);
    CHECK(gauss_bonnet_defect(g) == 12);
    RootedMap back(g);
    REQUIRE(back.can_flip(h));
    back.flip(h);
    CHECK(unrooted_code(back) == base);
  }
  CHECK(flipped == 24);
}

TEST_CASE("tetrahedron admits no simplicial flip") {
  const auto t = RootedMap::tetrahedron();
  for (HalfEdgeId h : t.live_half_edges()) CHECK_FALSE(t.can_flip(h));
  CHECK_THROWS_AS(gv_move(t, 0), MoveError);
}

TEST_CASE("Alexander move on tetrahedron") {
  auto [m, x] = alexander_move(RootedMap::tetrahedron(), 0);
  m.validate();
  CHECK(m.vertex_count() == 5);
  CHECK(m.face_count() == 6);
  CHECK(m.degree(x) == 4);
  CHECK(gauss_bonnet_defect(m) == 12);
  int removable = 0;
  for (int pairing = 0; pairing < 2; ++pairing) {
    if (!m.can_remove_degree4(x, pairing)) continue;
    ++removable;
    RootedMap back(m);
    back.remove_degree4(x, pairing);
    back.validate();
    CHECK(unrooted_code(back) == unrooted_code(RootedMap::tetrahedron()));
  }
  // The other diagonal joins two vertices that are already adjacent.
  CHECK(removable == 1);
}

TEST_CASE("random growth keeps disks valid and closes to spheres") {
  CounterRng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    auto map = tutte_move_2(new_edge_map(), new_edge_map());
    for (int step = 0; step < 60; ++step) {
      auto outer = map.outer_half_edges();
      const HalfEdgeId h = outer[rng.below(outer.size())];
      if (map.boundary_length() > 3 && rng.bernoulli(0.5)) {
        if (map.map_class() == MapClass::general) map.close_corner(h);
      } else {
        map.attach_triangle(h);
      }
      CHECK(map.vertex_count() - map.edge_count() + map.inner_faces() == 1);
    }
    map.validate();
    while (map.boundary_length() > 3) map.close_corner(map.outer_half_edges().front());
    map.close_sphere();
    map.validate();
    CHECK(gauss_bonnet_defect(map) == 12);
  }
}

TEST_CASE("inverse boundary moves") {
  auto map = tutte_move_2(new_edge_map(), new_edge_map());
  const auto before = unrooted_code(map);
  const HalfEdgeId h = map.outer_half_edges().front();
  const VertexId x = map.attach_triangle(h);
  CHECK(map.degree(x) == 2);
  HalfEdgeId a = kNone;
  for (HalfEdgeId g : map.outer_half_edges())
    if (map.dest(g) == x) a = g;
  REQUIRE(map.ear_removable(a));
  map.remove_ear(a);
  map.validate();
  CHECK(unrooted_code(map) == before);

  map.attach_triangle(map.outer_half_edges().front());
  map.close_corner(map.outer_half_edges().front());
  map.validate();
  int removed = 0;
  for (HalfEdgeId g : map.outer_half_edges())
    if (map.boundary_edge_removable(g)) {
      RootedMap copy(map);
      copy.remove_boundary_edge(g);
      copy.validate();
      CHECK(copy.inner_faces() == map.inner_faces() - 1);
      CHECK(copy.boundary_length() == map.boundary_length() + 1);
      ++removed;
    }
  CHECK(removed == 3); // V = 4, m = 3: one interior apex
}
