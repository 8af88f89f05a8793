#include "doctest.h"

#include <cmath>
#include <numeric>

#include "pgrav/internal_dynamics.hpp"
#include "pgrav/rng.hpp"

using namespace pgrav;

TEST_CASE("growth without inverse moves adds one vertex per move") {
  InternalConfig c;
  c.lambda = 1;
  c.mu = 0;
  c.max_events = 3000;
  c.validate_every = 100;
  const auto t = simulate_internal(c);
  CHECK(t.a_moves == 3000);
  CHECK(t.vertex_step_violations == 0);
  CHECK(t.final_vertices == 7 + 3000);
  CHECK(t.gauss_bonnet_violations == 0);
  CHECK(t.validations == 30);
}

TEST_CASE("mixed moves keep a valid sphere") {
  for (MapClass cls : {MapClass::simplicial, MapClass::general}) {
    long long events = 0, validations = 0, flips = 0, violations = 0;
    for (std::uint64_t r = 0; events < 20'000 && r < 200; ++r) {
      InternalConfig c;
      c.lambda = 2;
      c.mu = 1;
      c.lambda_flip = 0.5;
      c.cls = cls;
      c.max_events = 20'000;
      c.validate_every = 50;
      c.seed = 17;
      c.replica = r;
      const auto t = simulate_internal(c);
      events += t.events;
      validations += t.validations;
      flips += t.flips;
      violations += t.gauss_bonnet_violations;
    }
    CHECK(violations == 0);
    CHECK(validations >= 300);
    CHECK(flips > 0);
  }
}

TEST_CASE("flip-only dynamics keeps the counts") {
  InternalConfig c;
  c.lambda = 0;
  c.lambda_flip = 1;
  c.max_events = 5000;
  c.validate_every = 500;
  const auto t = simulate_internal(c);
  CHECK(t.final_vertices == 7);
  CHECK(t.flips > 0);
  CHECK(t.a_moves == 0);
}

TEST_CASE("tracked vertex disappears when inverse moves dominate") {
  int dead = 0;
  for (int r = 0; r < 200; ++r) {
    InternalConfig c;
    c.lambda = 1;
    c.mu = 2;
    c.replica = static_cast<std::uint64_t>(r);
    dead += !simulate_internal(c).tracked_alive;
  }
  CHECK(dead == 200);
}

TEST_CASE("tracked degree can escape when moves dominate") {
  int hit = 0;
  long long up = 0, down = 0;
  for (int r = 0; r < 60; ++r) {
    InternalConfig c;
    c.lambda = 2;
    c.mu = 1;
    c.local_radius = 2;
    c.stop_at_degree = 101;
    c.replica = static_cast<std::uint64_t>(r);
    const auto t = simulate_internal(c);
    hit += t.stopped_at_degree;
    up += t.q_up;
    down += t.q_down;
  }
  CHECK(hit >= 6);
  CHECK(up > down);
}

TEST_CASE("walk transient") {
  const auto p0 = walk_transient(1, 6, 0, 100);
  CHECK(p0[3] == 1.0);
  const auto p = walk_transient(1, 6, 0.5, 200);
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0));
  double mean = 0;
  for (std::size_t i = 0; i < p.size(); ++i) mean += (i + 3.0) * p[i];
  // Symmetric rates away from 3: the mean moves only through the reflection.
  CHECK(mean > 6.0);
  CHECK(mean < 6.5);
}

TEST_CASE("flip component of small spheres") {
  // Simplicial sphere triangulations up to reflection: 2, 5, 14, 50.
  const int known[] = {2, 5, 14, 50};
  for (int v = 6; v <= 9; ++v) {
    const auto r = component_reversibility(v);
    CHECK(r.triangles == 2 * v - 4);
    CHECK(r.component_up_to_reflection == known[v - 6]);
    CHECK(r.reverse_missing == 0);
    CHECK(r.rate_mismatches == 0);
    CHECK(r.stationarity_failures == 0);
  }
  const auto oct = component_reversibility(6);
  CHECK(oct.states == 2);
}

TEST_CASE("mirror reverses orientation") {
  CounterRng rng(3);
  const auto s = random_sphere(20, 200, rng);
  const auto m = mirror(s);
  m.validate();
  CHECK(m.vertex_count() == s.vertex_count());
  CHECK(unrooted_code(mirror(m)) == unrooted_code(s));
}

TEST_CASE("limiting walk comparison") {
  WalkOptions o;
  o.n_triangles = {12, 200};
  o.samples = 4000;
  const auto r = limiting_walk_compare(o);
  REQUIRE(r.size() == 2);
  CHECK(r[0].tv > r[1].tv);
  CHECK(std::fabs(r[1].mean_increment) < 4 * r[1].mean_increment_se + 0.02);
}
