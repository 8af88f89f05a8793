#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "pgrav/map_core.hpp"

namespace pgrav {

class CounterRng;

enum class InitialSphere { tetrahedron, octahedron };

struct InternalConfig {
  double lambda = 1.0;      // A-move rate per producing vertex
  double mu = 0.0;          // inverse A-move rate per producing vertex
  double lambda_flip = 0.0; // edge flip rate per edge
  MapClass cls = MapClass::simplicial;
  InitialSphere initial = InitialSphere::octahedron;
  double horizon = 1000.0;
  long long max_events = 50'000'000;
  int max_vertices = 2'000'000;
  std::uint64_t seed = 1;
  std::uint64_t replica = 0;
  // Tracked vertex: born by an A-move at time 0 on the initial sphere.
  int stop_at_degree = 0;    // > 0 ends the run once the tracked degree reaches it
  int local_radius = 0;      // > 0: only vertices this close to the tracked one produce moves
  double trace_dt = 0.0;     // > 0 samples (t, q) of the tracked vertex
  long long validate_every = 0;
};

struct InternalTrace {
  std::uint64_t seed = 0;
  long long events = 0;
  long long null_events = 0;
  long long a_moves = 0;
  long long inverse_moves = 0;
  long long flips = 0;
  double time = 0;
  bool tracked_alive = true;
  double disappear_time = -1;
  int final_degree = 0;
  int max_degree = 0;
  long long q_up = 0;       // jumps of the tracked degree
  long long q_down = 0;
  std::vector<std::pair<double, int>> q_samples;
  int final_vertices = 0;
  long long vertex_step_violations = 0; // A-move not adding exactly one vertex
  long long gauss_bonnet_checks = 0;
  long long gauss_bonnet_violations = 0;
  long long validations = 0;
  bool stopped_at_degree = false;
};

InternalTrace simulate_internal(const InternalConfig& cfg);

/// Random simplicial sphere with n_triangles (even, >= 4): random A-moves on
/// the tetrahedron followed by `flips` random admissible flips.
RootedMap random_sphere(int n_triangles, long long flips, CounterRng& rng);

/// Transient law of the walk on {3, ..., k_max} with up and down rates lambda * i
/// (no down move at 3) started at q0, by uniformization.
std::vector<double> walk_transient(double lambda, int q0, double t, int k_max);

struct WalkComparison {
  int n_triangles = 0;
  long long samples = 0;
  double tv = 0;             // empirical law of q_v(t) vs the walk mixture
  double tv_noise = 0;       // TV of two halves of the sample, a noise scale
  double mean_increment = 0; // E q_v(t) - q_v(0), simulated
  double mean_increment_se = 0;
  double walk_increment = 0; // same for the walk
};

struct WalkOptions {
  std::vector<int> n_triangles{50, 500};
  double t_small = 0.3;
  double lambda = 1.0;
  long long samples = 20'000;
  std::uint64_t seed = 1;
};

/// Flip-only chain at fixed N; the degree of a random vertex over [0, t_small]
/// compared with the limiting walk.
std::vector<WalkComparison> limiting_walk_compare(const WalkOptions& opt);

struct ComponentReport {
  int vertices = 0;
  int triangles = 0;
  long long states = 0;               // flip-connected component of the start
  long long component_up_to_reflection = 0;
  long long directed_edges = 0;
  long long reverse_missing = 0;      // moves whose inverse is absent
  long long rate_mismatches = 0;      // pi(A) q(A,B) != pi(B) q(B,A) for pi ~ 1 / |Aut|
  long long stationarity_failures = 0;
  long long self_loops = 0;           // flips to an equivalent complex, excluded
};

/// Flip graph of the component of a sphere triangulation with `vertices`
/// vertices containing the octahedron-derived start. Uniform over rooted
/// complexes is pi(A) ~ 1 / |Aut(A)| on unrooted ones.
ComponentReport component_reversibility(int vertices, MapClass cls = MapClass::simplicial,
                                        long long state_cap = 200'000);

/// Closed map with reversed orientation.
RootedMap mirror(const RootedMap& sphere);

void write_csv(std::ostream& os, const InternalTrace& t);

} // namespace pgrav
