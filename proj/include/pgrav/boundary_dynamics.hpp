#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace pgrav {

enum class GrowthMode { full_map, boundary_only };

struct GrowthConfig {
  double lambda1 = 1.0; // attach a triangle to one boundary edge
  double lambda2 = 2.0; // close a corner of two neighbouring boundary edges
  double mu_del = 0.0;  // deletion rate per deletable triangle (full map only)
  std::uint64_t seed = 1;
  std::uint64_t replica = 0;
  long long max_events = 1'000'000;
  double max_time = 1e300;
  GrowthMode mode = GrowthMode::full_map;
  double sample_dt = 0.0;          // > 0 records (t, m) on this time grid
  long long validate_every = 0;    // > 0 runs a full traversal check this often
  long long max_triangles = 50'000'000;
  bool check_closures = false;     // close the disk into a sphere at each return to m = 3
  int max_closures = 0;            // 0 = unlimited
};

struct TraceStats {
  std::uint64_t seed = 0;
  long long events = 0;
  double time = 0;
  bool horizon_reached = false;
  std::vector<double> occupation_time; // index m
  std::vector<long long> event_counts; // events fired while at boundary length m
  std::vector<long long> return_jumps; // jumps per excursion away from m = 3
  std::vector<std::pair<double, int>> m_samples;
  long long lambda2_at_3 = 0;
  long long euler_checks = 0;
  long long euler_violations = 0;
  long long validations = 0;
  long long closures = 0;
  long long closure_failures = 0;
  long long deletions = 0;
  int final_m = 0;
  long long final_v = 0;
  long long final_edges = 0;
  long long final_interior_edges = 0;
  long long final_faces = 0; // inner triangles
};

TraceStats simulate_growth(const GrowthConfig& cfg);

/// Product-form law of m on {3, ..., k_max}: pi(k + 1) / pi(k) = (l1 / l2) k / (k + 1).
struct BoundaryLaw {
  int k_min = 3;
  std::vector<double> probs;      // probs[k - 3]
  double truncation_bound = 0;    // upper bound on the mass beyond k_max
};
BoundaryLaw stationary_boundary_law(double lambda1, double lambda2, int k_max);

/// Time-weighted occupation of m as a law on {3, ..., k_max}.
std::vector<double> occupation_law(const TraceStats& s, int k_max);

/// P(n = N) at index N (index 0 is 0), from iterates of f(s) = (l2 + l1 s^2) / (l1 + l2).
std::vector<double> return_time_distribution(double lambda1, double lambda2, int n_max);
double f_generating(double lambda1, double lambda2, double s);

struct CurvatureProtocol {
  double lambda1 = 1.2;
  double lambda2 = 1.0;
  double age = 8.0;                  // vertex degree read at birth time + age
  int burn_in_boundary = 50;         // vertices born before m reaches this are ignored
  long long panel_vertices = 200'000;
  std::vector<int> distances{1, 2, 4, 10, 20};
  std::uint64_t seed = 1;
  int max_degree = 64;
};

struct PairCorrelation {
  int distance = 0;
  double covariance = 0;
  double covariance_se = 0;
  double max_joint_deviation = 0; // sup_k,l |P(k, l) - P(k) P(l)|
  long long pairs = 0;
};

struct CurvatureReport {
  std::vector<double> chi;           // chi[k], empirical
  std::vector<double> chi_se;
  long long samples = 0;
  double chi_sum = 0;
  double tail_rate = 0;              // fitted geometric rate of chi_k
  double tail_rate_se = 0;
  double mean_curvature = 0;         // sample mean of 2 pi (6 - q) / q
  double mean_curvature_plugin = 0;  // sum_q 2 pi (6 - q) / q chi_q
  std::vector<PairCorrelation> pairs;
  std::uint64_t seed = 0;
};
CurvatureReport curvature_statistics(const CurvatureProtocol& proto);

struct CltRegion {
  int size = 0;
  double mean = 0;
  double variance = 0;   // of the standardized sum (sum - k |I|) / sqrt(|I|)
  double ks_distance = 0;
};
struct CltReport {
  std::vector<CltRegion> regions;
  int replicas = 0;
  double k_hat = 0;
  std::uint64_t seed = 0;
};
CltReport clt_curvature(const CurvatureProtocol& proto, const std::vector<int>& region_sizes, int replicas);

struct ReversibilityReport {
  long long states = 0;
  long long transitions = 0;       // directed moves between distinct states
  long long cycles4 = 0;
  long long cycle4_violations = 0;
  long long balance_violations = 0; // edges inconsistent with the potential
  bool potential_matches_weight = false; // pi * |Aut| proportional to (lambda/mu)^N
  long long stuck_states = 0;       // reachable states other than the start with no deletion
  long long class_maps_checked = 0; // maps of the generated class with m >= 3
  long long class_non_deletable = 0;
  int smallest_non_deletable_n = -1;
};
ReversibilityReport reversible_variant_check(double lambda, double mu, int n_max);

void write_csv(std::ostream& os, const TraceStats& s);

} // namespace pgrav
