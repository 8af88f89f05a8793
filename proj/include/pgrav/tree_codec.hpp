#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "pgrav/map_core.hpp"

namespace pgrav {

class CounterRng;

/// Raised for trees outside the admissible class or malformed input.
class TreeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/**
 * Planar tree with vertex types 0, 1, 2 (number of children).
 *
 * Admissible trees satisfy n0(T_v) - n1(T_v) >= 1 for every subtree T_v,
 * i.e. every subtree encodes a disk with boundary length >= 2.
 */
struct PlanarTree {
  struct Node {
    std::uint8_t type = 0;
    int child[2] = {-1, -1};
  };
  std::vector<Node> nodes;
  int root = -1;

  int count(int type) const;
  int size() const { return static_cast<int>(nodes.size()); }
  /// Boundary length of the encoded map, n0 - n1 + 1.
  int boundary() const { return count(0) - count(1) + 1; }
  int triangles() const { return count(1) + count(2); }
  /// Throws TreeError unless the tree is well formed and admissible.
  void validate() const;

  /// "0", "1(T)", "2(TT)".
  std::string str() const;
  static PlanarTree parse(std::string_view text);

  bool operator==(const PlanarTree& o) const { return str() == o.str(); }
};

/// Builds the rooted map by Tutte moves bottom-up. `leaf_roots` (optional)
/// receives the root half-edge of each leaf's edge map, left to right.
RootedMap decode(const PlanarTree& tree, std::vector<HalfEdgeId>* leaf_roots = nullptr);
/// Inverse of decode by repeated splitting at the root.
PlanarTree encode(const RootedMap& map);

double tree_weight(const PlanarTree& tree, double r0, double r1, double r2);

/// All admissible trees with at most `max_vertices` vertices.
std::vector<PlanarTree> enumerate_trees(int max_vertices);

struct SamplerStats {
  long long attempts = 0;
  long long rejected_constraint = 0;
  long long rejected_size = 0;
  long long rejected_deficit = 0;
};

/// Exact sampler for the law proportional to r0^n0 r1^n1 r2^n2 on admissible
/// trees: Galton-Watson generation with offspring law (r0, r1, r2), rejected
/// as soon as a finished subtree violates the constraint. Trees larger than
/// `max_vertices` are rejected as well, so the law is conditioned on size.
PlanarTree sample_tree(double r0, double r1, double r2, CounterRng& rng, SamplerStats* stats = nullptr,
                       int max_vertices = 1'000'000, long long max_attempts = 10'000'000);

/// Uniform sampler over admissible trees (equivalently rooted maps) with fixed
/// (N, m); all such trees have equal weight under every (r0, r1, r2).
class UniformTreeSampler {
public:
  UniformTreeSampler(int n_max, int m_max);
  PlanarTree sample(int n, int m, CounterRng& rng);
  double count(int n, int m) const;

private:
  const std::vector<double>& split_weights(int n, int m);
  int n_max_, m_max_;
  std::vector<double> counts_;
  std::vector<std::vector<double>> split_cache_; // per cell, weight of each m1
};

struct DegreeOptions {
  int n = 201; // N and m must have equal parity
  int m = 3;
  long long trees = 20'000;
  double bulk_fraction = 0.25;   // leaves v with min(v, V - v) >= bulk_fraction * V
  std::vector<int> distances{1, 2, 4, 10, 20};
  std::uint64_t seed = 1;
  int max_degree = 64;
};

struct DegreePair {
  int distance = 0;
  long long pairs = 0;
  double covariance = 0;
  double covariance_se = 0;
};

struct DegreeReport {
  std::vector<double> p;   // p[k]
  std::vector<double> p_se;
  long long samples = 0;
  double p_sum = 0;
  double tail_rate = 0;
  double tail_rate_se = 0;
  std::vector<DegreePair> pairs;
  std::uint64_t seed = 0;
};

/// Degree of the rooted vertex of each bulk leaf in uniform (N, m) maps.
DegreeReport degree_statistics(const DegreeOptions& opt);

/// Number of arrays a_1..a_n >= 0 with sum m and prefix sums
/// a_1 + ... + a_k <= max(0, k - slack). slack 0 is the abstract urn model.
mpz_class urn_counts(int n, int m, int slack = 0);
mpz_class urn_brute_force(int n, int m, int slack = 0);
/// c(n, m) / c(n, m - 1) for m = 1 .. n - slack.
std::vector<double> urn_ratio_report(int n, int slack = 0);

mpz_class catalan(int n);

void write_csv(std::ostream& os, const DegreeReport& r);

} // namespace pgrav
