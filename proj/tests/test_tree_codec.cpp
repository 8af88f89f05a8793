#include "doctest.h"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <set>

#include "pgrav/enumeration.hpp"
#include "pgrav/rng.hpp"
#include "pgrav/tree_codec.hpp"

using namespace pgrav;

namespace {
double chi_square_p(const std::vector<double>& observed, const std::vector<double>& expected) {
  double x2 = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) x2 += std::pow(observed[i] - expected[i], 2) / expected[i];
  boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, x2));
}
} // namespace

TEST_CASE("parse and print") {
  const auto t = PlanarTree::parse("2(1(2(00))0)");
  CHECK(t.str() == "2(1(2(00))0)");
  CHECK(t.count(0) == 3);
  CHECK(t.boundary() == 3);
  CHECK_THROWS_AS(PlanarTree::parse("1(0)"), TreeError);
  CHECK_THROWS_AS(PlanarTree::parse("2(0)"), TreeError);
  CHECK_THROWS_AS(PlanarTree::parse("00"), TreeError);
  CHECK_THROWS_AS(PlanarTree::parse("3(000)"), TreeError);
}

TEST_CASE("small decodes") {
  const auto e = decode(PlanarTree::parse("0"));
  CHECK(e.inner_faces() == 0);
  CHECK(e.boundary_length() == 2);
  const auto tri = decode(PlanarTree::parse("2(00)"));
  CHECK(tri.inner_faces() == 1);
  CHECK(tri.boundary_length() == 3);
  CHECK(encode(new_edge_map()).str() == "0");
  CHECK(encode(tri).str() == "2(00)");
}

TEST_CASE("round trip on all maps up to eight triangles") {
  const auto maps = generate_maps(8);
  long long total = 0;
  for (const auto& level : maps)
    for (const auto& m : level) {
      const auto t = encode(m);
      const auto back = decode(t);
      CHECK(canonical_code(back) == canonical_code(m));
      CHECK(t.triangles() == m.inner_faces());
      CHECK(t.count(0) + t.count(1) + t.count(2) == m.edge_count());
      CHECK(t.count(0) + 1 == m.vertex_count());
      CHECK(t.boundary() == m.boundary_length());
      ++total;
    }
  const auto table = tutte_table(8, 10);
  long long expected = 0;
  for (int n = 0; n <= 8; ++n) expected += table.row_total(n).get_si();
  CHECK(total == expected);
}

TEST_CASE("trees up to twelve vertices") {
  const auto trees = enumerate_trees(12);
  std::set<CanonicalCode> codes;
  for (const auto& t : trees) {
    const auto m = decode(t);
    CHECK(encode(m) == t);
    codes.insert(canonical_code(m));
  }
  CHECK(codes.size() == trees.size());

  const auto table = tutte_table(6, 8);
  std::map<std::pair<int, int>, long> by_cell;
  for (const auto& t : enumerate_trees(13))
    if (t.triangles() <= 6) ++by_cell[{t.triangles(), t.boundary()}];
  for (int n = 0; n <= 6; ++n)
    for (int m = 2; m <= 8; ++m) CHECK(table.at(n, m) == by_cell[{n, m}]);

  double mass = 0;
  for (const auto& t : trees) mass += tree_weight(t, 0.5, 0.3, 0.2);
  CHECK(mass <= 1.0);
  CHECK(tree_weight(PlanarTree::parse("2(00)"), 0.5, 0.3, 0.2) == doctest::Approx(0.05));
}

TEST_CASE("weighted sampler matches exhaustive weights") {
  const double r0 = 0.6, r1 = 0.2, r2 = 0.2;
  const auto trees = enumerate_trees(10);
  std::map<std::string, std::size_t> index;
  std::vector<double> expected;
  double z = 0;
  for (const auto& t : trees) {
    index[t.str()] = expected.size();
    expected.push_back(tree_weight(t, r0, r1, r2));
    z += expected.back();
  }
  CounterRng rng(21);
  SamplerStats st;
  const int samples = 200'000;
  std::vector<double> observed(expected.size(), 0.0);
  double n1 = 0, n2 = 0;
  for (int i = 0; i < samples; ++i) {
    const auto t = sample_tree(r0, r1, r2, rng, &st, 10);
    t.validate();
    observed[index.at(t.str())] += 1;
    n1 += t.count(1);
    n2 += t.count(2);
  }
  CHECK(st.rejected_constraint > 0);
  const double leaf = observed[index.at("0")] / samples;
  const double p = r0 / z;
  CHECK(std::fabs(leaf - p) < 3 * std::sqrt(p * (1 - p) / samples));

  // Pool cells with small expectation before the chi-square test.
  std::vector<double> o, e;
  double ro = 0, re = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const double ex = expected[i] / z * samples;
    if (ex >= 20) {
      o.push_back(observed[i]);
      e.push_back(ex);
    } else {
      ro += observed[i];
      re += ex;
    }
  }
  o.push_back(ro);
  e.push_back(re);
  CHECK(chi_square_p(o, e) > 0.01);

  double en1 = 0, en2 = 0;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    en1 += trees[i].count(1) * expected[i] / z;
    en2 += trees[i].count(2) * expected[i] / z;
  }
  CHECK(n1 / samples == doctest::Approx(en1).epsilon(0.02));
  CHECK(n2 / samples == doctest::Approx(en2).epsilon(0.02));
}

TEST_CASE("uniform sampler at fixed size") {
  UniformTreeSampler sampler(10, 12);
  CHECK(sampler.count(3, 3) == 4);
  CHECK(sampler.count(5, 3) == 24);
  CounterRng rng(8);
  std::map<std::string, double> freq;
  const int samples = 48'000;
  for (int i = 0; i < samples; ++i) {
    const auto t = sampler.sample(5, 3, rng);
    CHECK(t.triangles() == 5);
    CHECK(t.boundary() == 3);
    freq[t.str()] += 1;
  }
  REQUIRE(freq.size() == 24);
  std::vector<double> o, e;
  for (const auto& [k, v] : freq) {
    o.push_back(v);
    e.push_back(samples / 24.0);
  }
  CHECK(chi_square_p(o, e) > 0.01);
}

TEST_CASE("degree statistics on small maps") {
  DegreeOptions opt;
  opt.n = 61;
  opt.trees = 400;
  opt.distances = {1, 4};
  const auto rep = degree_statistics(opt);
  CHECK(rep.samples > 1000);
  CHECK(rep.p_sum == doctest::Approx(1.0));
  CHECK(rep.p[0] == 0.0);
  CHECK(rep.p[1] == 0.0);
  CHECK(rep.pairs.size() == 2);
}

TEST_CASE("urn counts") {
  for (int k = 1; k <= 20; ++k) CHECK(urn_counts(k, 1) == k);
  CHECK(urn_counts(3, 2) == 5);
  for (int slack : {0, 2})
    for (int n = 0; n <= 12; ++n)
      for (int m = 0; m <= n; ++m) CHECK(urn_counts(n, m, slack) == urn_brute_force(n, m, slack));
  const auto r = urn_ratio_report(10);
  CHECK(r.size() == 10);
  CHECK(r[0] == doctest::Approx(10));
}

TEST_CASE("catalan numbers") {
  CHECK(catalan(0) == 1);
  CHECK(catalan(3) == 5);
  CHECK(catalan(10) == 16796);
  const double ratio = mpq_class(catalan(1000), catalan(999)).get_d();
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.01));
}
