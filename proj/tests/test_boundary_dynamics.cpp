#include "doctest.h"

#include <cmath>
#include <vector>

#include "pgrav/boundary_dynamics.hpp"
#include "pgrav/stats.hpp"

using namespace pgrav;

TEST_CASE("stationary law ratios") {
  const auto law = stationary_boundary_law(1, 2, 60);
  double sum = 0;
  for (double p : law.probs) sum += p;
  CHECK(sum == doctest::Approx(1.0));
  for (int k = 3; k < 60; ++k) CHECK(law.probs[k - 2] / law.probs[k - 3] == doctest::Approx(0.5 * k / (k + 1.0)));
  CHECK(law.truncation_bound < 1e-18);
  CHECK_THROWS(stationary_boundary_law(2, 1, 20));
}

TEST_CASE("occupation matches the stationary law") {
  GrowthConfig cfg;
  cfg.lambda1 = 1;
  cfg.lambda2 = 2;
  cfg.mode = GrowthMode::boundary_only;
  cfg.seed = 11;
  const auto s = simulate_growth(cfg);
  const auto law = stationary_boundary_law(1, 2, 40);
  const auto occ = occupation_law(s, 40);
  CHECK(tv_distance(occ, law.probs) < 0.01);
  CHECK(s.lambda2_at_3 == 0);
}

TEST_CASE("full map and boundary walk share trajectories") {
  GrowthConfig cfg;
  cfg.max_events = 50'000;
  cfg.seed = 5;
  cfg.validate_every = 5'000;
  const auto full = simulate_growth(cfg);
  cfg.mode = GrowthMode::boundary_only;
  const auto walk = simulate_growth(cfg);
  CHECK(full.occupation_time == walk.occupation_time);
  CHECK(full.final_m == walk.final_m);
  CHECK(full.euler_checks == 50'000);
  CHECK(full.euler_violations == 0);
  CHECK(full.validations == 10);
  CHECK(full.final_v - full.final_interior_edges + full.final_faces == 1 + full.final_m);
}

TEST_CASE("closures at returns to the triangle") {
  GrowthConfig cfg;
  cfg.max_events = 20'000;
  cfg.seed = 3;
  cfg.check_closures = true;
  const auto s = simulate_growth(cfg);
  CHECK(s.closures > 100);
  CHECK(s.closure_failures == 0);
  long long returns = 0;
  for (long long c : s.return_jumps) returns += c;
  CHECK(returns == s.closures);
}

TEST_CASE("growth with deletions keeps the map consistent") {
  GrowthConfig cfg;
  cfg.max_events = 30'000;
  cfg.mu_del = 0.5;
  cfg.seed = 9;
  cfg.validate_every = 1'000;
  const auto s = simulate_growth(cfg);
  CHECK(s.deletions > 1000);
  CHECK(s.euler_violations == 0);
}

TEST_CASE("return time law") {
  const auto p = return_time_distribution(1, 2, 200);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == doctest::Approx(2.0 / 3.0));
  CHECK(f_generating(1, 2, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(p[61] / p[60] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  double sum = 0;
  for (double v : p) sum += v;
  CHECK(sum == doctest::Approx(1.0));

  const auto c = return_time_distribution(1, 1, 1000);
  std::vector<double> x, y;
  for (int n = 10; n <= 1000; ++n) {
    x.push_back(std::log(n));
    y.push_back(std::log(c[n]));
  }
  CHECK(std::fabs(linear_regression(x, y).slope + 2) < 0.15);
}

TEST_CASE("vertex degree statistics") {
  CurvatureProtocol proto;
  proto.panel_vertices = 20'000;
  proto.seed = 2;
  const auto rep = curvature_statistics(proto);
  CHECK(rep.samples == 20'000);
  CHECK(rep.chi_sum == doctest::Approx(1.0));
  CHECK(rep.chi[0] == 0.0);
  CHECK(rep.chi[1] == 0.0);
  CHECK(rep.mean_curvature == doctest::Approx(rep.mean_curvature_plugin).epsilon(1e-9));
  CHECK(rep.tail_rate > 0.0);
  CHECK(rep.tail_rate < 1.0);
  REQUIRE(rep.pairs.size() == 5);
  CHECK(rep.pairs.back().pairs == 20'000);
  CHECK(std::fabs(rep.pairs.back().covariance) < 4 * rep.pairs.back().covariance_se + 0.05);
}

TEST_CASE("curvature sums over growing regions") {
  CurvatureProtocol proto;
  proto.seed = 4;
  const auto rep = clt_curvature(proto, {50, 100}, 300);
  REQUIRE(rep.regions.size() == 2);
  const double ratio = rep.regions[1].variance / rep.regions[0].variance;
  CHECK(ratio > 0.6);
  CHECK(ratio < 1.6);
  CHECK(rep.regions[1].ks_distance < 0.1);
}

TEST_CASE("reversible variant satisfies detailed balance") {
  const auto rep = reversible_variant_check(1.5, 1.0, 5);
  CHECK(rep.states > 10);
  CHECK(rep.balance_violations == 0);
  CHECK(rep.cycles4 > 0);
  CHECK(rep.cycle4_violations == 0);
  CHECK(rep.potential_matches_weight);
  CHECK(rep.stuck_states == 0);
  CHECK(rep.class_maps_checked > 0);
  MESSAGE("states " << rep.states << " class " << rep.class_maps_checked << " non-deletable " << rep.class_non_deletable
                    << " smallest " << rep.smallest_non_deletable_n);
}
