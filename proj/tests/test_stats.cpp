#include "doctest.h"

#include <cmath>
#include <vector>

#include "pgrav/rng.hpp"
#include "pgrav/stats.hpp"

using namespace pgrav;

TEST_CASE("regression recovers an exact line") {
  std::vector<double> x{1, 2, 3, 4, 5}, y;
  for (double v : x) y.push_back(3 - 2 * v);
  const auto f = linear_regression(x, y);
  CHECK(f.slope == doctest::Approx(-2));
  CHECK(f.intercept == doctest::Approx(3));
  CHECK(f.slope_se == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("mean and interval") {
  const std::vector<double> xs{1, 2, 3, 4};
  const auto m = mean_ci(xs);
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(m.hi - m.lo == doctest::Approx(2 * 1.96 * m.se));
}

TEST_CASE("normal cdf landmarks") {
  CHECK(normal_cdf(0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975));
}

TEST_CASE("ks distances on generated samples") {
  CounterRng rng(7);
  std::vector<double> gauss, half, other;
  for (int i = 0; i < 20000; ++i) {
    const double u1 = rng.uniform_open0(), u2 = rng.uniform();
    const double z = std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
    gauss.push_back(2 + 3 * z);
    half.push_back(std::fabs(z));
    other.push_back(rng.uniform());
  }
  CHECK(ks_normal_fitted(gauss) < 0.015);
  CHECK(ks_half_normal_fitted(half) < 0.015);
  CHECK(ks_normal_fitted(other) > 0.03);
  CHECK(ks_two_sample(gauss, gauss) == 0.0);
  CHECK(ks_two_sample(half, other) > 0.1);
}

TEST_CASE("total variation and covariance") {
  const std::vector<double> a{1, 1, 0}, b{0, 2, 2};
  CHECK(tv_distance(a, b) == doctest::Approx(0.5));
  const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8};
  CHECK(covariance(x, y).cov == doctest::Approx(2 * 5.0 / 3.0));
}
