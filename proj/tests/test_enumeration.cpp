#include "doctest.h"

#include <cmath>
#include <sstream>

#include "pgrav/enumeration.hpp"

using namespace pgrav;

TEST_CASE("hand-unrolled small counts") {
  const auto t = tutte_table(8, 12);
  CHECK(t.at(0, 2) == 1);
  CHECK(t.at(0, 3) == 0);
  CHECK(t.at(1, 3) == 1);
  CHECK(t.at(2, 4) == 2);
  CHECK(t.at(3, 3) == 4);
  CHECK(t.at(5, 3) == 24);
  CHECK(t.at(4, 2) == 4);
  for (int n = 1; n <= 8; ++n) CHECK(t.at(n, 2) == t.at(n - 1, 3));
}

TEST_CASE("parity and sign") {
  const auto t = tutte_table(20, 22);
  for (int n = 0; n <= 20; ++n)
    for (int m = 2; m <= 22; ++m) {
      CHECK(t.at(n, m) >= 0);
      if ((n - m) % 2 != 0) CHECK(t.at(n, m) == 0);
      if (m > n + 2) CHECK(t.at(n, m) == 0);
    }
}

TEST_CASE("cell cap") {
  CHECK_THROWS_AS(tutte_table(1000, 1000, 1000), ResourceError);
}

TEST_CASE("closed form by direct factorials") {
  CHECK(closed_form_rooted(3, 0) == 4);
  CHECK(closed_form_rooted(3, 1) == 24);
  CHECK(closed_form_rooted(2, 1) == 4);
  CHECK_THROWS(closed_form_rooted(1, 0));
  CHECK_THROWS(closed_form_rooted(3, -1));
}

TEST_CASE("closed form agrees with the recurrence") {
  const auto t = tutte_table(30, 12);
  for (int m = 2; m <= 10; ++m)
    for (int j = 0; m + 2 * j <= 30; ++j) CHECK(closed_form_rooted(m, j) == t.at(m + 2 * j, m));
}

TEST_CASE("exhaustive generation oracle") {
  const auto b1 = brute_force_counts(1);
  CHECK(b1.at(0, 2) == 1);
  CHECK(b1.at(1, 3) == 1);
  CHECK(b1.row_total(1) == 1);
  const auto b3 = brute_force_counts(3);
  CHECK(b3.at(3, 3) == 4);
  const auto b = brute_force_counts(6);
  const auto t = tutte_table(6, 8);
  for (int n = 0; n <= 6; ++n)
    for (int m = 2; m <= 8; ++m) CHECK(b.at(n, m) == t.at(n, m));
}

TEST_CASE("unrooted estimate") {
  CHECK(unrooted_estimate(1, 1) == mpq_class(1, 3));
  CHECK(unrooted_estimate(10, 60) == mpq_class(2));
  CHECK_THROWS(unrooted_estimate(0, 1));
  const auto u = unrooted_exact_counts(4);
  CHECK(u[0] == 1); // the edge map
  CHECK(u[1] == 1); // the triangle
  const auto t = tutte_table(4, 6);
  for (int n = 0; n <= 4; ++n) CHECK(u[n] <= t.row_total(n));
}

TEST_CASE("synthetic growth fits") {
  std::vector<double> geo, pw;
  for (int n = 0; n <= 200; ++n) {
    geo.push_back(n * std::log(2.0));
    pw.push_back(n == 0 ? 0.0 : -2.5 * std::log(n) + n * std::log(3.0));
  }
  auto f = fit_growth_log(geo);
  CHECK(f.c == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::fabs(f.alpha) < 1e-6);
  auto g = fit_growth_log(pw);
  CHECK(g.c == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(std::fabs(g.alpha + 2.5) < 0.05);
  CHECK_THROWS(fit_growth_log(std::vector<double>(20, 1.0)));
  CHECK_THROWS(fit_growth(std::vector<double>{1.0, -1.0}));
}

TEST_CASE("skips zero terms by parity") {
  const auto t = tutte_table(240, 2);
  std::vector<mpz_class> col;
  for (int n = 0; n <= 240; ++n) col.push_back(t.at(n, 2));
  auto f = fit_growth(col);
  CHECK(f.c == doctest::Approx(std::sqrt(27.0 / 2.0)).epsilon(0.01));
  CHECK(std::fabs(f.alpha + 2.5) < 0.15);
}

TEST_CASE("a priori bounds bracket the row totals") {
  const auto t = tutte_table(40, 42);
  const auto b = apriori_bounds(t);
  CHECK(b.gamma_lower > 1.0);
  CHECK(b.gamma_lower <= b.gamma_upper);
  for (int n = 2; n <= 40; ++n) {
    CHECK(log_abs(t.row_total(n)) >= n * std::log(b.gamma_lower) - 1e-9);
    CHECK(log_abs(t.row_total(n)) <= n * std::log(b.gamma_upper) + 1e-9);
  }
}

TEST_CASE("uniform regime exponent near -2") {
  const auto f = uniform_regime_fit(1, 1, 300);
  CHECK(std::fabs(f.alpha + 2.0) < 0.05);
}

TEST_CASE("csv export") {
  std::ostringstream os;
  write_csv(os, tutte_table(3, 4));
  CHECK(os.str().rfind("N,m,count\n", 0) == 0);
  CHECK(os.str().find("3,3,4\n") != std::string::npos);
}
