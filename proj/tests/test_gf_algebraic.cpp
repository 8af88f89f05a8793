#include "doctest.h"

#include <cmath>
#include <sstream>

#include "pgrav/enumeration.hpp"
#include "pgrav/gf_algebraic.hpp"

using namespace pgrav;

TEST_CASE("y series at beta one") {
  const auto y = y_series(1, 7);
  CHECK(y.exact[1] == 1);
  CHECK(y.exact[3] == 2);
  CHECK(y.exact[5] == 12);
  CHECK(y.exact[7] == 96);
  for (int k = 0; k <= 7; k += 2) CHECK(y.exact[k] == 0);
  CHECK(y_series(mpq_class(3, 7), 3).exact[1] == 1);
}

TEST_CASE("y series solves the cubic") {
  for (mpq_class beta : {mpq_class(1, 4), mpq_class(2, 27), mpq_class(1), mpq_class(4)}) {
    CHECK(all_zero(y_residual(beta, 40)));
    const auto y = y_series(beta, 40);
    const auto s = s_series(beta, 40);
    for (int k = 0; k <= 40; ++k) {
      CHECK(y.exact[k] >= 0);
      CHECK(s.exact[k] >= 0);
    }
  }
}

TEST_CASE("S series equals the m = 2 column") {
  const auto s = s_series(1, 20);
  const auto t = tutte_table(20, 2);
  for (int n = 0; n <= 20; ++n) CHECK(s.exact[n] == mpq_class(t.at(n, 2)));
  CHECK(s.exact[2] == 1);
  CHECK(s.exact[4] == 4);
  CHECK(s.exact[6] == 24);
  CHECK(s_series(mpq_class(5, 3), 4).exact[0] == mpq_class(5, 3));
  for (int k = 1; k <= 20; k += 2) CHECK(s.exact[k] == 0);
}

TEST_CASE("real mode tracks rational mode") {
  const auto a = s_series(mpq_class(2, 27), 60);
  const auto b = s_series(mpq_class(2, 27), 60, SeriesMode::real);
  for (int k = 0; k <= 60; ++k) CHECK(b.value(k) == doctest::Approx(a.value(k)).epsilon(1e-15));
}

TEST_CASE("critical data") {
  const auto c = critical_data(2.0 / 27.0);
  CHECK(c.x1 == doctest::Approx(1.0).epsilon(1e-15));
  const auto d = critical_data(1.0);
  CHECK(d.x1 == doctest::Approx(std::sqrt(2.0 / 27.0)).epsilon(1e-15));
  CHECK(1.0 / d.x1 == doctest::Approx(3.0 * std::sqrt(1.5)).epsilon(1e-12));
  // Branch value at the fold from the double root 1/sqrt(6 beta).
  CHECK(d.y_at_x1 == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
  CHECK(y_branch(1.0, d.x1) == doctest::Approx(d.y_at_x1).epsilon(1e-6));
  CHECK(d.radius_R / d.x1 == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("branch selection") {
  for (double x : {0.01, 0.1, 0.2, 0.27}) {
    const double y = y_branch(1.0, x);
    CHECK(y - 2 * y * y * y == doctest::Approx(x).epsilon(1e-13));
    CHECK(cardano_branch(1.0, x) == doctest::Approx(y).epsilon(1e-10));
  }
  CHECK(y_branch(1.0, 0.0) == 0.0);
  CHECK_THROWS(y_branch(1.0, 0.3));
}

TEST_CASE("S finite at the critical point") {
  CHECK(s_value(2.0 / 27.0, 1.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-6));
  const auto s = s_series(1, 30);
  double partial = 0;
  for (int k = 0; k <= 30; ++k) partial += s.value(k) * std::pow(0.1, k);
  CHECK(s_value(1.0, 0.1) == doctest::Approx(partial).epsilon(1e-12));
}

TEST_CASE("U against the enumeration double series") {
  const auto t = tutte_table(60, 62);
  double sum = 0;
  for (int n = 0; n <= 60; ++n)
    for (int m = 2; m <= 62; ++m) sum += t.at(n, m).get_d() * std::pow(0.1, n) * std::pow(0.1, m);
  CHECK(std::fabs(u_expansion(1.0, 0.1, 0.1) - sum) < 1e-8);
  CHECK(u_expansion(1.0, 0.1, 0.0) == doctest::Approx(0.0));
  const double y0 = y_branch(1.0, 0.1);
  CHECK(std::fabs(d_value(1.0, 0.1, y0)) < 1e-15);
  CHECK_THROWS(u_expansion(1.0, 0.1, 10.0));
}

TEST_CASE("functional equation residuals vanish") {
  CHECK(all_zero(feq_residual(1, 20)));
  CHECK(all_zero(main_residual(1, 20)));
  CHECK(all_zero(feq_residual(mpq_class(2, 27), 16)));
  CHECK(all_zero(main_residual(mpq_class(2, 27), 16)));
}

TEST_CASE("discriminant vanishes at the ramification points") {
  CHECK(cubic_discriminant(mpq_class(2, 27), 1) == 0);
  CHECK(cubic_discriminant(1, mpq_class(2, 27)) == 0);
  CHECK(cubic_discriminant(1, mpq_class(1, 27)) > 0);
}

TEST_CASE("coefficient asymptotics") {
  std::vector<double> synth(301);
  const double x1 = 0.3;
  synth[0] = -INFINITY;
  for (int n = 1; n <= 300; ++n) synth[n] = -2.5 * std::log(n) - n * std::log(x1);
  CHECK(coefficient_asymptotics_check(synth, x1, 1.5).sup_deviation < 1e-9);
  const auto s = s_series(1, 400);
  CHECK(coefficient_asymptotics_check(s, std::sqrt(2.0 / 27.0), 1.5).sup_deviation < 0.05);
  const auto s2 = s_series(mpq_class(2, 27), 400, SeriesMode::real);
  CHECK(coefficient_asymptotics_check(s2, 1.0, 1.5).sup_deviation < 0.05);
  CHECK_THROWS(coefficient_asymptotics_check(s_series(1, 50), 0.27, 1.5));
}

TEST_CASE("series csv") {
  std::ostringstream os;
  write_csv(os, s_series(1, 4));
  CHECK(os.str() == "order,numerator,denominator\n0,1,1\n1,0,1\n2,1,1\n3,0,1\n4,4,1\n");
}
