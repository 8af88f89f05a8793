#include "doctest.h"

#include <cmath>

#include "pgrav/nonlinear_process.hpp"

using namespace pgrav;

namespace {
ProcessParams params(double r1, double r2) {
  ProcessParams p;
  p.r1 = r1;
  p.r2 = r2;
  return p;
}
} // namespace

TEST_CASE("first steps from zero") {
  const auto p = params(0.3, 0.2);
  MeasureGrid q(6, 8);
  const auto q1 = step(q, p);
  CHECK(q1.at(0, 2) == doctest::Approx(0.5));
  CHECK(q1.total() == doctest::Approx(0.5));
  const auto q2 = step(q1, p);
  CHECK(q2.at(1, 3) == doctest::Approx(0.2 * 0.5 * 0.5));
  CHECK(q2.dropped_linear == doctest::Approx(0.3 * 0.5));
}

TEST_CASE("mass identity") {
  const auto p = params(0.25, 0.15);
  MeasureGrid q(30, 32);
  for (int it = 0; it < 8; ++it) {
    const auto next = step(q, p);
    const double expected = p.r1 * q.total_m_at_least(3) + p.r2 * q.total() * q.total() + p.r0();
    CHECK(next.total() + next.truncation_loss == doctest::Approx(expected).epsilon(1e-13));
    CHECK(next.dropped_linear == doctest::Approx(p.r1 * (q.total() - q.total_m_at_least(3))).epsilon(1e-13));
    q = next;
  }
}

TEST_CASE("monotone iterates and parity") {
  const auto p = params(0.2, 0.2);
  MeasureGrid q(12, 14);
  for (int it = 0; it < 15; ++it) {
    const auto next = step(q, p);
    for (std::size_t i = 0; i < q.values.size(); ++i) CHECK(next.values[i] >= q.values[i]);
    q = next;
  }
  for (int n = 0; n <= 12; ++n)
    for (int m = 2; m <= 14; ++m)
      if ((n + m) % 2 != 0) CHECK(q.at(n, m) == 0.0);
  for (int m = 3; m <= 14; ++m) CHECK(q.at(0, m) == 0.0);
}

TEST_CASE("fixed point balance and scaling") {
  const auto p = params(0.2, 0.2);
  const auto fp = fixed_point(p, 1e-12, 20, 22);
  CHECK(fp.converged);
  CHECK(fp.residual < 1e-12);
  CHECK(fp.grid.at(0, 2) == p.r0()); // 1 - r1 - r2 with no kernel inflow
  CHECK(fp.grid.at(0, 2) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(scaling_deviation(fp.grid, p, 20, 20) < 1e-9);
}

TEST_CASE("pure linear with immigration") {
  const auto p = params(0.4, 0.0);
  const auto fp = fixed_point(p, 1e-14, 10, 12);
  CHECK(fp.grid.at(0, 2) == doctest::Approx(0.6));
  CHECK(fp.grid.total() == doctest::Approx(0.6));
}

TEST_CASE("sweep equals iteration on the kept cells") {
  for (auto p : {params(0.2, 0.2), params(0.05, 0.7), params(0.6, 0.1)}) {
    const auto fp = fixed_point(p, 0.0, 14, 16, 40);
    const auto sw = sweep(p, 14, 2);
    for (int n = 0; n <= 14; ++n)
      for (int m = 2; m <= 2 + 14 - n; ++m) CHECK(sw.at(n, m) == doctest::Approx(fp.grid.at(n, m)).epsilon(1e-14));
  }
}

TEST_CASE("contraction") {
  const auto rep = contraction_estimate(params(0.3, 0.2), 200, 11);
  CHECK(rep.bound == doctest::Approx(0.7));
  CHECK(rep.violations == 0);
  CHECK(rep.max_factor <= 0.7 + 1e-12);
  CHECK(rep.max_factor > 0.0);
  CHECK(contraction_estimate(params(0.0, 0.0), 20, 1).max_factor == 0.0);
}

TEST_CASE("classification") {
  const auto s = classify(params(0.2, 0.2), 104);
  CHECK(s.beta == doctest::Approx(0.6));
  CHECK(s.x1 == doctest::Approx(std::sqrt(2.0 / (27 * 0.6))));
  CHECK(s.predicted_ratio == doctest::Approx(0.569).epsilon(1e-3));
  CHECK(std::fabs(s.empirical_ratio - s.predicted_ratio) < 2e-3);
  CHECK(s.agree);
  // canonical threshold: beta = 2/27 puts x1 at 1
  const auto t = classify(params(0.5, 0.25), 104);
  CHECK(t.predicted_column_finite);
}

TEST_CASE("deep subcritical totals converge under grid doubling") {
  const auto p = params(0.05, 0.05);
  double prev = sweep(p, 20, 22).total();
  const double next = sweep(p, 40, 42).total();
  CHECK(std::fabs(next - prev) < 1e-10);
}
