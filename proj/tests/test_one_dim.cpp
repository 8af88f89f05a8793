#include "doctest.h"

#include <array>
#include <cmath>

#include "pgrav/enumeration.hpp"
#include "pgrav/one_dim.hpp"

using namespace pgrav;

namespace {

mpz_class brute_paths(int d, int n, std::vector<int> x) {
  if (n == 0) {
    for (int v : x)
      if (v) return 0;
    return 1;
  }
  mpz_class s = 0;
  for (int k = 0; k < d; ++k)
    for (int e : {-1, 1}) {
      x[k] += e;
      s += brute_paths(d, n - 1, x);
      x[k] -= e;
    }
  return s;
}

} // namespace

TEST_CASE("path counts") {
  const int z1[] = {0};
  const int z2[] = {0, 0};
  CHECK(path_counts(1, 2, z1) == 2);
  CHECK(path_counts(2, 2, z2) == 4);
  CHECK(path_counts(2, 3, z2) == 0);
  CHECK(path_counts(1, 0, z1) == 1);
  for (int d = 1; d <= 3; ++d)
    for (int n = 0; n <= 6; ++n) {
      std::vector<int> x(d, 0);
      x[0] = n % 3 - 1;
      if (d > 1) x[1] = 1;
      CHECK(path_counts(d, n, x) == brute_paths(d, n, x));
    }
}

TEST_CASE("path counts satisfy the one-step convolution") {
  const int d = 2;
  for (int n = 1; n <= 30; n += 7) {
    const std::array<int, 2> x{3, -2};
    mpz_class s = 0;
    for (int k = 0; k < d; ++k)
      for (int e : {-1, 1}) {
        auto y = x;
        y[k] -= e;
        s += path_counts(d, n - 1, y);
      }
    CHECK(path_counts(d, n, x) == s);
  }
}

TEST_CASE("return counts in the plane decay like 1 / N") {
  const int z[] = {0, 0};
  double lo = 1e9, hi = 0;
  for (int n = 100; n <= 200; n += 10) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 4, n);
    const double v = mpq_class(path_counts(2, n, z) * n, p).get_d();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo < 1.02);
}

TEST_CASE("green function") {
  const int z[] = {0, 0};
  const auto g = green_function(2, 50.0, z, 10);
  CHECK(g.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(green_function(2, std::log(4.0), z, 10), std::domain_error);
  CHECK_THROWS_AS(susceptibility(1, 0.5), std::domain_error);
  // G(0) in d = 1 is sum_N C(2N, N) x^N with x = exp(-2 mu), which is 1 / sqrt(1 - 4x).
  const int z1[] = {0};
  const double mu = std::log(2.0) + 0.3;
  const double x = std::exp(-2 * mu);
  const auto g1 = green_function(1, mu, z1, cutoff_for(0.3, 1e-12));
  CHECK(g1.value == doctest::Approx(1 / std::sqrt(1 - 4 * x)).epsilon(1e-9));
}

TEST_CASE("susceptibility sum matches the closed form in every dimension") {
  for (int d = 1; d <= 3; ++d)
    for (double delta : {0.4, 1.0}) {
      const double mu = mu_critical(d) + delta;
      const auto s = susceptibility_sum(d, mu, cutoff_for(delta, 1e-9));
      CHECK(std::fabs(s.value - susceptibility(d, mu)) <= s.tail_bound + 1e-9);
    }
  const auto s2 = susceptibility_sum(2, mu_critical(2) + 0.1, cutoff_for(0.1, 1e-9));
  CHECK(std::fabs(s2.value - susceptibility(2, mu_critical(2) + 0.1)) < 1e-6);
  CHECK_THROWS_AS(susceptibility_sum(3, mu_critical(3) + 1e-3, 30000), ResourceError);
}

TEST_CASE("gamma exponent") {
  const auto g = gamma_fit(1, 1e-2, 1.0, 9);
  // The correction 1 + delta / 2 tilts the slope on a wide range.
  CHECK(g.slope == doctest::Approx(-0.9).epsilon(0.1));
  const auto fine = gamma_fit(1, 1e-3, 1e-2, 5);
  CHECK(std::fabs(fine.slope + 1) < 0.005);
}

TEST_CASE("queue length is geometric below criticality") {
  QueueConfig c;
  c.lambda = 1;
  c.nu = 2;
  c.horizon = 5e4;
  const auto q = lifo_queue_sim(c);
  CHECK(std::fabs(q.decay_rate - std::log(2.0)) < 4 * q.decay_rate_se + 0.01);
  CHECK(q.occupation[1] / q.occupation[0] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(q.insertions - q.deletions == q.final_length);

  const auto f = context_free_sim(c);
  CHECK(std::fabs(f.decay_rate - std::log(2.0)) < 4 * f.decay_rate_se + 0.01);
}

TEST_CASE("supercritical queue has a uniform frozen bulk") {
  QueueConfig c;
  c.lambda = 2;
  c.nu = 1;
  c.alphabet = 3;
  c.horizon = 2e4;
  const auto q = lifo_queue_sim(c);
  CHECK(q.growth_rate == doctest::Approx(1.0).epsilon(0.05));
  const double n = static_cast<double>(q.bulk_symbols);
  for (double f : q.symbol_freq) CHECK(std::fabs(f - 1.0 / 3) < 4 * std::sqrt(2.0 / 9 / n));
  for (double f : q.pair_freq) CHECK(std::fabs(f - 1.0 / 9) < 5 * std::sqrt(8.0 / 81 / n));
}

TEST_CASE("empty queue only grows") {
  QueueConfig c;
  c.lambda = 1;
  c.nu = 100;
  c.horizon = 1000;
  const auto q = lifo_queue_sim(c);
  CHECK(q.deletions <= q.insertions);
  CHECK(q.final_length >= 0);
}

TEST_CASE("exact detailed balance") {
  CHECK(detailed_balance_failures(1, 2, 2, 8) == 0);
  CHECK(detailed_balance_failures(mpq_class(3, 7), mpq_class(5, 3), 3, 6) == 0);
}

TEST_CASE("critical queue length scales like sqrt(t)") {
  const auto lifo = critical_clt(OneDimProcess::lifo, 1.0, 1000, 3000, 4);
  CHECK(lifo.ks < 0.05);
  CHECK(lifo.scale_ratio == doctest::Approx(1.0).epsilon(0.06));
  CHECK(lifo.scale == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
  // Rates proportional to the length make it grow linearly instead.
  const auto cf = critical_clt(OneDimProcess::context_free, 1.0, 100, 800, 4);
  CHECK(cf.scale_ratio > 1.6);
}

TEST_CASE("diffusion scaling") {
  const auto a = diffusion_scaling(400, 1.0, 2000, 9);
  const auto b = diffusion_scaling(1600, 1.0, 2000, 9);
  double ma = 0, mb = 0;
  for (double v : a) ma += v / a.size();
  for (double v : b) mb += v / b.size();
  CHECK(ma == doctest::Approx(mb).epsilon(0.08));
}
