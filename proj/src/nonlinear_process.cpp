#include "pgrav/nonlinear_process.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <gmpxx.h>

#include "pgrav/enumeration.hpp"
#include "pgrav/gf_algebraic.hpp"
#include "pgrav/rng.hpp"

namespace pgrav {

double ProcessParams::beta() const {
  if (r1 <= 0) throw std::domain_error("beta needs r1 > 0");
  return r0() * r2 / r1;
}

void ProcessParams::validate() const {
  if (r1 < 0 || r2 < 0 || r1 + r2 > 1 + 1e-15) throw std::invalid_argument("need r1, r2 >= 0 and r1 + r2 <= 1");
}

MeasureGrid::MeasureGrid(int n, int m) : n_max(n), m_max(m) {
  if (n < 0 || m < 2) throw std::invalid_argument("grid needs n_max >= 0, m_max >= 2");
  values.assign(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(m - 1), 0.0);
}

double MeasureGrid::at(int n, int m) const {
  if (n < 0 || n > n_max || m < 2 || m > m_max) return 0.0;
  return values[static_cast<std::size_t>(n) * static_cast<std::size_t>(m_max - 1) + static_cast<std::size_t>(m - 2)];
}

double& MeasureGrid::ref(int n, int m) {
  return values[static_cast<std::size_t>(n) * static_cast<std::size_t>(m_max - 1) + static_cast<std::size_t>(m - 2)];
}

double MeasureGrid::total() const { return total_m_at_least(2); }

double MeasureGrid::total_m_at_least(int m0) const {
  double s = 0;
  for (int n = 0; n <= n_max; ++n)
    for (int m = std::max(m0, 2); m <= m_max; ++m) s += at(n, m);
  return s;
}

MeasureGrid step(const MeasureGrid& q, const ProcessParams& p) {
  p.validate();
  MeasureGrid out(q.n_max, q.m_max);
  struct Cell {
    int n, m;
    double v;
  };
  std::vector<Cell> support;
  for (int n = 0; n <= q.n_max; ++n)
    for (int m = 2; m <= q.m_max; ++m)
      if (const double v = q.at(n, m); v != 0.0) support.push_back({n, m, v});

  for (const auto& c : support) {
    const double moved = p.r1 * c.v;
    if (c.m == 2)
      out.dropped_linear += moved;
    else if (c.n + 1 <= q.n_max)
      out.ref(c.n + 1, c.m - 1) += moved;
    else
      out.truncation_loss += moved;
  }
  if (p.r2 != 0.0) {
    for (const auto& a : support)
      for (const auto& b : support) {
        const int n = a.n + b.n + 1;
        const int m = a.m + b.m - 1;
        const double v = p.r2 * a.v * b.v;
        if (n <= q.n_max && m <= q.m_max)
          out.ref(n, m) += v;
        else
          out.truncation_loss += v;
      }
  }
  out.ref(0, 2) += p.r0();
  return out;
}

FixedPointResult fixed_point(const ProcessParams& p, double tol, int n_max, int m_max, int iteration_cap) {
  p.validate();
  FixedPointResult res;
  res.grid = MeasureGrid(n_max, m_max);
  for (int it = 1; it <= iteration_cap; ++it) {
    MeasureGrid next = step(res.grid, p);
    double change = 0;
    for (std::size_t i = 0; i < next.values.size(); ++i)
      change = std::max(change, std::fabs(next.values[i] - res.grid.values[i]));
    res.grid = std::move(next);
    res.iterations = it;
    res.last_change = change;
    if (change < tol) {
      res.converged = true;
      break;
    }
  }
  const MeasureGrid again = step(res.grid, p);
  for (std::size_t i = 0; i < again.values.size(); ++i)
    res.residual = std::max(res.residual, std::fabs(again.values[i] - res.grid.values[i]));
  return res;
}

MeasureGrid sweep(const ProcessParams& p, int n_max, int m_max) {
  p.validate();
  const int width = m_max + n_max;
  MeasureGrid g(n_max, width);
  const std::size_t stride = static_cast<std::size_t>(width - 1);
  double* q = g.values.data();
  auto cell = [&](int n, int m) -> double& { return q[static_cast<std::size_t>(n) * stride + static_cast<std::size_t>(m - 2)]; };
  for (int n = 0; n <= n_max; ++n) {
    const int top = std::min(m_max + n_max - n, n + 2);
    for (int m = 2 + (n % 2); m <= top; m += 2) {
      double v = (n == 0 && m == 2) ? p.r0() : 0.0;
      if (n >= 1 && m + 1 <= n + 1) v += p.r1 * cell(n - 1, m + 1);
      if (n >= 1 && p.r2 != 0.0) {
        double acc = 0;
        for (int n1 = 0; n1 <= n - 1; ++n1) {
          const int n2 = n - 1 - n1;
          // m1 has the parity of n1, m2 = m + 1 - m1 that of n2.
          const int lo = std::max(2, m + 1 - (n2 + 2));
          const int hi = std::min(m - 1, n1 + 2);
          int m1 = lo + ((lo - n1) & 1);
          for (; m1 <= hi; m1 += 2) acc += cell(n1, m1) * cell(n2, m + 1 - m1);
        }
        v += p.r2 * acc;
      }
      cell(n, m) = v;
    }
  }
  return g;
}

double scaling_deviation(const MeasureGrid& q, const ProcessParams& p, int n_limit, int m_limit) {
  const mpq_class beta(p.beta());
  const auto w = w_table(beta, n_limit);
  double worst = 0;
  for (int n = 0; n <= std::min(n_limit, q.n_max); ++n)
    for (int m = 2; m <= std::min(m_limit, q.m_max); ++m) {
      const int k = m - 2;
      if (k > n || sgn(w[n][k]) == 0) {
        worst = std::max(worst, std::fabs(q.at(n, m)));
        continue;
      }
      const double canon = w[n][k].get_d();
      const double scaled = q.at(n, m) * (p.r2 / p.r1) * std::pow(p.r1, -n);
      worst = std::max(worst, std::fabs(scaled / canon - 1.0));
    }
  return worst;
}

namespace {

double tv(const MeasureGrid& a, const MeasureGrid& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::fabs(a.values[i] - b.values[i]);
  s += std::fabs(a.truncation_loss - b.truncation_loss) + std::fabs(a.dropped_linear - b.dropped_linear);
  return 0.5 * s;
}

MeasureGrid random_measure(CounterRng& rng, int n_sup, int m_sup, int n_max, int m_max) {
  MeasureGrid g(n_max, m_max);
  double total = 0;
  for (int n = 0; n <= n_sup; ++n)
    for (int m = 2; m <= m_sup; ++m)
      if ((n - m) % 2 == 0 && rng.bernoulli(0.6)) {
        const double v = rng.exponential(1.0);
        g.ref(n, m) = v;
        total += v;
      }
  if (total == 0) {
    g.ref(0, 2) = 1;
    total = 1;
  }
  for (auto& v : g.values) v /= total;
  return g;
}

} // namespace

ContractionReport contraction_estimate(const ProcessParams& p, int trials, std::uint64_t seed) {
  p.validate();
  ContractionReport rep;
  rep.bound = p.r1 + 2 * p.r2;
  rep.seed = seed;
  // Supports small enough that one step never leaves the grid.
  constexpr int n_sup = 6, m_sup = 8;
  constexpr int n_max = 2 * n_sup + 1, m_max = 2 * m_sup - 1;
  double sum = 0;
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    const MeasureGrid a = random_measure(rng, n_sup, m_sup, n_max, m_max);
    MeasureGrid b;
    if (t % 2 == 0) {
      b = random_measure(rng, n_sup, m_sup, n_max, m_max);
    } else {
      // Nearby pair: mix a small perturbation into a.
      const MeasureGrid c = random_measure(rng, n_sup, m_sup, n_max, m_max);
      const double eps = 1e-3 * rng.uniform_open0();
      b = a;
      for (std::size_t i = 0; i < b.values.size(); ++i) b.values[i] = (1 - eps) * a.values[i] + eps * c.values[i];
    }
    const double d0 = tv(a, b);
    if (d0 == 0) continue;
    const double d1 = tv(step(a, p), step(b, p));
    const double f = d1 / d0;
    rep.max_factor = std::max(rep.max_factor, f);
    sum += f;
    ++rep.trials;
    if (f > rep.bound + 1e-12) ++rep.violations;
  }
  rep.mean_factor = rep.trials ? sum / rep.trials : 0.0;
  return rep;
}

ScanPoint classify(const ProcessParams& p, int n_max) {
  p.validate();
  ScanPoint s;
  s.r1 = p.r1;
  s.r2 = p.r2;
  s.beta = p.beta();
  s.x1 = critical_data(s.beta).x1;
  s.predicted_ratio = p.r1 / s.x1;
  s.predicted_column_finite = 13.5 * p.r1 * p.r2 * p.r0() <= 1.0;
  s.predicted_total_finite = s.predicted_column_finite && y_radius(s.beta, std::min(p.r1, s.x1)) > 1.0;

  const MeasureGrid g = sweep(p, n_max, 2);
  std::vector<double> logs(static_cast<std::size_t>(n_max + 1));
  for (int n = 0; n <= n_max; ++n) {
    const double v = g.at(n, 2);
    logs[n] = v > 0 ? std::log(v) : -INFINITY;
  }
  FitOptions opt;
  opt.min_terms = n_max / 2 - 2;
  const auto fit = fit_growth_log(logs, opt);
  s.empirical_ratio = fit.c;
  s.empirical_ratio_se = fit.c_se;
  s.empirical_column_finite = fit.c + 3 * fit.c_se < 1.0;
  s.agree = s.empirical_column_finite == s.predicted_column_finite;
  return s;
}

std::vector<ScanPoint> criticality_scan(const ScanOptions& opt) {
  std::vector<ScanPoint> out;
  const double den = opt.grid + 1;
  for (int i = 0; i < opt.grid; ++i)
    for (int j = 0; j < opt.grid; ++j) {
      ProcessParams p;
      p.r1 = (i + 1) / den;
      p.r2 = (j + 1) / den * (1 - p.r1);
      out.push_back(classify(p, opt.n_max));
    }
  return out;
}

void write_csv(std::ostream& os, const MeasureGrid& q) {
  os << "N,m,q\n";
  os.precision(17);
  for (int n = 0; n <= q.n_max; ++n)
    for (int m = 2; m <= q.m_max; ++m)
      if (q.at(n, m) != 0.0) os << n << ',' << m << ',' << q.at(n, m) << '\n';
}

} // namespace pgrav
