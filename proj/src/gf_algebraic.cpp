#include "pgrav/gf_algebraic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "pgrav/enumeration.hpp"

namespace pgrav {

namespace {

Real to_real(const mpq_class& q) {
  return Real(q.get_num().get_str()) / Real(q.get_den().get_str());
}

bool zero(const mpq_class& q) { return sgn(q) == 0; }
bool zero(const Real& r) { return r == 0; }

template <class T>
std::vector<T> y_coeffs(const T& beta, int order) {
  std::vector<T> y(order + 1, T(0)), y2(order + 1, T(0)), y3(order + 1, T(0));
  if (order >= 1) y[1] = 1;
  const T two_beta = beta * 2;
  for (int n = 2; n <= order; ++n) {
    T acc = 0;
    for (int i = 1; i <= n - 2; ++i)
      if (!zero(y[i]) && !zero(y[n - 1 - i])) acc += y[i] * y[n - 1 - i];
    y2[n - 1] = acc;
    if (n % 2 == 0) continue; // y is odd
    acc = 0;
    for (int i = 1; i <= n - 2; ++i)
      if (!zero(y[i]) && !zero(y2[n - i])) acc += y[i] * y2[n - i];
    y3[n] = acc;
    y[n] = two_beta * acc;
  }
  return y;
}

template <class T>
std::vector<T> mul(const std::vector<T>& a, const std::vector<T>& b, int order) {
  std::vector<T> c(order + 1, T(0));
  for (int i = 0; i <= order; ++i) {
    if (zero(a[i])) continue;
    for (int j = 0; i + j <= order; ++j)
      if (!zero(b[j])) c[i + j] += a[i] * b[j];
  }
  return c;
}

template <class T>
std::vector<T> s_coeffs(const T& beta, int order) {
  const auto y = y_coeffs(beta, order);
  auto u = mul(y, y, order);
  for (auto& c : u) c *= beta;
  const auto u2 = mul(u, u, order);
  // d = (1 - 2u)^2 = 1 - 4u + 4u^2, numerator beta (1 - 3u).
  std::vector<T> d(order + 1), num(order + 1);
  for (int n = 0; n <= order; ++n) {
    d[n] = u2[n] * 4 - u[n] * 4;
    num[n] = -(u[n] * 3) * beta;
  }
  d[0] += 1;
  num[0] += beta;
  std::vector<T> s(order + 1, T(0));
  for (int n = 0; n <= order; ++n) {
    T acc = num[n];
    for (int k = 1; k <= n; ++k)
      if (!zero(d[k]) && !zero(s[n - k])) acc -= d[k] * s[n - k];
    s[n] = acc / d[0];
  }
  return s;
}

SeriesCoeffs pack(std::vector<mpq_class>&& v, int order) {
  SeriesCoeffs s;
  s.mode = SeriesMode::rational;
  s.order = order;
  s.exact = std::move(v);
  return s;
}

SeriesCoeffs pack(std::vector<Real>&& v, int order) {
  SeriesCoeffs s;
  s.mode = SeriesMode::real;
  s.order = order;
  s.approx = std::move(v);
  return s;
}

void check_beta(const mpq_class& beta, int order) {
  if (sgn(beta) <= 0) throw std::domain_error("beta must be positive");
  if (order < 0) throw std::invalid_argument("order must be nonnegative");
}

double x1_of(double beta) { return std::sqrt(2.0 / (27.0 * beta)); }

void check_x(double beta, double x) {
  if (!(beta > 0)) throw std::domain_error("beta must be positive");
  if (!(x >= 0) || x > x1_of(beta) * (1 + 1e-12)) throw std::domain_error("x outside [0, x1]");
}

} // namespace

double SeriesCoeffs::value(int k) const {
  return mode == SeriesMode::rational ? exact.at(k).get_d() : approx.at(k).convert_to<double>();
}

double SeriesCoeffs::log_abs(int k) const {
  if (mode == SeriesMode::rational) return pgrav::log_abs(exact.at(k));
  const Real& r = approx.at(k);
  if (r == 0) return -std::numeric_limits<double>::infinity();
  return boost::multiprecision::log(boost::multiprecision::abs(r)).convert_to<double>();
}

bool SeriesCoeffs::is_zero(int k) const {
  return mode == SeriesMode::rational ? sgn(exact.at(k)) == 0 : approx.at(k) == 0;
}

SeriesCoeffs y_series(const mpq_class& beta, int order, SeriesMode mode) {
  check_beta(beta, order);
  if (mode == SeriesMode::rational) return pack(y_coeffs<mpq_class>(beta, order), order);
  return pack(y_coeffs<Real>(to_real(beta), order), order);
}

SeriesCoeffs s_series(const mpq_class& beta, int order, SeriesMode mode) {
  check_beta(beta, order);
  if (mode == SeriesMode::rational) return pack(s_coeffs<mpq_class>(beta, order), order);
  return pack(s_coeffs<Real>(to_real(beta), order), order);
}

CriticalData critical_data(double beta) {
  if (!(beta > 0)) throw std::domain_error("beta must be positive");
  CriticalData c;
  c.beta = beta;
  c.x1 = x1_of(beta);
  c.y_at_x1 = std::cbrt(c.x1 / (4.0 * beta));
  c.radius_R = y_radius(beta, c.x1);
  return c;
}

double y_branch(double beta, double x) {
  check_x(beta, x);
  const double yc = 1.0 / std::sqrt(6.0 * beta);
  double y = 0;
  constexpr int steps = 64;
  for (int k = 1; k <= steps; ++k) {
    const double xk = x * k / steps;
    for (int it = 0; it < 50; ++it) {
      const double g = y - 2 * beta * y * y * y - xk;
      const double dg = 1 - 6 * beta * y * y;
      if (dg <= 1e-12) break;
      const double step = g / dg;
      y -= step;
      if (std::fabs(step) < 1e-17) break;
    }
  }
  // Newton stalls at the fold; bisection on the increasing part finishes the job.
  if (!(y >= 0 && y <= yc) || std::fabs(y - 2 * beta * y * y * y - x) > 1e-14) {
    double lo = 0, hi = yc;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mid - 2 * beta * mid * mid * mid < x ? lo : hi) = mid;
    }
    y = 0.5 * (lo + hi);
  }
  return y;
}

double cardano_branch(double beta, double x) {
  check_x(beta, x);
  if (x == 0) return 0;
  const double p = -1.0 / (2.0 * beta);
  const double q = x / (2.0 * beta);
  const double r = 2.0 * std::sqrt(-p / 3.0);
  const double arg = std::clamp(3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p), -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  const double tracked = y_branch(beta, x);
  double best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double root = r * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
    if (std::fabs(root - tracked) < best_gap) {
      best_gap = std::fabs(root - tracked);
      best = root;
    }
  }
  return best;
}

double s_value(double beta, double x) {
  const double y = y_branch(beta, x);
  const double u = beta * y * y;
  return beta * (1 - 3 * u) / ((1 - 2 * u) * (1 - 2 * u));
}

double y_radius(double beta, double x) {
  check_x(beta, x);
  if (x == 0) return 0;
  const double y0 = y_branch(beta, x);
  return x / (4.0 * beta * y0 * y0);
}

double d_value(double beta, double x, double y) {
  check_x(beta, x);
  if (x == 0) throw std::domain_error("x must be positive");
  const double y0 = y_branch(beta, x);
  const double a = x * x / (y0 * y0);
  const double b = -4.0 * beta * x;
  return (y - y0) * (y - y0) * (a + b * y);
}

double u_expansion(double beta, double x, double y) {
  check_x(beta, x);
  if (x == 0) throw std::domain_error("x must be positive");
  const double y0 = y_branch(beta, x);
  const double a = x * x / (y0 * y0);
  const double b = -4.0 * beta * x;
  if (y < 0 || a + b * y <= 0) throw std::domain_error("y outside the convergence disk");
  return (y - x - (y - y0) * std::sqrt(a + b * y)) / (2.0 * x);
}

mpq_class cubic_discriminant(const mpq_class& beta, const mpq_class& x_squared) {
  const mpq_class p = mpq_class(-1) / (2 * beta);
  return p * p * (mpq_class(2) / beta - 27 * x_squared);
}

std::vector<std::vector<mpq_class>> w_table(const mpq_class& beta, int order) {
  std::vector<std::vector<mpq_class>> w(static_cast<std::size_t>(order + 1));
  for (int n = 0; n <= order; ++n) w[n].assign(static_cast<std::size_t>(n + 1), 0);
  w[0][0] = beta;
  mpq_class prod;
  for (int n = 1; n <= order; ++n)
    for (int k = 0; k <= n; ++k) {
      mpq_class& c = w[n][k];
      if (k + 1 <= n - 1) c = w[n - 1][k + 1];
      for (int n1 = 0; n1 <= n - 1; ++n1) {
        const int n2 = n - 1 - n1;
        for (int k1 = 0; k1 <= std::min(k - 1, n1); ++k1) {
          const int k2 = k - 1 - k1;
          if (k2 > n2) continue;
          if (zero(w[n1][k1]) || zero(w[n2][k2])) continue;
          prod = w[n1][k1] * w[n2][k2];
          c += prod;
        }
      }
    }
  return w;
}

std::vector<std::vector<mpq_class>> feq_residual(const mpq_class& beta, int order) {
  const auto w = w_table(beta, order);
  const auto s = s_series(beta, order);
  auto at = [&](int n, int k) -> mpq_class {
    if (n < 0 || k < 0 || k > n) return 0;
    return w[n][k];
  };
  std::vector<std::vector<mpq_class>> r(static_cast<std::size_t>(order + 1));
  for (int n = 0; n <= order; ++n) {
    r[n].assign(static_cast<std::size_t>(n + 2), 0);
    for (int k = -1; k <= n; ++k) {
      mpq_class v = at(n, k);
      if (n == 0 && k == 0) v -= beta;
      if (k >= 1) {
        for (int n1 = 0; n1 <= n - 1; ++n1)
          for (int k1 = 0; k1 <= k - 1; ++k1) v -= at(n1, k1) * at(n - 1 - n1, k - 1 - k1);
      }
      if (n >= 1) {
        if (k >= 0)
          v -= at(n - 1, k + 1);
        else
          v -= at(n - 1, 0) - s.exact[n - 1];
      }
      r[n][k + 1] = v;
    }
  }
  return r;
}

std::vector<std::vector<mpq_class>> main_residual(const mpq_class& beta, int order) {
  const auto w = w_table(beta, order);
  const auto s = s_series(beta, order);
  const int my = order + 3;
  // P = 2xU + x - y with U(N, m) = w(N, m - 2).
  std::vector<std::vector<mpq_class>> p(order + 1, std::vector<mpq_class>(my + 1, 0));
  for (int n = 1; n <= order; ++n)
    for (int k = 0; k <= n - 1; ++k) p[n][k + 2] = 2 * w[n - 1][k];
  if (order >= 1) p[1][0] += 1;
  p[0][1] -= 1;
  std::vector<std::vector<mpq_class>> r(order + 1, std::vector<mpq_class>(2 * my + 1, 0));
  for (int n1 = 0; n1 <= order; ++n1)
    for (int m1 = 0; m1 <= my; ++m1) {
      if (zero(p[n1][m1])) continue;
      for (int n2 = 0; n1 + n2 <= order; ++n2)
        for (int m2 = 0; m2 <= my; ++m2)
          if (!zero(p[n2][m2])) r[n1 + n2][m1 + m2] += p[n1][m1] * p[n2][m2];
    }
  for (int n = 0; n + 2 <= order; ++n) r[n + 2][2] -= 4 * s.exact[n];
  if (order >= 2) r[2][0] -= 1;
  if (order >= 1) {
    r[1][1] += 2;
    r[1][3] += 4 * beta;
  }
  r[0][2] -= 1;
  return r;
}

SeriesCoeffs y_residual(const mpq_class& beta, int order) {
  auto y = y_series(beta, order);
  const auto y2 = mul(y.exact, y.exact, order);
  const auto y3 = mul(y2, y.exact, order);
  std::vector<mpq_class> r(order + 1, 0);
  for (int n = 0; n <= order; ++n) r[n] = -(y.exact[n] - 2 * beta * y3[n]);
  if (order >= 1) r[1] += 1;
  return pack(std::move(r), order);
}

bool all_zero(const std::vector<std::vector<mpq_class>>& table) {
  for (const auto& row : table)
    for (const auto& v : row)
      if (!zero(v)) return false;
  return true;
}

bool all_zero(const SeriesCoeffs& s) {
  for (int k = 0; k <= s.order; ++k)
    if (!s.is_zero(k)) return false;
  return true;
}

AsymptoticsReport coefficient_asymptotics_check(const std::vector<double>& log_terms, double x1, double b) {
  std::vector<int> support;
  for (int n = 1; n < static_cast<int>(log_terms.size()); ++n)
    if (std::isfinite(log_terms[n])) support.push_back(n);
  if (support.size() < 100) throw std::invalid_argument("need at least 100 nonzero coefficients");
  const std::size_t first = support.size() / 2;
  std::vector<double> logv;
  for (std::size_t i = first; i < support.size(); ++i) {
    const int n = support[i];
    logv.push_back(log_terms[n] + n * std::log(x1) + (b + 1) * std::log(static_cast<double>(n)));
  }
  const double ref = logv.front();
  double mean = 0;
  for (double l : logv) mean += std::exp(l - ref);
  mean /= static_cast<double>(logv.size());
  AsymptoticsReport rep;
  for (double l : logv) rep.sup_deviation = std::max(rep.sup_deviation, std::fabs(std::exp(l - ref) / mean - 1));
  rep.mean = mean * std::exp(ref);
  rep.window_begin = support[first];
  rep.window_end = support.back();
  rep.terms = static_cast<int>(logv.size());
  return rep;
}

AsymptoticsReport coefficient_asymptotics_check(const SeriesCoeffs& series, double x1, double b) {
  std::vector<double> logs(static_cast<std::size_t>(series.order + 1));
  for (int k = 0; k <= series.order; ++k) logs[k] = series.log_abs(k);
  return coefficient_asymptotics_check(logs, x1, b);
}

void write_csv(std::ostream& os, const SeriesCoeffs& s) {
  if (s.mode == SeriesMode::rational) {
    os << "order,numerator,denominator\n";
    for (int k = 0; k <= s.order; ++k)
      os << k << ',' << s.exact[k].get_num().get_str() << ',' << s.exact[k].get_den().get_str() << '\n';
  } else {
    os << "order,value\n";
    for (int k = 0; k <= s.order; ++k) os << k << ',' << s.approx[k].str(36, std::ios_base::scientific) << '\n';
  }
}

} // namespace pgrav
