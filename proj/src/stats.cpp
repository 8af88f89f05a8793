#include "pgrav/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pgrav {

LinearFit linear_regression(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 3) throw std::invalid_argument("regression needs >= 3 paired points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  const double s2 = ss / static_cast<double>(n - 2);
  f.slope_se = std::sqrt(s2 / sxx);
  f.intercept_se = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  return f;
}

MeanCi mean_ci(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("need at least two samples");
  MeanCi m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0;
  for (double v : xs) ss += (v - m.mean) * (v - m.mean);
  m.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  m.se = m.sd / std::sqrt(static_cast<double>(xs.size()));
  m.lo = m.mean - 1.96 * m.se;
  m.hi = m.mean + 1.96 * m.se;
  return m;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

template <class Cdf>
double ks_against(std::vector<double> s, Cdf cdf) {
  if (s.empty()) throw std::invalid_argument("empty sample");
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

} // namespace

double ks_normal_fitted(std::vector<double> sample) {
  const auto m = mean_ci(sample);
  return ks_against(std::move(sample), [&](double v) { return normal_cdf((v - m.mean) / m.sd); });
}

double ks_half_normal_fitted(std::vector<double> sample) {
  double m2 = 0;
  for (double v : sample) {
    if (v < 0) throw std::invalid_argument("half-normal sample must be nonnegative");
    m2 += v * v;
  }
  const double sigma = std::sqrt(m2 / static_cast<double>(sample.size()));
  return ks_against(std::move(sample), [&](double v) { return std::erf(v / (sigma * std::sqrt(2.0))); });
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  const double sb = std::accumulate(b.begin(), b.end(), 0.0);
  const std::size_t n = std::max(a.size(), b.size());
  double d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pa = i < a.size() ? a[i] / sa : 0.0;
    const double pb = i < b.size() ? b[i] / sb : 0.0;
    d += std::fabs(pa - pb);
  }
  return 0.5 * d;
}

CovEstimate covariance(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (n != b.size() || n < 3) throw std::invalid_argument("covariance needs >= 3 pairs");
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double c = 0;
  for (std::size_t i = 0; i < n; ++i) c += (a[i] - ma) * (b[i] - mb);
  c /= static_cast<double>(n - 1);
  double v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (a[i] - ma) * (b[i] - mb) - c;
    v += t * t;
  }
  return {c, std::sqrt(v / static_cast<double>(n - 1) / static_cast<double>(n))};
}

} // namespace pgrav
