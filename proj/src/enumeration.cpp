#include "pgrav/enumeration.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include <Eigen/Dense>
#include "json.hpp"

#include "pgrav/map_core.hpp"

namespace pgrav {

CountTable::CountTable(int n, int m) : n_max(n), m_max(m) {
  if (n < 0 || m < 2) throw std::invalid_argument("table bounds need n_max >= 0, m_max >= 2");
  counts.assign(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(m - 1), 0);
}

mpz_class CountTable::at(int n, int m) const {
  if (n < 0 || n > n_max || m < 2 || m > m_max) return 0;
  return counts[static_cast<std::size_t>(n) * static_cast<std::size_t>(m_max - 1) + static_cast<std::size_t>(m - 2)];
}

mpz_class& CountTable::ref(int n, int m) {
  return counts[static_cast<std::size_t>(n) * static_cast<std::size_t>(m_max - 1) + static_cast<std::size_t>(m - 2)];
}

mpz_class CountTable::row_total(int n) const {
  mpz_class s = 0;
  for (int m = 2; m <= m_max; ++m) s += at(n, m);
  return s;
}

CountTable tutte_table(int n_max, int m_max, std::size_t cell_cap) {
  if (n_max < 0 || m_max < 2) throw std::invalid_argument("table bounds need n_max >= 0, m_max >= 2");
  // Boundary length never exceeds N + 2, so this inner range is closed under the recurrence.
  const int inner_m = std::max(m_max, n_max + 2) + 1;
  const std::size_t cells = static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(inner_m - 1);
  if (cells > cell_cap) throw ResourceError("count table exceeds the cell cap");
  CountTable work(n_max, inner_m);
  work.ref(0, 2) = 1;
  mpz_class prod;
  for (int n = 1; n <= n_max; ++n) {
    for (int m = 2; m <= inner_m; ++m) {
      mpz_class& c = work.ref(n, m);
      if ((n - m) % 2 != 0) continue;
      if (m + 1 <= inner_m) c = work.at(n - 1, m + 1);
      for (int n1 = 0; n1 <= n - 1; ++n1) {
        const int n2 = n - 1 - n1;
        for (int m1 = 2; m1 <= m - 1; ++m1) {
          const int m2 = m + 1 - m1;
          if (m1 > n1 + 2 || m2 > n2 + 2) continue;
          const mpz_class a = work.at(n1, m1);
          if (a == 0) continue;
          mpz_mul(prod.get_mpz_t(), a.get_mpz_t(), work.at(n2, m2).get_mpz_t());
          c += prod;
        }
      }
    }
  }
  CountTable out(n_max, m_max);
  for (int n = 0; n <= n_max; ++n)
    for (int m = 2; m <= m_max; ++m) out.ref(n, m) = work.at(n, m);
  return out;
}

namespace {

mpz_class factorial(long n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return f;
}

} // namespace

mpz_class closed_form_rooted(int m, int j) {
  if (m < 2 || j < 0) throw std::domain_error("closed form needs m >= 2 and j >= 0");
  mpz_class num = factorial(2L * m + 3L * j - 1) * factorial(2L * m - 3);
  mpz_class pow2;
  mpz_ui_pow_ui(pow2.get_mpz_t(), 2, static_cast<unsigned long>(j + 2));
  num *= pow2;
  const mpz_class fm = factorial(m - 2);
  const mpz_class den = factorial(j + 1) * factorial(2L * m + 2L * j) * fm * fm;
  mpz_class q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (r != 0) throw std::logic_error("closed form is not an integer");
  return q;
}

std::vector<std::vector<RootedMap>> generate_maps(int n_max, std::size_t cap) {
  std::vector<std::vector<RootedMap>> by_n(static_cast<std::size_t>(n_max + 1));
  by_n[0].push_back(new_edge_map());
  std::size_t total = 1;
  for (int n = 1; n <= n_max; ++n) {
    std::set<CanonicalCode> seen;
    auto keep = [&](RootedMap&& y) {
      if (seen.insert(canonical_code(y)).second) {
        by_n[n].push_back(std::move(y));
        if (++total > cap) throw ResourceError("exhaustive generation exceeds the map cap");
      }
    };
    for (const auto& x : by_n[n - 1])
      if (x.boundary_length() >= 3) keep(tutte_move_1(x));
    for (int n1 = 0; n1 <= n - 1; ++n1)
      for (const auto& a : by_n[n1])
        for (const auto& b : by_n[n - 1 - n1]) keep(tutte_move_2(a, b));
  }
  return by_n;
}

CountTable brute_force_counts(int n_max, std::size_t map_cap) {
  if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
  const auto maps = generate_maps(n_max, map_cap);
  CountTable t(n_max, n_max + 2);
  for (int n = 0; n <= n_max; ++n)
    for (const auto& x : maps[n]) t.ref(n, x.boundary_length()) += 1;
  return t;
}

std::vector<mpz_class> unrooted_exact_counts(int n_max) {
  const auto maps = generate_maps(n_max, 2'000'000);
  std::vector<mpz_class> out;
  for (const auto& level : maps) {
    std::set<CanonicalCode> classes;
    for (const auto& x : level) classes.insert(unrooted_code(x));
    out.emplace_back(static_cast<unsigned long>(classes.size()));
  }
  return out;
}

mpq_class unrooted_estimate(int n, const mpz_class& rooted_count) {
  if (n < 1) throw std::domain_error("unrooted estimate needs N >= 1");
  mpq_class q(rooted_count, 3 * n);
  q.canonicalize();
  return q;
}

double log_abs(const mpz_class& z) {
  if (z == 0) return -std::numeric_limits<double>::infinity();
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

double log_abs(const mpq_class& q) {
  if (q == 0) return -std::numeric_limits<double>::infinity();
  return log_abs(mpz_class(q.get_num())) - log_abs(mpz_class(q.get_den()));
}

AsymptoticFit fit_growth_log(const std::vector<double>& log_terms, const FitOptions& opt) {
  std::vector<int> support;
  for (int n = 1; n < static_cast<int>(log_terms.size()); ++n)
    if (std::isfinite(log_terms[n])) support.push_back(n);
  if (static_cast<int>(support.size()) < opt.min_terms) throw std::invalid_argument("too few nonzero terms for a growth fit");
  const auto first = static_cast<std::size_t>(std::floor(static_cast<double>(support.size()) * (1.0 - opt.window_fraction)));
  std::vector<int> window(support.begin() + static_cast<std::ptrdiff_t>(first), support.end());
  const int cols = 3 + opt.levels;
  const auto rows = static_cast<Eigen::Index>(window.size());
  if (rows <= cols) throw std::invalid_argument("fit window shorter than the model");

  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double n = window[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    x(i, 1) = std::log(n);
    x(i, 2) = n;
    for (int k = 1; k <= opt.levels; ++k) x(i, 2 + k) = std::pow(n, -k);
    y(i) = log_terms[window[static_cast<std::size_t>(i)]];
  }
  // Column scaling keeps the normal matrix well conditioned.
  Eigen::VectorXd scale = x.colwise().norm().transpose();
  for (int c = 0; c < cols; ++c) x.col(c) /= scale(c);
  const Eigen::VectorXd beta_scaled = x.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - x * beta_scaled;
  const double dof = static_cast<double>(rows - cols);
  const double sigma2 = resid.squaredNorm() / dof;
  const Eigen::MatrixXd cov = sigma2 * (x.transpose() * x).inverse();

  AsymptoticFit fit;
  fit.log_c1 = beta_scaled(0) / scale(0);
  fit.alpha = beta_scaled(1) / scale(1);
  const double log_c = beta_scaled(2) / scale(2);
  fit.c = std::exp(log_c);
  fit.alpha_se = std::sqrt(std::max(0.0, cov(1, 1))) / scale(1);
  fit.c_se = fit.c * std::sqrt(std::max(0.0, cov(2, 2))) / scale(2);
  fit.window_begin = window.front();
  fit.window_end = window.back();
  fit.terms = static_cast<int>(rows);
  fit.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(rows));
  return fit;
}

AsymptoticFit fit_growth(const std::vector<mpz_class>& terms, const FitOptions& opt) {
  std::vector<double> logs;
  logs.reserve(terms.size());
  for (const auto& t : terms) {
    if (t < 0) throw std::invalid_argument("negative term in growth fit");
    logs.push_back(log_abs(t));
  }
  return fit_growth_log(logs, opt);
}

AsymptoticFit fit_growth(const std::vector<mpq_class>& terms, const FitOptions& opt) {
  std::vector<double> logs;
  logs.reserve(terms.size());
  for (const auto& t : terms) {
    if (t < 0) throw std::invalid_argument("negative term in growth fit");
    logs.push_back(log_abs(t));
  }
  return fit_growth_log(logs, opt);
}

AsymptoticFit fit_growth(const std::vector<double>& terms, const FitOptions& opt) {
  std::vector<double> logs;
  logs.reserve(terms.size());
  for (double t : terms) {
    if (t < 0) throw std::invalid_argument("negative term in growth fit");
    logs.push_back(t > 0 ? std::log(t) : -std::numeric_limits<double>::infinity());
  }
  return fit_growth_log(logs, opt);
}

AprioriBounds apriori_bounds(const CountTable& table) {
  AprioriBounds b;
  b.gamma_lower = std::numeric_limits<double>::infinity();
  b.gamma_upper = 0;
  double prev_log = log_abs(table.row_total(0));
  for (int n = 1; n <= table.n_max; ++n) {
    const double lt = log_abs(table.row_total(n));
    const double g = std::exp(lt / n);
    b.ratios.push_back(std::exp(lt - prev_log));
    prev_log = lt;
    if (n < 2) continue; // a single map at N = 1
    b.gamma_lower = std::min(b.gamma_lower, g);
    b.gamma_upper = std::max(b.gamma_upper, g);
  }
  b.ratios_monotone = true;
  for (std::size_t i = 1; i < b.ratios.size(); ++i)
    if (b.ratios[i] + 1e-12 < b.ratios[i - 1]) b.ratios_monotone = false;
  return b;
}

AsymptoticFit uniform_regime_fit(int rho_num, int rho_den, int m_max) {
  if (rho_num < 0 || rho_den <= 0) throw std::invalid_argument("rho must be a nonnegative fraction");
  std::vector<double> logs(static_cast<std::size_t>(m_max + 1), -std::numeric_limits<double>::infinity());
  for (int m = 2; m <= m_max; ++m)
    if ((m * rho_num) % rho_den == 0) logs[m] = log_abs(closed_form_rooted(m, m * rho_num / rho_den));
  FitOptions opt;
  opt.min_terms = 20;
  return fit_growth_log(logs, opt);
}

void write_csv(std::ostream& os, const CountTable& table) {
  os << "N,m,count\n";
  for (int n = 0; n <= table.n_max; ++n)
    for (int m = 2; m <= table.m_max; ++m) os << n << ',' << m << ',' << table.at(n, m).get_str() << '\n';
}

void write_json(std::ostream& os, const AsymptoticFit& fit) {
  nlohmann::ordered_json j;
  j["c"] = fit.c;
  j["c_se"] = fit.c_se;
  j["alpha"] = fit.alpha;
  j["alpha_se"] = fit.alpha_se;
  j["log_c1"] = fit.log_c1;
  j["window"] = {fit.window_begin, fit.window_end};
  j["terms"] = fit.terms;
  j["residual_rms"] = fit.residual_rms;
  os << j.dump(2) << '\n';
}

} // namespace pgrav
