#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "pgrav/map_core.hpp"

namespace pgrav {

/// Raised when a computation would exceed a configured size limit.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Exact counts C(N, m) for 0 <= N <= n_max, 2 <= m <= m_max.
struct CountTable {
  int n_max = 0;
  int m_max = 2;
  std::vector<mpz_class> counts; // row-major in N, column m - 2

  CountTable() = default;
  CountTable(int n, int m);

  /// Zero outside the stored range.
  mpz_class at(int n, int m) const;
  mpz_class& ref(int n, int m);
  mpz_class row_total(int n) const;
  bool operator==(const CountTable&) const = default;
};

inline constexpr std::size_t kDefaultCellCap = std::size_t{1} << 22;

CountTable tutte_table(int n_max, int m_max, std::size_t cell_cap = kDefaultCellCap);

/// 2^(j+2) (2m+3j-1)! (2m-3)! / ((j+1)! (2m+2j)! ((m-2)!)^2), the count at N = m + 2j.
mpz_class closed_form_rooted(int m, int j);

/// Every map with N <= n_max reachable from the edge map, one per rooted
/// isomorphism class, grouped by N.
std::vector<std::vector<RootedMap>> generate_maps(int n_max, std::size_t map_cap = 2'000'000);

/// Counts by exhaustive generation from edge maps with both moves, deduplicated
/// by canonical code.
CountTable brute_force_counts(int n_max, std::size_t map_cap = 2'000'000);

/// Number of distinct maps per N after forgetting the root (re-rooting along
/// the boundary), by exhaustive generation.
std::vector<mpz_class> unrooted_exact_counts(int n_max);

/// Asymptotic unrooted estimate count / (3N).
mpq_class unrooted_estimate(int n, const mpz_class& rooted_count);

struct FitOptions {
  double window_fraction = 0.5; // tail fraction of the nonzero terms used
  int levels = 3;               // number of 1/N^k correction terms
  int min_terms = 50;
};

/// log a_N = A + alpha log N + N log c + sum_k b_k N^-k, least squares.
struct AsymptoticFit {
  double c = 0;
  double alpha = 0;
  double log_c1 = 0;
  double c_se = 0;
  double alpha_se = 0;
  int window_begin = 0; // first N in the window
  int window_end = 0;   // last N in the window
  int terms = 0;
  double residual_rms = 0;
};

/// `log_terms[N]` is log a_N; non-finite entries mark zero terms and are skipped.
AsymptoticFit fit_growth_log(const std::vector<double>& log_terms, const FitOptions& opt = {});
AsymptoticFit fit_growth(const std::vector<mpz_class>& terms, const FitOptions& opt = {});
AsymptoticFit fit_growth(const std::vector<mpq_class>& terms, const FitOptions& opt = {});
AsymptoticFit fit_growth(const std::vector<double>& terms, const FitOptions& opt = {});

double log_abs(const mpz_class& z);
double log_abs(const mpq_class& q);

/// gamma_l^N <= sum_m C(N, m) <= gamma_u^N on 2 <= N <= n_max.
struct AprioriBounds {
  double gamma_lower = 0;
  double gamma_upper = 0;
  bool ratios_monotone = false; // successive row-total ratios nondecreasing
  std::vector<double> ratios;
};
AprioriBounds apriori_bounds(const CountTable& table);

/// Exponent fit of C(N = m + 2j, m) along j = rho * m, using the closed form.
AsymptoticFit uniform_regime_fit(int rho_num, int rho_den, int m_max);

void write_csv(std::ostream& os, const CountTable& table);
void write_json(std::ostream& os, const AsymptoticFit& fit);

} // namespace pgrav
