#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace pgrav {

/// ln(2d): the exponential growth rate of nearest-neighbour paths in Z^d.
double mu_critical(int d);

/// Exact number of n-step nearest-neighbour paths from 0 to x in Z^d.
/// Built one coordinate at a time: a path splits into its steps along the
/// last axis and the rest, interleaved in binomially many ways.
mpz_class path_counts(int d, int n, std::span<const int> x);

struct SeriesValue {
  double value = 0;
  double tail_bound = 0; // bound on the omitted terms N > n_max
  int n_max = 0;
};

/// G(x) = sum_N C(N; x) exp(-mu N), truncated at n_max. Requires mu > mu_critical(d).
SeriesValue green_function(int d, double mu, std::span<const int> x, int n_max);

/// Closed form 1 / (1 - exp(-(mu - mu_cr))).
double susceptibility(int d, double mu);

/// sum_x G(x) from the lattice walk distribution, truncated at n_max.
SeriesValue susceptibility_sum(int d, double mu, int n_max);

/// Smallest n_max whose tail bound for the susceptibility is below tol.
int cutoff_for(double delta, double tol);

struct GammaFit {
  double slope = 0;
  double slope_se = 0;
  int points = 0;
  int n_max = 0;
};

/// Log-log slope of the summed susceptibility against mu - mu_cr over
/// `points` log-spaced values in [lo, hi].
GammaFit gamma_fit(int d, double lo, double hi, int points, double tol = 1e-10);

struct QueueConfig {
  double lambda = 1.0;
  double nu = 2.0;
  int alphabet = 2;
  double horizon = 1e5;
  double burn_in = 100.0;
  std::uint64_t seed = 1;
  std::uint64_t replica = 0;
  int max_length = 10'000'000;
  int batches = 20;
};

struct QueueStats {
  std::uint64_t seed = 0;
  long long events = 0;
  long long insertions = 0;
  long long deletions = 0;
  double time = 0;
  int final_length = 0;
  int max_length = 0;
  std::vector<double> occupation; // time-weighted law of the length after burn-in
  double mean_length = 0;
  double ratio = 0;      // geometric MLE of P(n + 1) / P(n)
  double ratio_se = 0;   // batch means
  double decay_rate = 0; // -ln ratio
  double decay_rate_se = 0;
  double growth_rate = 0; // final_length / time
  // Symbols in the lower 80% of the final word.
  long long bulk_symbols = 0;
  std::vector<double> symbol_freq;
  std::vector<double> pair_freq; // adjacent pairs, row-major
};

/// Last-in-first-out queue over an alphabet: a uniform symbol is pushed at
/// rate lambda, the top symbol is popped at rate nu.
QueueStats lifo_queue_sim(const QueueConfig& cfg);

/// Insertion of a uniform symbol at one of n + 1 slots at total rate
/// lambda (n + 1), deletion of one of the n symbols at total rate nu n.
QueueStats context_free_sim(const QueueConfig& cfg);

/// Exact detailed balance checks in rationals: the word measure
/// (lambda / (|S| nu))^|w| for the queue over words of length <= max_len, and
/// the geometric law of both length chains. Returns the number of failures.
long long detailed_balance_failures(const mpq_class& lambda, const mpq_class& nu, int alphabet, int max_len);

enum class OneDimProcess { lifo, context_free };

struct CriticalClt {
  long long replicas = 0;
  double t = 0;
  double scale = 0;       // fitted half-normal scale of n(t) / sqrt(t)
  double ks = 0;          // KS distance to that half-normal
  double scale_ratio = 0; // scale at t over scale at t / 4; near 1 when n(t) ~ sqrt(t)
  std::uint64_t seed = 0;
};

/// n(t) / sqrt(t) over independent replicas at lambda = nu.
CriticalClt critical_clt(OneDimProcess process, double rate, double t, long long replicas, std::uint64_t seed);

/// Queue with nu - lambda = n_scale^(-1/2), observed at t = tau n_scale and
/// rescaled by sqrt(n_scale). Returns one sample per replica.
std::vector<double> diffusion_scaling(int n_scale, double tau, long long replicas, std::uint64_t seed);

void write_csv(std::ostream& os, const QueueStats& s);

} // namespace pgrav
