#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace pgrav {

struct ProcessParams {
  double r1 = 0;
  double r2 = 0;
  double r0() const { return 1.0 - r1 - r2; }
  /// (1 - r1 - r2) r2 / r1.
  double beta() const;
  void validate() const;
};

/// Nonnegative measure q(N, m) on 0 <= N <= n_max, 2 <= m <= m_max.
struct MeasureGrid {
  int n_max = 0;
  int m_max = 2;
  std::vector<double> values;
  double truncation_loss = 0; // mass pushed outside the grid by the last step
  double dropped_linear = 0;  // linear mass at m = 2 removed by the last step

  MeasureGrid() = default;
  MeasureGrid(int n, int m);
  double at(int n, int m) const;
  double& ref(int n, int m);
  double total() const;
  double total_m_at_least(int m) const;
};

/// One application of the quadratic transformation. Linear moves act only for
/// m >= 3; the r1-share of mass sitting at m = 2 leaves the measure.
MeasureGrid step(const MeasureGrid& q, const ProcessParams& p);

struct FixedPointResult {
  MeasureGrid grid;
  int iterations = 0;
  bool converged = false;
  double last_change = 0;
  double residual = 0; // sup |F(q) - q|
};

/// Iterates from the zero measure until the sup-norm change drops below tol.
FixedPointResult fixed_point(const ProcessParams& p, double tol, int n_max, int m_max, int iteration_cap = 10'000);

/// Single Gauss-Seidel pass in increasing N. Cells with m > m_max + n_max - N
/// are skipped; they never influence the cells kept. Equal to the fixed point
/// on the kept cells.
MeasureGrid sweep(const ProcessParams& p, int n_max, int m_max);

/// max over N, m <= limit of |q(N,m) (r2/r1) r1^-N / q_can(N,m) - 1| with the
/// canonical coefficients at beta = p.beta() (rationals, converted at the end).
double scaling_deviation(const MeasureGrid& q, const ProcessParams& p, int n_limit, int m_limit);

struct ContractionReport {
  double bound = 0;      // r1 + 2 r2
  double max_factor = 0; // sup TV(Tq, Tq') / TV(q, q')
  double mean_factor = 0;
  int trials = 0;
  int violations = 0;
  std::uint64_t seed = 0;
};
ContractionReport contraction_estimate(const ProcessParams& p, int trials, std::uint64_t seed);

struct ScanPoint {
  double r1 = 0;
  double r2 = 0;
  double beta = 0;
  double x1 = 0;
  double predicted_ratio = 0; // r1 / x1(beta)
  double empirical_ratio = 0; // fitted N-growth of the m = 2 column
  double empirical_ratio_se = 0;
  bool predicted_column_finite = false;
  bool empirical_column_finite = false;
  bool predicted_total_finite = false; // y-radius at x = r1 exceeds 1
  bool agree = false;
};
struct ScanOptions {
  int grid = 20;   // points per axis
  int n_max = 104; // column length used for the growth fit
};
/// r1 = (i+1)/(grid+1), r2 = (j+1)/(grid+1) * (1 - r1).
std::vector<ScanPoint> criticality_scan(const ScanOptions& opt = {});
ScanPoint classify(const ProcessParams& p, int n_max);

void write_csv(std::ostream& os, const MeasureGrid& q);

} // namespace pgrav
