#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gmpxx.h>

namespace pgrav {

/// 128-bit mantissa float used when exact rationals get too heavy.
using Real = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<128, boost::multiprecision::digit_base_2>>;

enum class SeriesMode { rational, real };

/// Truncated power series in one variable, coefficients 0..order.
struct SeriesCoeffs {
  SeriesMode mode = SeriesMode::rational;
  int order = 0;
  std::string variable = "x";
  std::vector<mpq_class> exact; // rational mode
  std::vector<Real> approx;     // real mode

  double value(int k) const;
  double log_abs(int k) const;
  bool is_zero(int k) const;
};

/// Branch of x = y (1 - 2 beta y^2) with y(0) = 0, from y = x + 2 beta y^3.
SeriesCoeffs y_series(const mpq_class& beta, int order, SeriesMode mode = SeriesMode::rational);
/// S = beta (1 - 3 beta y^2) / (1 - 2 beta y^2)^2 composed with y_series.
SeriesCoeffs s_series(const mpq_class& beta, int order, SeriesMode mode = SeriesMode::rational);

struct CriticalData {
  double beta = 0;
  double x1 = 0;       // sqrt(2 / (27 beta))
  double y_at_x1 = 0;  // y(x1) = cbrt(x1 / (4 beta)) = 1 / sqrt(6 beta)
  double radius_R = 0; // y-radius of U(x1, .), zero of a(x1) + b(x1) y
};
CriticalData critical_data(double beta);

/// Value of the branch y(x) with y(0) = 0 for 0 <= x <= x1, by continuation
/// from x = 0 with Newton steps.
double y_branch(double beta, double x);
/// The same value picked among the three trigonometric Cardano roots.
double cardano_branch(double beta, double x);
/// S(x) evaluated on the branch.
double s_value(double beta, double x);
/// Zero of a(x) + b(x) y, i.e. x / (4 beta y0(x)^2).
double y_radius(double beta, double x);

/// D(y) = (y - y0)^2 (a + b y) with a = x^2 / y0^2, b = -4 beta x.
double d_value(double beta, double x, double y);
/// U(x, y) = (y - x - (y - y0) sqrt(a + b y)) / (2x).
double u_expansion(double beta, double x, double y);

/// Discriminant of y^3 + p y + q with p = -1/(2 beta), q = x/(2 beta), as a
/// function of x^2: p^2 (2/beta - 27 x^2).
mpq_class cubic_discriminant(const mpq_class& beta, const mpq_class& x_squared);

/// Coefficients w(N, k) of W = sum w x^N y^k from the canonical equation,
/// N <= order. Row N has entries k = 0..N.
std::vector<std::vector<mpq_class>> w_table(const mpq_class& beta, int order);

/// Residual of W - beta - x y W^2 - x y^-1 (W - S) with W from w_table and S
/// from s_series. Entry [N][k + 1] is the coefficient of x^N y^k (k >= -1).
std::vector<std::vector<mpq_class>> feq_residual(const mpq_class& beta, int order);
/// Residual of (2xU + x - y)^2 - [4x^2y^2 S + (x - y)^2 - 4 beta x y^3] for
/// x-degree <= order, U = y^2 W. Entry [N][k].
std::vector<std::vector<mpq_class>> main_residual(const mpq_class& beta, int order);
/// Residual series x - y (1 - 2 beta y^2).
SeriesCoeffs y_residual(const mpq_class& beta, int order);

bool all_zero(const std::vector<std::vector<mpq_class>>& table);
bool all_zero(const SeriesCoeffs& s);

struct AsymptoticsReport {
  double mean = 0;          // running mean of c_n x1^n n^(b+1) over the tail window
  double sup_deviation = 0; // sup |v_n / mean - 1|
  int window_begin = 0;
  int window_end = 0;
  int terms = 0;
};
/// Flatness of c_n x1^n n^(b+1) over the last half of the nonzero terms.
AsymptoticsReport coefficient_asymptotics_check(const SeriesCoeffs& series, double x1, double b);
AsymptoticsReport coefficient_asymptotics_check(const std::vector<double>& log_terms, double x1, double b);

void write_csv(std::ostream& os, const SeriesCoeffs& s);

} // namespace pgrav
