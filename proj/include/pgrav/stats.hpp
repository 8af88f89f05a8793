#pragma once

#include <span>
#include <vector>

namespace pgrav {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;
  double intercept_se = 0;
};
LinearFit linear_regression(std::span<const double> x, std::span<const double> y);

struct MeanCi {
  double mean = 0;
  double sd = 0;
  double se = 0;
  double lo = 0; // mean - 1.96 se
  double hi = 0;
};
MeanCi mean_ci(std::span<const double> xs);

double normal_cdf(double z);

/// Kolmogorov-Smirnov distance of the sample to N(mean, sd) fitted to it.
double ks_normal_fitted(std::vector<double> sample);
/// KS distance to the half-normal with scale fitted by the second moment.
double ks_half_normal_fitted(std::vector<double> sample);
/// Two-sample KS statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Total variation distance between two weight vectors after normalizing each.
double tv_distance(std::span<const double> a, std::span<const double> b);

/// Covariance of paired samples with a normal-theory standard error.
struct CovEstimate {
  double cov = 0;
  double se = 0;
};
CovEstimate covariance(std::span<const double> a, std::span<const double> b);

} // namespace pgrav
