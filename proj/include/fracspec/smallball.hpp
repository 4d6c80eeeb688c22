#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "fracspec/kernels.hpp"

namespace fracspec {

struct SmallBallConstants {
  HurstParam h;
  double beta;
  double gamma;
};

SmallBallConstants beta_gamma(const HurstParam& h);

struct CmApprox {
  double value;
  bool asymptotic_only;  // value exceeds 1, only meaningful as eps -> 0
};

CmApprox cameron_martin(double eps);

struct SmallBallOptions {
  double tail_sum = 0.0;  // sum of eigenvalues beyond the supplied list
  double tol = 1e-10;
};

// P(sum lam_n Z_n^2 <= eps^2) by characteristic-function inversion
double smallball_oracle(const std::vector<double>& lams, double eps, const SmallBallOptions& opt = {});
// P(sum lam_n Z_n^2 <= x)
double quadratic_form_cdf(const std::vector<double>& lams, double x, double tol = 1e-10);

struct LogLawFit {
  double fitted_constant = 0.0;  // intercept of r(eps) ~ c0 + c1 eps
  double eps_slope = 0.0;        // c1
  std::vector<double> residuals;     // r(eps) = log P + beta eps^{-1/H} - gamma log eps
  std::vector<double> drift_slopes;  // dr / dlog eps between consecutive points
  bool drift_shrinks = false;
};

struct LogLawOptions {
  double beta_scale = 1.0;
};

LogLawFit smallball_loglaw_check(const HurstParam& h, const std::vector<std::pair<double, double>>& oracle_probs,
                                 const LogLawOptions& opt = {});

void write_smallball_csv(const HurstParam& h, const std::vector<std::pair<double, double>>& probs,
                         const LogLawFit& fit, std::ostream& os);

}  // namespace fracspec
