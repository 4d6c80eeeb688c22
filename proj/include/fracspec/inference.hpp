#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "fracspec/kernels.hpp"

namespace fracspec {

// f(theta, lambda)
using ParamDensity = std::function<double(double, double)>;

double whittle_rate(const ParamDensity& density, double theta, double step);

struct OuOptions {
  bool exact = false;       // exact Gaussian transition instead of Euler-Maruyama
  bool zero_noise = false;  // diagnostic switch
  double x0 = 0.0;
};

std::vector<double> simulate_ou(double theta0, double T, double dt, std::uint64_t seed, const OuOptions& opt = {});
double ou_mle(const std::vector<double>& path, double dt);

struct McReport {
  int reps = 0;
  double mean = 0.0;
  double std = 0.0;
  double skew = 0.0;
  double kurt_excess = 0.0;
  bool flags_valid = false;
  bool pass_mean = false;
  bool pass_std = false;
  std::vector<std::uint64_t> seeds;
  std::vector<double> theta_hat;
  std::vector<double> z;

  bool pass() const { return flags_valid && pass_mean && pass_std; }
};

McReport mc_asymptotic_normality(double theta0, double T, double dt, int reps, std::uint64_t seed, int jobs = 1,
                                 const OuOptions& opt = {});

struct MixedTheta {
  HurstParam h;
  double sigma;

  void validate() const;
};

// gradient of log(eps + sigma^2 kappa(H) |lam|^{1-2H}) in (H, sigma)
Eigen::Vector2d log_density_gradient(const MixedTheta& th, double eps, double lam);
Eigen::Matrix2d mixed_fisher_matrix(const MixedTheta& th, double eps);
Eigen::Matrix2d rate_matrix(double eps, const MixedTheta& th);
// h in (3/4, 1]
std::pair<double, double> minimax_rates(double eps, double h);

void write_mc_csv(const McReport& r, std::ostream& os);

}  // namespace fracspec
