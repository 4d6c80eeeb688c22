#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fracspec/kernels.hpp"

namespace fracspec {

using cplx = std::complex<double>;

struct FilterModel {
  double beta = 0.0;
  double mu = 1.0;
  double eps = 1.0;
  HurstParam h1{0.5};  // state noise
  HurstParam h2{0.5};  // observation noise

  void validate() const;
  // sqrt(beta^2 + mu^2/eps)
  double t0() const;
};

double riccati_error(const FilterModel& m, double T);
double steady_state_bm(const FilterModel& m);
double klb_steady_state(const HurstParam& h, const FilterModel& m);

enum class Branch { UpperHalf, LowerHalf, UpperLimit, LowerLimit };

struct LambdaValue {
  cplx z;
  cplx value;
  Branch branch;
};

// uses m.h1, m.h2; real z needs an explicit limit branch
LambdaValue lambda_ext(cplx z, const FilterModel& m, std::optional<Branch> branch = std::nullopt);

struct ZeroResult {
  std::optional<cplx> z0;
  int winding = 0;
  bool boundary_case = false;  // equal Hurst exponents, real zero t0
  double radius = 0.0;
};

// winding number of Lambda's numerator around the quarter disc of the given radius
int first_quadrant_winding(const FilterModel& m, double radius);
ZeroResult find_zero_first_quadrant(const FilterModel& m);

// continuous argument of Lambda^+ on the positive axis for H2 = 1/2, normalised to vanish at infinity
class ThetaCurve {
 public:
  ThetaCurve(const HurstParam& h, const FilterModel& m);
  double operator()(double t) const;
  // integral of theta over (0, inf)
  double integral() const;
  double max_jump() const { return max_jump_; }

 private:
  double principal(double t) const;
  HurstParam h_;
  FilterModel m_;
  bool step_ = false;
  std::vector<double> u_;  // log t
  std::vector<double> th_;
  double max_jump_ = 0.0;
};

double theta_arg(double t, const HurstParam& h, const FilterModel& m);
double steady_state_white(const HurstParam& h, const FilterModel& m);
double stationary_spectral_error(const HurstParam& h, const FilterModel& m);
double small_noise_exponent(const HurstParam& h1, const HurstParam& h2);
double small_noise_error_white(const HurstParam& h, double mu, double eps);

struct FilterRow {
  double h1, h2, beta, mu, eps;
  double p_formula, p_crosscheck, rel_diff;
};
void write_filter_csv(const std::vector<FilterRow>& rows, std::ostream& os);

}  // namespace fracspec
