#pragma once

#include <iosfwd>
#include <vector>

#include "fracspec/kernels.hpp"

namespace fracspec {

struct AsymptoticEigenpair {
  int n = 0;
  double nu_n = 0.0;
  double lam_n = 0.0;
  double eta_h = 0.0;
  double boundary_value = 0.0;
  double order_estimate = 0.0;  // size of the omitted O(1/n) terms

  // leading-order eigenfunction sqrt(2) sin(nu_n t + eta_h)
  double phi(double t) const;
};

AsymptoticEigenpair brownian_eigenpair(int n);
double fbm_nu(const HurstParam& h, int n);
double fbm_eigenvalue(const HurstParam& h, int n);
double eta_h(const HurstParam& h);
double fbm_eigenfunction_leading(const HurstParam& h, int n, double t);
double fbm_boundary_value(const HurstParam& h, int n);
AsymptoticEigenpair fbm_eigenpair(const HurstParam& h, int n);
// leading-order constant of the eigenvalue law lambda_n ~ kappa(H) (n pi)^{-2H-1}
double bronski_ratio(const HurstParam& h, double lam, int n);

struct Calibration {
  int shift = 0;
  double residual = 0.0;
  double runner_up = 0.0;
};

Calibration calibrate_enumeration(const HurstParam& h, const std::vector<EigenPair>& oracle, int max_shift = 3);

// sign-aligned L2 distance on [a,b] between the leading asymptotic eigenfunction and an oracle one
double interior_distance(const HurstParam& h, int n, const EigenPair& oracle, double a = 0.2, double b = 0.8);

struct SpectrumRow {
  double h;
  int n;
  double nu;
  double lam_asym;
  double lam_oracle;
  double rel_err;
};
std::vector<SpectrumRow> compare_spectrum(const HurstParam& h, const std::vector<EigenPair>& oracle);
void write_spectrum_rows_csv(const std::vector<SpectrumRow>& rows, std::ostream& os);

}  // namespace fracspec
