#include "fracspec/spectra.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#include "fracspec/errors.hpp"

namespace fracspec {

namespace {
constexpr double kPi = std::numbers::pi;
}

double AsymptoticEigenpair::phi(double t) const { return std::sqrt(2.0) * std::sin(nu_n * t + eta_h); }

AsymptoticEigenpair brownian_eigenpair(int n) {
  if (n < 1) throw DomainError("eigen index must be >= 1");
  AsymptoticEigenpair p;
  p.n = n;
  p.nu_n = (n - 0.5) * kPi;
  p.lam_n = 1.0 / (p.nu_n * p.nu_n);
  p.eta_h = 0.0;
  p.boundary_value = std::sqrt(2.0) * std::sin(p.nu_n);
  p.order_estimate = 0.0;
  return p;
}

double fbm_nu(const HurstParam& h, int n) {
  if (n < 1) throw DomainError("eigen index must be >= 1");
  const double d = h.h() - 0.5;
  return (n - 0.5) * kPi - (d * d / (h.h() + 0.5)) * (kPi / 2.0);
}

double fbm_eigenvalue(const HurstParam& h, int n) {
  return h.kappa() * std::pow(fbm_nu(h, n), -2.0 * h.h() - 1.0);
}

double eta_h(const HurstParam& h) {
  const double H = h.h();
  return 0.25 * (H - 0.5) * (H - 1.5) / (H + 0.5);
}

double fbm_eigenfunction_leading(const HurstParam& h, int n, double t) {
  return std::sqrt(2.0) * std::sin(fbm_nu(h, n) * t + eta_h(h));
}

double fbm_boundary_value(const HurstParam& h, int n) {
  if (n < 1) throw DomainError("eigen index must be >= 1");
  const double s = (n % 2 == 0) ? 1.0 : -1.0;
  return s * std::sqrt(2.0 * h.h() + 1.0);
}

AsymptoticEigenpair fbm_eigenpair(const HurstParam& h, int n) {
  AsymptoticEigenpair p;
  p.n = n;
  p.nu_n = fbm_nu(h, n);
  p.lam_n = fbm_eigenvalue(h, n);
  p.eta_h = eta_h(h);
  p.boundary_value = fbm_boundary_value(h, n);
  p.order_estimate = 1.0 / n;
  return p;
}

double bronski_ratio(const HurstParam& h, double lam, int n) {
  return lam * std::pow(n * kPi, 2.0 * h.h() + 1.0) / h.kappa();
}

Calibration calibrate_enumeration(const HurstParam& h, const std::vector<EigenPair>& oracle, int max_shift) {
  if (oracle.size() < 10) throw DomainError("calibration needs at least 10 oracle eigenvalues");
  for (std::size_t i = 1; i < oracle.size(); ++i)
    if (oracle[i].lam > oracle[i - 1].lam) throw DomainError("oracle list must be sorted descending");
  double best = std::numeric_limits<double>::infinity(), second = best;
  int best_k = 0;
  for (int k = -max_shift; k <= max_shift; ++k) {
    if (5 + k < 1) continue;
    double r = 0.0;
    for (int n = 5; n <= 10; ++n) r += std::abs(std::log(oracle[n - 1].lam) - std::log(fbm_eigenvalue(h, n + k)));
    if (r < best) {
      second = best;
      best = r;
      best_k = k;
    } else if (r < second) {
      second = r;
    }
  }
  if (second - best < 1e-3) throw NumericalError("ambiguous enumeration calibration");
  return {best_k, best, second};
}

double interior_distance(const HurstParam& h, int n, const EigenPair& oracle, double a, double b) {
  if (!oracle.mesh) throw DomainError("oracle eigenpair has no mesh");
  const Mesh& m = *oracle.mesh;
  double dot = 0.0;
  for (int i = 0; i < m.cells(); ++i) dot += m.width(i) * oracle.phi[i] * fbm_eigenfunction_leading(h, n, m.mid(i));
  const double s = dot < 0.0 ? -1.0 : 1.0;
  double d2 = 0.0;
  for (int i = 0; i < m.cells(); ++i) {
    const double x = m.mid(i);
    if (x < a || x > b) continue;
    const double e = s * oracle.phi[i] - fbm_eigenfunction_leading(h, n, x);
    d2 += m.width(i) * e * e;
  }
  return std::sqrt(d2);
}

std::vector<SpectrumRow> compare_spectrum(const HurstParam& h, const std::vector<EigenPair>& oracle) {
  std::vector<SpectrumRow> rows;
  for (const auto& p : oracle) {
    SpectrumRow r;
    r.h = h.h();
    r.n = p.index;
    r.nu = fbm_nu(h, p.index);
    r.lam_asym = fbm_eigenvalue(h, p.index);
    r.lam_oracle = p.lam;
    r.rel_err = r.lam_asym / r.lam_oracle - 1.0;
    rows.push_back(r);
  }
  return rows;
}

void write_spectrum_rows_csv(const std::vector<SpectrumRow>& rows, std::ostream& os) {
  os << "H,n,nu_n,lambda_asym,lambda_oracle,rel_err\n" << std::setprecision(12);
  for (const auto& r : rows)
    os << r.h << ',' << r.n << ',' << r.nu << ',' << r.lam_asym << ',' << r.lam_oracle << ',' << r.rel_err << '\n';
}

}  // namespace fracspec
