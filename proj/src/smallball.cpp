#include "fracspec/smallball.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "fracspec/errors.hpp"

namespace fracspec {

namespace {
constexpr double kPi = std::numbers::pi;
}

SmallBallConstants beta_gamma(const HurstParam& h) {
  const double H = h.h();
  const double e = 2.0 * H + 1.0;
  const double inner = h.kappa() / std::pow(std::sin(kPi / e), e);
  const double beta = H * std::pow(e, -e / (2.0 * H)) * std::pow(inner, 1.0 / (2.0 * H));
  const double d = H - 0.5;
  const double gamma = (d * d + 1.0) / (2.0 * H);
  return {h, beta, gamma};
}

CmApprox cameron_martin(double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double v = 4.0 / std::sqrt(kPi) * eps * std::exp(-1.0 / (8.0 * eps * eps));
  return {v, v > 1.0};
}

double quadratic_form_cdf(const std::vector<double>& lams, double x, double tol) {
  if (lams.empty()) throw DomainError("empty eigenvalue list");
  double lmax = 0.0, lsum = 0.0;
  for (double l : lams) {
    if (!(l > 0.0)) throw DomainError("eigenvalues must be positive");
    lmax = std::max(lmax, l);
    lsum += l;
  }
  if (x <= 0.0) return 0.0;

  auto rho = [&](double u) {
    double s = 0.0;
    for (double l : lams) s += std::log1p(l * l * u * u);
    return std::exp(0.25 * s);
  };
  auto f = [&](double u) {
    if (u < 1e-300) return 0.5 * (lsum - x);
    double th = -0.5 * x * u, s = 0.0;
    for (double l : lams) {
      th += 0.5 * std::atan(l * u);
      s += std::log1p(l * l * u * u);
    }
    return std::sin(th) / (u * std::exp(0.25 * s));
  };

  const double step = std::min(2.0 * kPi / x, 2.0 / lmax);
  double total = 0.0;
  double a = 0.0;
  for (long k = 0;; ++k) {
    const double b = a + step;
    total += boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
    a = b;
    if (4.0 / (x * a * rho(a)) < tol) break;
    if (a > 1e9) throw NumericalError("characteristic-function inversion did not converge");
  }
  double p = 0.5 - total / kPi;
  return std::clamp(p, 0.0, 1.0);
}

double smallball_oracle(const std::vector<double>& lams, double eps, const SmallBallOptions& opt) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (opt.tail_sum < 0.0) throw DomainError("tail sum must be nonnegative");
  const double e2 = eps * eps;
  if (opt.tail_sum > 0.1 * e2) throw NumericalError("eigenvalue truncation too severe for this eps");
  return quadratic_form_cdf(lams, e2 - opt.tail_sum, opt.tol);
}

LogLawFit smallball_loglaw_check(const HurstParam& h, const std::vector<std::pair<double, double>>& probs,
                                 const LogLawOptions& opt) {
  if (probs.size() < 4) throw DomainError("log-law check needs at least 4 points");
  for (std::size_t i = 1; i < probs.size(); ++i)
    if (!(probs[i].first < probs[i - 1].first)) throw DomainError("eps points must be strictly decreasing");
  const auto bg = beta_gamma(h);
  const double beta = bg.beta * opt.beta_scale;
  LogLawFit fit;
  for (const auto& [e, P] : probs) {
    if (!(P > 0.0 && P <= 1.0) || !(e > 0.0)) throw DomainError("probabilities must lie in (0,1]");
    fit.residuals.push_back(std::log(P) + beta * std::pow(e, -1.0 / h.h()) - bg.gamma * std::log(e));
  }
  const int m = static_cast<int>(probs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = probs[i].first, y = fit.residuals[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.eps_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.fitted_constant = (sy - fit.eps_slope * sx) / m;
  for (int i = 1; i < m; ++i)
    fit.drift_slopes.push_back((fit.residuals[i] - fit.residuals[i - 1]) /
                               (std::log(probs[i].first) - std::log(probs[i - 1].first)));
  fit.drift_shrinks = true;
  for (std::size_t i = 1; i < fit.drift_slopes.size(); ++i)
    if (std::abs(fit.drift_slopes[i]) > std::abs(fit.drift_slopes[i - 1]) + 1e-12) fit.drift_shrinks = false;
  return fit;
}

void write_smallball_csv(const HurstParam& h, const std::vector<std::pair<double, double>>& probs,
                         const LogLawFit& fit, std::ostream& os) {
  os << "H,eps,P_oracle,log_law_residual\n" << std::setprecision(12);
  for (std::size_t i = 0; i < probs.size(); ++i)
    os << h.h() << ',' << probs[i].first << ',' << probs[i].second << ',' << fit.residuals[i] << '\n';
}

}  // namespace fracspec
