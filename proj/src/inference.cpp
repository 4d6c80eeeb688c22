#include "fracspec/inference.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>

#include "fracspec/errors.hpp"
#include "fracspec/parallel.hpp"
#include "fracspec/quadrature.hpp"

namespace fracspec {

namespace {
constexpr double kPi = std::numbers::pi;

double half_line(const RealFn& f) { return integrate(f, 0.0, 1.0, 1e-12) + integrate_to_inf(f, 1.0, 1e-12); }
}  // namespace

double whittle_rate(const ParamDensity& density, double theta, double step) {
  if (!(step > 0.0)) throw DomainError("difference step must be positive");
  auto dlog = [&](double lam) {
    const double fp = density(theta + step, lam), fm = density(theta - step, lam);
    if (!(fp > 0.0) || !(fm > 0.0)) throw DomainError("density must be positive");
    return (std::log(fp) - std::log(fm)) / (2.0 * step);
  };
  auto pos = [&](double lam) {
    const double d = dlog(lam);
    return d * d;
  };
  auto neg = [&](double lam) {
    const double d = dlog(-lam);
    return d * d;
  };
  const double v = half_line(pos) + half_line(neg);
  if (!std::isfinite(v)) throw NumericalError("Whittle integral diverged");
  return v / (4.0 * kPi);
}

std::vector<double> simulate_ou(double theta0, double T, double dt, std::uint64_t seed, const OuOptions& opt) {
  if (!(theta0 > 0.0)) throw DomainError("theta0 must be positive");
  if (!(T > 0.0) || !(dt > 0.0)) throw DomainError("T and dt must be positive");
  if (dt > 0.01 / theta0 * (1.0 + 1e-12)) throw DomainError("dt must not exceed 0.01/theta0");
  const long n = std::lround(T / dt);
  std::vector<double> x(static_cast<std::size_t>(n) + 1, 0.0);
  x[0] = opt.zero_noise ? 0.0 : opt.x0;
  if (opt.zero_noise) {
    std::fill(x.begin(), x.end(), 0.0);
    return x;
  }
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const double a = std::exp(-theta0 * dt);
  const double sd_exact = std::sqrt((1.0 - a * a) / (2.0 * theta0));
  const double sd_euler = std::sqrt(dt);
  for (long k = 0; k < n; ++k) {
    const double z = nd(gen);
    if (opt.exact)
      x[k + 1] = a * x[k] + sd_exact * z;
    else
      x[k + 1] = x[k] - theta0 * x[k] * dt + sd_euler * z;
  }
  return x;
}

double ou_mle(const std::vector<double>& path, double dt) {
  if (path.size() < 100) throw DomainError("path too short for the MLE");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    num += path[k] * (path[k + 1] - path[k]);
    den += path[k] * path[k] * dt;
  }
  if (den == 0.0) throw NumericalError("degenerate path: zero denominator in the MLE");
  return -num / den;
}

McReport mc_asymptotic_normality(double theta0, double T, double dt, int reps, std::uint64_t seed, int jobs,
                                 const OuOptions& opt) {
  if (!(theta0 > 0.0)) throw DomainError("only the ergodic case theta0 > 0 is covered");
  if (reps < 1) throw DomainError("reps must be positive");
  McReport r;
  r.reps = reps;
  r.seeds.resize(reps);
  r.theta_hat.resize(reps);
  r.z.resize(reps);
  for (int i = 0; i < reps; ++i) r.seeds[i] = derive_seed(seed, static_cast<std::uint64_t>(i));
  parallel_for(reps, jobs, [&](int i) {
    const auto path = simulate_ou(theta0, T, dt, r.seeds[i], opt);
    r.theta_hat[i] = ou_mle(path, dt);
    r.z[i] = std::sqrt(T) * (r.theta_hat[i] - theta0) / std::sqrt(2.0 * theta0);
  });
  double m = 0.0;
  for (double z : r.z) m += z;
  m /= reps;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double z : r.z) {
    const double d = z - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  r.mean = m;
  if (reps >= 2) {
    r.std = std::sqrt(m2 / (reps - 1));
    const double v = m2 / reps;
    r.skew = v > 0.0 ? (m3 / reps) / std::pow(v, 1.5) : 0.0;
    r.kurt_excess = v > 0.0 ? (m4 / reps) / (v * v) - 3.0 : 0.0;
    r.flags_valid = true;
    r.pass_mean = std::abs(r.mean) < 0.1;
    r.pass_std = std::abs(r.std - 1.0) < 0.15;
  }
  return r;
}

void MixedTheta::validate() const {
  if (!h.is_semimartingale_mix()) throw RegimeError("mixed model parameter needs H > 3/4");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
}

Eigen::Vector2d log_density_gradient(const MixedTheta& th, double eps, double lam) {
  th.validate();
  if (lam == 0.0) throw SingularityError("gradient undefined at zero frequency");
  const double H = th.h.h();
  const double al = std::abs(lam);
  const double K = th.sigma * th.sigma * th.h.kappa() * std::pow(al, 1.0 - 2.0 * H);
  const double R = 1.0 / (1.0 + eps / K);
  const double dlog_kappa = 2.0 * boost::math::digamma(2.0 * H + 1.0) + kPi / std::tan(kPi * H);
  Eigen::Vector2d g;
  g(0) = R * (dlog_kappa - 2.0 * std::log(al));
  g(1) = 2.0 * R / th.sigma;
  return g;
}

Eigen::Matrix2d mixed_fisher_matrix(const MixedTheta& th, double eps) {
  th.validate();
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  auto entry = [&](int a, int b) {
    auto f = [&](double lam) {
      if (lam <= 0.0) return 0.0;
      const Eigen::Vector2d g = log_density_gradient(th, eps, lam);
      return g(a) * g(b);
    };
    // even integrand: (1/4pi) * 2 * int_0^inf
    return half_line(f) / (2.0 * kPi);
  };
  Eigen::Matrix2d I;
  I(0, 0) = entry(0, 0);
  I(1, 1) = entry(1, 1);
  I(0, 1) = I(1, 0) = entry(0, 1);
  return I;
}

Eigen::Matrix2d rate_matrix(double eps, const MixedTheta& th) {
  th.validate();
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
  const double H = th.h.h();
  const double s = std::pow(eps, -1.0 / (4.0 * H - 2.0));
  Eigen::Matrix2d M;
  M << 1.0, -2.0 * th.sigma * th.sigma * (-std::log(eps) / (2.0 * H - 1.0)), 0.0, 1.0;
  return s * M;
}

std::pair<double, double> minimax_rates(double eps, double h) {
  if (!(h > 0.75 && h <= 1.0)) throw RegimeError("minimax rates need H in (3/4, 1]");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
  const double r = std::pow(eps, 1.0 / (4.0 * h - 2.0));
  return {r, r / (-std::log(eps))};
}

void write_mc_csv(const McReport& r, std::ostream& os) {
  os << "seed,theta_hat,z\n" << std::setprecision(12);
  for (int i = 0; i < r.reps; ++i) os << r.seeds[i] << ',' << r.theta_hat[i] << ',' << r.z[i] << '\n';
}

}  // namespace fracspec
