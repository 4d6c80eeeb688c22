#include "fracspec/filtering.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#include "fracspec/errors.hpp"
#include "fracspec/quadrature.hpp"

namespace fracspec {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

cplx cpow(cplx w, double a) { return std::exp(a * std::log(w)); }

// Lambda written in w = z/i, valid for Re w >= 0
cplx lambda_w(cplx w, const FilterModel& m) {
  const double a1 = 1.0 - 2.0 * m.h1.h(), a2 = 1.0 - 2.0 * m.h2.h();
  const cplx den = w * w + m.beta * m.beta;
  if (std::abs(den) < 1e-300) throw SingularityError("Lambda has a pole at z = +-beta");
  return m.mu * m.mu * m.h1.kappa() * cpow(w, a1) / den + m.eps * m.h2.kappa() * cpow(w, a2);
}

// numerator (w^2+beta^2) Lambda, free of the pole
cplx numer_w(cplx w, const FilterModel& m) {
  const double a1 = 1.0 - 2.0 * m.h1.h(), a2 = 1.0 - 2.0 * m.h2.h();
  return m.mu * m.mu * m.h1.kappa() * cpow(w, a1) + m.eps * m.h2.kappa() * cpow(w, a2) * (w * w + m.beta * m.beta);
}

cplx numer_w_prime(cplx w, const FilterModel& m) {
  const double a1 = 1.0 - 2.0 * m.h1.h(), a2 = 1.0 - 2.0 * m.h2.h();
  const double b2 = m.beta * m.beta;
  return m.mu * m.mu * m.h1.kappa() * a1 * cpow(w, a1 - 1.0) +
         m.eps * m.h2.kappa() * (a2 * cpow(w, a2 - 1.0) * (w * w + b2) + 2.0 * cpow(w, a2 + 1.0));
}

double numer_scale(cplx w, const FilterModel& m) {
  const double a1 = 1.0 - 2.0 * m.h1.h(), a2 = 1.0 - 2.0 * m.h2.h();
  return m.mu * m.mu * m.h1.kappa() * std::abs(cpow(w, a1)) +
         m.eps * m.h2.kappa() * std::abs(cpow(w, a2)) * (std::abs(w * w) + m.beta * m.beta);
}

// quarter-disc contour in w = z/i, parameter s in [0,4)
cplx contour_w(double s, double R, double delta) {
  if (s < 1.0) {
    const double t = delta * std::pow(R / delta, s);  // real axis z = t
    return cplx(0.0, -t);
  }
  if (s < 2.0) {
    const double phi = (s - 1.0) * kPi / 2.0;  // z = R e^{i phi}
    return R * std::exp(cplx(0.0, phi - kPi / 2.0));
  }
  if (s < 3.0) {
    const double y = R * std::pow(delta / R, s - 2.0);  // z = i y
    return cplx(y, 0.0);
  }
  const double phi = (4.0 - s) * kPi / 2.0;  // small arc back to the real axis
  return delta * std::exp(cplx(0.0, phi - kPi / 2.0));
}

double arg_change(const FilterModel& m, double R, double delta, double s0, double s1, cplx n0, cplx n1, int depth) {
  const double d = std::arg(n1 / n0);
  if (std::abs(d) <= kPi / 8.0 || depth > 48) {
    if (std::abs(d) > kPi / 2.0) throw NumericalError("winding count did not resolve along the contour");
    return d;
  }
  const double sm = 0.5 * (s0 + s1);
  const cplx nm = numer_w(contour_w(sm, R, delta), m);
  return arg_change(m, R, delta, s0, sm, n0, nm, depth + 1) + arg_change(m, R, delta, sm, s1, nm, n1, depth + 1);
}

}  // namespace

void FilterModel::validate() const {
  if (mu == 0.0 || !std::isfinite(mu)) throw DomainError("mu must be nonzero");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (!std::isfinite(beta)) throw DomainError("beta must be finite");
}

double FilterModel::t0() const { return std::sqrt(beta * beta + mu * mu / eps); }

double riccati_error(const FilterModel& m, double T) {
  m.validate();
  if (m.h1.h() != 0.5 || m.h2.h() != 0.5) throw RegimeError("Riccati benchmark is the classical H = 1/2 case");
  if (T < 0.0) throw DomainError("horizon must be nonnegative");
  if (T == 0.0) return 0.0;
  namespace ode = boost::numeric::odeint;
  using state = std::array<double, 1>;
  const double g2 = m.mu * m.mu / m.eps;
  state x{0.0};
  auto rhs = [&](const state& p, state& dp, double) { dp[0] = 2.0 * m.beta * p[0] + 1.0 - g2 * p[0] * p[0]; };
  auto stepper = ode::make_controlled(1e-12, 1e-12, ode::runge_kutta_dopri5<state>());
  ode::integrate_adaptive(stepper, rhs, x, 0.0, T, 1e-3);
  return x[0];
}

double steady_state_bm(const FilterModel& m) {
  m.validate();
  const double g2 = m.mu * m.mu / m.eps;
  return (m.beta + m.t0()) / g2;
}

double klb_steady_state(const HurstParam& h, const FilterModel& m) {
  m.validate();
  const double H = h.h();
  const double s = m.beta * m.beta + m.mu * m.mu / m.eps;
  const double r = std::sqrt(s) + m.beta;
  // (sqrt(s)+beta)/(sqrt(s)-beta) written without the cancellation
  const double ratio = r * r * m.eps / (m.mu * m.mu);
  return std::tgamma(2.0 * H + 1.0) / (2.0 * std::pow(s, H)) * (1.0 + std::sin(kPi * H) * ratio);
}

LambdaValue lambda_ext(cplx z, const FilterModel& m, std::optional<Branch> branch) {
  m.validate();
  if (z.imag() > 0.0) return {z, lambda_w(z / cplx(0.0, 1.0), m), Branch::UpperHalf};
  if (z.imag() < 0.0) return {z, std::conj(lambda_w(std::conj(z) / cplx(0.0, 1.0), m)), Branch::LowerHalf};
  if (!branch || (*branch != Branch::UpperLimit && *branch != Branch::LowerLimit))
    throw DomainError("real z needs an explicit limit branch");
  if (z.real() == 0.0) throw SingularityError("Lambda is not defined at z = 0");
  const cplx w(0.0, -z.real());
  const cplx up = lambda_w(w, m);
  return {z, *branch == Branch::UpperLimit ? up : std::conj(up), *branch};
}

int first_quadrant_winding(const FilterModel& m, double R) {
  m.validate();
  const double delta = 1e-9 * R;
  double total = 0.0;
  for (int seg = 0; seg < 4; ++seg) {
    const int pieces = 64;
    for (int k = 0; k < pieces; ++k) {
      const double s0 = seg + static_cast<double>(k) / pieces;
      const double s1 = seg + static_cast<double>(k + 1) / pieces;
      const cplx n0 = numer_w(contour_w(s0, R, delta), m);
      const cplx n1 = numer_w(contour_w(s1 >= 4.0 ? 0.0 : s1, R, delta), m);
      total += arg_change(m, R, delta, s0, s1, n0, n1, 0);
    }
  }
  const double turns = total / (2.0 * kPi);
  const double k = std::round(turns);
  if (std::abs(turns - k) > 0.05) throw NumericalError("non-integer winding count");
  return static_cast<int>(k);
}

ZeroResult find_zero_first_quadrant(const FilterModel& m) {
  m.validate();
  ZeroResult res;
  if (m.h1.h() == m.h2.h()) {
    res.z0 = cplx(m.t0(), 0.0);
    res.boundary_case = true;
    return res;
  }
  double R = 10.0 * std::max(1.0, m.t0());
  int wnd = -1;
  for (int attempt = 0; attempt <= 3; ++attempt, R *= 2.0) {
    try {
      wnd = first_quadrant_winding(m, R);
    } catch (const NumericalError&) {
      wnd = -1;
      continue;
    }
    if (wnd == 0 || wnd == 1) break;
  }
  res.radius = R;
  res.winding = wnd;
  if (wnd != 0 && wnd != 1) throw NumericalError("first-quadrant zero count is not 0 or 1");
  if (wnd == 0) return res;

  // seed: smallest relative numerator on a log-polar grid, z = r e^{i phi}
  cplx best_w;
  double best = std::numeric_limits<double>::infinity();
  const int nr = 200, np = 90;
  const double rlo = 1e-6 * R;
  for (int i = 0; i <= nr; ++i) {
    const double r = rlo * std::pow(R / rlo, static_cast<double>(i) / nr);
    for (int j = 1; j < np; ++j) {
      const double phi = kPi / 2.0 * j / np;
      const cplx w = r * std::exp(cplx(0.0, phi - kPi / 2.0));
      const double v = std::abs(numer_w(w, m)) / numer_scale(w, m);
      if (v < best) {
        best = v;
        best_w = w;
      }
    }
  }
  cplx w = best_w;
  for (int it = 0; it < 100; ++it) {
    const cplx f = numer_w(w, m);
    const cplx step = f / numer_w_prime(w, m);
    cplx wn = w - step;
    // stay in the open fourth quadrant of w
    double damp = 1.0;
    while ((wn.real() <= 0.0 || wn.imag() >= 0.0) && damp > 1e-6) {
      damp *= 0.5;
      wn = w - damp * step;
    }
    const bool done = std::abs(wn - w) < 1e-15 * std::abs(w);
    w = wn;
    if (done) break;
  }
  const cplx z = cplx(0.0, 1.0) * w;
  const double resid = std::abs(numer_w(w, m)) / numer_scale(w, m);
  if (!(z.real() > 0.0 && z.imag() > 0.0) || resid > 1e-12)
    throw NumericalError("Newton iteration did not converge to a first-quadrant zero");
  res.z0 = z;
  return res;
}

ThetaCurve::ThetaCurve(const HurstParam& h, const FilterModel& m) : h_(h), m_(m) {
  m.validate();
  if (m.h2.h() != 0.5) throw RegimeError("theta is defined for white observation noise");
  if (h.h() == 0.5) {
    step_ = true;
    return;
  }
  const double s = std::max({1.0, m.t0(), std::abs(m.beta)});
  const double ulo = std::log(1e-10 * s), uhi = std::log(1e8 * s);
  const int n0 = 18 * 40;
  std::vector<double> u(n0 + 1), pr(n0 + 1);
  for (int i = 0; i <= n0; ++i) {
    u[i] = ulo + (uhi - ulo) * i / n0;
    pr[i] = principal(std::exp(u[i]));
  }
  // refine until neighbouring principal values are close
  for (int pass = 0; pass < 40; ++pass) {
    std::vector<double> nu, np;
    bool changed = false;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
      nu.push_back(u[i]);
      np.push_back(pr[i]);
      if (std::abs(wrap(pr[i + 1] - pr[i])) > kPi / 16.0 && u[i + 1] - u[i] > 1e-12) {
        const double um = 0.5 * (u[i] + u[i + 1]);
        nu.push_back(um);
        np.push_back(principal(std::exp(um)));
        changed = true;
      }
    }
    nu.push_back(u.back());
    np.push_back(pr.back());
    u.swap(nu);
    pr.swap(np);
    if (!changed) break;
  }
  th_.assign(u.size(), 0.0);
  th_.back() = pr.back();
  max_jump_ = 0.0;
  for (std::size_t i = u.size() - 1; i > 0; --i) {
    const double d = wrap(pr[i - 1] - pr[i]);
    max_jump_ = std::max(max_jump_, std::abs(d));
    th_[i - 1] = th_[i] + d;
  }
  if (max_jump_ >= kPi / 2.0) throw NumericalError("theta unwrap is ambiguous after refinement");
  u_ = std::move(u);
}

double ThetaCurve::principal(double t) const {
  const double a = 1.0 - 2.0 * h_.h();
  const cplx w(0.0, -t);
  const cplx n = -m_.mu * m_.mu * h_.kappa() * cpow(w, a) + m_.eps * (t * t - m_.beta * m_.beta);
  return std::arg(n);
}

double ThetaCurve::operator()(double t) const {
  if (!(t > 0.0)) throw DomainError("theta needs t > 0");
  if (step_) return t < m_.t0() ? kPi : 0.0;
  const double u = std::log(t);
  double ref;
  if (u <= u_.front()) {
    ref = th_.front();
  } else if (u >= u_.back()) {
    ref = th_.back();
  } else {
    auto it = std::upper_bound(u_.begin(), u_.end(), u);
    const std::size_t k = static_cast<std::size_t>(it - u_.begin()) - 1;
    const double w = (u - u_[k]) / (u_[k + 1] - u_[k]);
    ref = (1.0 - w) * th_[k] + w * th_[k + 1];
  }
  const double p = principal(t);
  return p + 2.0 * kPi * std::round((ref - p) / (2.0 * kPi));
}

double ThetaCurve::integral() const {
  if (step_) return kPi * m_.t0();
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < u_.size(); ++k) {
    const QuadRule q = gauss_legendre(5, u_[k], u_[k + 1]);
    for (std::size_t j = 0; j < q.x.size(); ++j) {
      const double t = std::exp(q.x[j]);
      s += q.w[j] * (*this)(t)*t;
    }
  }
  const double tlo = std::exp(u_.front()), thi = std::exp(u_.back());
  s += th_.front() * tlo;
  s += th_.back() * thi / (2.0 * h_.h());
  return s;
}

double theta_arg(double t, const HurstParam& h, const FilterModel& m) { return ThetaCurve(h, m)(t); }

double steady_state_white(const HurstParam& h, const FilterModel& m) {
  FilterModel mm = m;
  mm.h1 = h;
  mm.h2 = HurstParam(0.5);
  mm.validate();
  ThetaCurve th(h, mm);
  double v = th.integral() / kPi + mm.beta;
  if (h.h() > 0.5) {
    const ZeroResult z = find_zero_first_quadrant(mm);
    if (!z.z0) throw NumericalError("expected a first-quadrant zero for H > 1/2");
    v += 2.0 * z.z0->real();
  }
  return mm.eps / (mm.mu * mm.mu) * v;
}

double stationary_spectral_error(const HurstParam& h, const FilterModel& m) {
  m.validate();
  if (!(m.beta < 0.0)) throw DomainError("spectral formula needs a stable state, beta < 0");
  const double g2 = m.mu * m.mu / m.eps;
  const double a = 1.0 - 2.0 * h.h();
  const double k = h.kappa();
  const double b2 = m.beta * m.beta;
  auto f = [&](double l) {
    if (l <= 0.0) return 0.0;
    return std::log1p(g2 * k * std::pow(l, a) / (b2 + l * l));
  };
  const double v = integrate(f, 0.0, 1.0, 1e-13) + integrate_to_inf(f, 1.0, 1e-13);
  return v / (kPi * g2);
}

double small_noise_exponent(const HurstParam& h1, const HurstParam& h2) {
  return h1.h() / (1.0 + h1.h() - h2.h());
}

double small_noise_error_white(const HurstParam& h, double mu, double eps) {
  if (mu == 0.0) throw DomainError("mu must be nonzero");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double e = 2.0 * h.h() + 1.0;
  return std::pow(h.kappa(), 1.0 / e) / std::sin(kPi / e) * std::pow(eps / (mu * mu), 2.0 * h.h() / e);
}

void write_filter_csv(const std::vector<FilterRow>& rows, std::ostream& os) {
  os << "H1,H2,beta,mu,eps,P_formula,P_crosscheck,rel_diff\n" << std::setprecision(12);
  for (const auto& r : rows)
    os << r.h1 << ',' << r.h2 << ',' << r.beta << ',' << r.mu << ',' << r.eps << ',' << r.p_formula << ','
       << r.p_crosscheck << ',' << r.rel_diff << '\n';
}

}  // namespace fracspec
