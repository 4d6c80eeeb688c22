#include "fracspec/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

#include "fracspec/errors.hpp"

namespace fracspec {

double integrate(const RealFn& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> ts;
  double err = 0.0;
  double v = ts.integrate(f, a, b, tol, &err);
  if (!std::isfinite(v)) throw NumericalError("finite-interval quadrature produced a non-finite value");
  return v;
}

double integrate_to_inf(const RealFn& f, double a, double tol) {
  static thread_local boost::math::quadrature::exp_sinh<double> es;
  double err = 0.0;
  double v = es.integrate(f, a, std::numeric_limits<double>::infinity(), tol, &err);
  if (!std::isfinite(v)) throw NumericalError("half-line quadrature produced a non-finite value");
  return v;
}

namespace {

template <unsigned N>
QuadRule gl_rule(double a, double b) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& xs = G::abscissa();
  const auto& ws = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  QuadRule r;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0.0) {
      r.x.push_back(c);
      r.w.push_back(h * ws[i]);
    } else {
      r.x.push_back(c - h * xs[i]);
      r.w.push_back(h * ws[i]);
      r.x.push_back(c + h * xs[i]);
      r.w.push_back(h * ws[i]);
    }
  }
  return r;
}

}  // namespace

QuadRule gauss_legendre(int n, double a, double b) {
  switch (n) {
    case 3: return gl_rule<3>(a, b);
    case 5: return gl_rule<5>(a, b);
    case 8: return gl_rule<8>(a, b);
    case 10: return gl_rule<10>(a, b);
    case 16: return gl_rule<16>(a, b);
    case 20: return gl_rule<20>(a, b);
    case 30: return gl_rule<30>(a, b);
    default: throw DomainError("unsupported Gauss-Legendre order");
  }
}

QuadRule geometric_panels(double t_max, double ratio, double floor, int nodes_per_panel) {
  if (!(t_max > 0.0) || !(ratio > 0.0 && ratio < 1.0) || !(floor > 0.0))
    throw DomainError("bad geometric panel parameters");
  QuadRule out;
  double hi = t_max;
  while (true) {
    double lo = hi * ratio;
    if (lo < floor * t_max) lo = 0.0;
    QuadRule p = gauss_legendre(nodes_per_panel, lo, hi);
    out.x.insert(out.x.end(), p.x.begin(), p.x.end());
    out.w.insert(out.w.end(), p.w.begin(), p.w.end());
    if (lo == 0.0) break;
    hi = lo;
  }
  return out;
}

}  // namespace fracspec
