#pragma once

#include <functional>
#include <vector>

namespace fracspec {

using RealFn = std::function<double(double)>;

// integral over [a,b]; endpoint singularities are fine
double integrate(const RealFn& f, double a, double b, double tol = 1e-12);
// integral over [a, inf); f must decay at least algebraically
double integrate_to_inf(const RealFn& f, double a, double tol = 1e-12);

struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

// n-point Gauss-Legendre rule on [a,b]
QuadRule gauss_legendre(int n, double a, double b);

// Gauss-Legendre panels on geometrically shrinking intervals toward 0:
// [t_max r^{k+1}, t_max r^k], stopping once the panel falls below floor*t_max
QuadRule geometric_panels(double t_max, double ratio, double floor, int nodes_per_panel);

}  // namespace fracspec
