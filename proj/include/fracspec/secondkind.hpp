#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "fracspec/kernels.hpp"

namespace fracspec {

enum class RhsKind { One, KernelSlice };

// eps g + int_0^T c_H |s-r|^{2H-2} g(r) dr = f(s) on [0,T]
struct SecondKindProblem {
  HurstParam h;
  double eps;
  double T = 1.0;
  RhsKind rhs = RhsKind::One;
  int n = 1000;
  double grading = 1.0;  // 1 = uniform mesh

  void validate() const;
};

struct SecondKindSolution {
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> g;  // cell values
  double residual = 0.0;  // sup norm of (eps I + K_n) g - f
};

SecondKindSolution solve_second_kind(const SecondKindProblem& p);

struct UEpsBoundary {
  double eps = 0.0;
  double value = 0.0;  // extrapolated u_eps(1)
  double last_cell = 0.0;
  double second_last = 0.0;
};

// graded mesh by default; the layer at x=1 has width about eps^{1/(2H-1)}
UEpsBoundary u_eps_boundary(const HurstParam& h, double eps, int n, double grading = 3.0);
// one assembly shared across eps values
std::vector<UEpsBoundary> u_eps_boundary_sweep(const HurstParam& h, const std::vector<double>& eps, int n,
                                               double grading = 3.0);

struct HsSeries {
  double value = 0.0;        // partial sum plus modelled tail
  double partial_sum = 0.0;  // sum over the supplied pairs
  double tail = 0.0;         // truncation estimate
  int terms = 0;
};

HsSeries hs_series_u_eps(const HurstParam& h, double eps, const std::vector<EigenPair>& pairs);

struct BracketCurve {
  std::vector<double> t;
  std::vector<double> bracket_a;   // int_0^t g(s,t) ds
  std::vector<double> bracket_b;   // eps int_0^t g(s,s)^2 ds
  std::vector<double> derivative;  // d<M>/dt from variant A
  std::vector<double> g_diag;      // g(t,t)
};

BracketCurve martingale_bracket(const HurstParam& h, double eps, double t_max, int n);

struct GrowthReport {
  std::vector<double> t_probe;
  std::vector<double> first_condition;  // (1/t) max(dt/d<M>, d<M>/dt)
  bool first_trends_to_zero = false;
  double log_derivative_integral = 0.0;
  double tail_fraction = 0.0;  // share of the integral over the last dyadic block
  bool integral_cauchy = false;
};

GrowthReport growth_conditions_check(const BracketCurve& curve);

// log-log least-squares slope
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_secondkind_csv(const HurstParam& h, const std::vector<UEpsBoundary>& u, const BracketCurve* curve,
                          std::ostream& os);

}  // namespace fracspec
