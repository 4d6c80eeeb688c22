#include <gtest/gtest.h>

#include <cmath>

#include "fracspec/errors.hpp"
#include "fracspec/quad_oracle.hpp"
#include "fracspec/secondkind.hpp"

using namespace fracspec;

namespace {

SecondKindProblem problem(double h, double eps, int n, double T = 1.0) {
  SecondKindProblem p{HurstParam(h), eps};
  p.n = n;
  p.T = T;
  return p;
}

const std::vector<EigenPair>& fracnoise_pairs() {
  static const auto pairs = [] {
    OracleOptions opt;
    opt.richardson = false;
    return oracle_eigenpairs(KernelSpec::frac_noise(0.75), 2000, 200, opt);
  }();
  return pairs;
}

BracketCurve synthetic_curve(double t_max, int n, double power) {
  BracketCurve c;
  const double dt = t_max / n;
  for (int k = 0; k <= n; ++k) {
    const double t = k * dt;
    c.t.push_back(t);
    c.bracket_a.push_back(std::pow(t, power));
    c.derivative.push_back(t > 0.0 ? power * std::pow(t, power - 1.0) : 0.0);
  }
  c.bracket_b = c.bracket_a;
  c.g_diag.assign(n + 1, 0.0);
  return c;
}

}  // namespace

TEST(SolveSecondKind, DominatedByEps) {
  const auto s = solve_second_kind(problem(0.75, 1e8, 200));
  for (double g : s.g) EXPECT_NEAR(g * 1e8, 1.0, 1e-6);
  auto p = problem(0.75, 1e8, 200);
  p.rhs = RhsKind::KernelSlice;
  const auto k = solve_second_kind(p);
  // cell average of c_H (1-s)^{2H-2} on the first cell
  const double w = 1.0 / 200;
  const double f0 = 0.375 * (1.0 - std::pow(1.0 - w, 0.5)) / (0.5 * w);
  EXPECT_NEAR(k.g[0] * 1e8 / f0, 1.0, 1e-6);
}

TEST(SolveSecondKind, SymmetricAndResidual) {
  const auto s = solve_second_kind(problem(0.75, 1.0, 1000));
  const int n = static_cast<int>(s.g.size());
  for (int i = 0; i < n; ++i) EXPECT_NEAR(s.g[i], s.g[n - 1 - i], 1e-8);
  EXPECT_LE(s.residual, 1e-10);
  for (double g : s.g) {
    EXPECT_GT(g, 0.0);
    EXPECT_LT(g, 1.0);
  }
}

TEST(SolveSecondKind, ApproachesFirstKind) {
  const auto s = solve_second_kind(problem(0.75, 0.01, 1000));
  const auto u0 = solve_first_kind(HurstParam(0.75), 1000);
  double worst = 0.0;
  for (int i = 200; i < 800; ++i) worst = std::max(worst, std::abs(s.g[i] / u0.u[i] - 1.0));
  EXPECT_LT(worst, 0.05);
}

TEST(SolveSecondKind, HorizonRescaling) {
  // g on [0,T] with eps maps to u on [0,1] with eps T^{1-2H}: u(x) = T^{2H-1} g(xT)
  const double H = 0.75, T = 4.0;
  const auto g = solve_second_kind(problem(H, 1.0, 400, T));
  const auto u = solve_second_kind(problem(H, std::pow(T, 1.0 - 2.0 * H), 400));
  for (int i = 0; i < 400; ++i) EXPECT_NEAR(u.g[i] / (std::pow(T, 2.0 * H - 1.0) * g.g[i]), 1.0, 1e-10);
}

TEST(SolveSecondKind, Validation) {
  EXPECT_THROW(solve_second_kind(problem(0.5, 1.0, 100)), RegimeError);
  EXPECT_THROW(solve_second_kind(problem(0.75, 0.0, 100)), DomainError);
  EXPECT_THROW(solve_second_kind(problem(0.75, 1.0, 100, -1.0)), DomainError);
}

TEST(UEps, SlopeAndDominatedRegime) {
  const std::vector<double> eps = {0.1, 0.05, 0.025, 0.0125};
  const auto u = u_eps_boundary_sweep(HurstParam(0.75), eps, 2000, 3.0);
  std::vector<double> v;
  for (const auto& b : u) v.push_back(b.value);
  EXPECT_NEAR(loglog_slope(eps, v), -0.5, 0.05);
  EXPECT_NEAR(u_eps_boundary(HurstParam(0.75), 1e8, 200).value * 1e8, 1.0, 1e-6);
}

TEST(UEps, SelfConvergence) {
  const double a = u_eps_boundary(HurstParam(0.75), 0.05, 1000).value;
  const double b = u_eps_boundary(HurstParam(0.75), 0.05, 2000).value;
  EXPECT_LT(std::abs(a / b - 1.0), 0.02);
}

TEST(UEps, UnresolvedLayerFlagged) {
  EXPECT_THROW(u_eps_boundary(HurstParam(0.9), 1e-6, 40, 1.0), NumericalError);
}

TEST(HsSeries, AgreesWithDirectSolve) {
  const auto s = hs_series_u_eps(HurstParam(0.75), 0.1, fracnoise_pairs());
  const double d = u_eps_boundary(HurstParam(0.75), 0.1, 2000).value;
  EXPECT_LT(std::abs(s.value / d - 1.0), 0.05) << s.value << " vs " << d;
  EXPECT_EQ(s.terms, 200);
  EXPECT_NEAR(s.value, s.partial_sum + s.tail, 1e-15 * std::abs(s.value));
  EXPECT_THROW(hs_series_u_eps(HurstParam(0.75), 0.1, std::vector<EigenPair>(fracnoise_pairs().begin(),
                                                                             fracnoise_pairs().begin() + 50)),
               DomainError);
}

TEST(HsSeries, ScalarProducts) {
  const auto& pairs = fracnoise_pairs();
  for (int k = 1; k <= 10; ++k) EXPECT_LT(std::abs(pairs[2 * k - 1].inner_one()), 1e-6) << "index " << 2 * k;
  std::vector<double> n, c;
  for (int j = 10; j <= 40; ++j) {
    n.push_back(j);
    c.push_back(std::abs(pairs[2 * j - 2].inner_one()));
  }
  EXPECT_NEAR(loglog_slope(n, c), -(0.5 + 0.75), 0.1);
}

TEST(Bracket, VariantsAndShape) {
  const auto c = martingale_bracket(HurstParam(0.75), 1.0, 32.0, 2048);
  EXPECT_EQ(c.t.front(), 0.0);
  EXPECT_EQ(c.bracket_a.front(), 0.0);
  EXPECT_EQ(c.bracket_b.front(), 0.0);
  for (std::size_t i = 1; i < c.t.size(); ++i) {
    EXPECT_GE(c.bracket_a[i], c.bracket_a[i - 1]);
    EXPECT_GE(c.bracket_b[i], c.bracket_b[i - 1]);
    if (c.t[i] >= 0.5 && c.t[i] <= 4.0) EXPECT_LT(std::abs(c.bracket_b[i] / c.bracket_a[i] - 1.0), 0.02);
  }
  std::vector<double> x, d;
  for (std::size_t i = 0; i < c.t.size(); ++i)
    if (c.t[i] >= 4.0) {
      x.push_back(c.t[i]);
      d.push_back(c.derivative[i]);
    }
  EXPECT_NEAR(loglog_slope(x, d), 1.0 - 2.0 * 0.75, 0.1);
  const auto g = growth_conditions_check(c);
  EXPECT_TRUE(g.first_trends_to_zero);
  EXPECT_TRUE(g.integral_cauchy);
}

TEST(Growth, SyntheticPowerLaw) {
  const auto g = growth_conditions_check(synthetic_curve(64.0, 256, 0.5));
  EXPECT_TRUE(g.first_trends_to_zero);
  EXPECT_TRUE(g.integral_cauchy);
  ASSERT_EQ(g.t_probe.size(), 3u);
  // (1/t) max(1/d, d) with d = 0.5 t^{-1/2}
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g.first_condition[i], 2.0 * std::pow(g.t_probe[i], -0.5), 1e-12);
}

TEST(Growth, SyntheticLinear) {
  const auto g = growth_conditions_check(synthetic_curve(64.0, 256, 1.0));
  EXPECT_TRUE(g.first_trends_to_zero);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g.first_condition[i], 1.0 / g.t_probe[i], 1e-15);
  EXPECT_EQ(g.log_derivative_integral, 0.0);
  EXPECT_TRUE(g.integral_cauchy);
}

TEST(Growth, InsufficientRange) {
  EXPECT_THROW(growth_conditions_check(synthetic_curve(16.0, 64, 0.5)), DomainError);
}

TEST(LoglogSlope, Exact) {
  EXPECT_NEAR(loglog_slope({1.0, 2.0, 4.0}, {3.0, 3.0 * std::pow(2.0, -0.7), 3.0 * std::pow(4.0, -0.7)}), -0.7, 1e-14);
  EXPECT_THROW(loglog_slope({1.0}, {1.0}), DomainError);
}
