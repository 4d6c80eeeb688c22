#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracspec/errors.hpp"
#include "fracspec/quad_oracle.hpp"
#include "fracspec/spectra.hpp"

using namespace fracspec;

namespace {
constexpr double kPi = std::numbers::pi;

const std::vector<double> kHGrid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

// one expensive oracle run shared across tests
const std::vector<EigenPair>& oracle_075() {
  static const auto pairs = oracle_eigenpairs(KernelSpec::fbm(0.75), 4000, 30);
  return pairs;
}

std::vector<EigenPair> exact_brownian_list(int count) {
  std::vector<EigenPair> out;
  for (int n = 1; n <= count; ++n) {
    EigenPair p;
    p.index = n;
    p.lam = 1.0 / std::pow((n - 0.5) * kPi, 2);
    out.push_back(p);
  }
  return out;
}
}  // namespace

TEST(Brownian, Exact) {
  const auto p1 = brownian_eigenpair(1);
  EXPECT_NEAR(p1.nu_n, kPi / 2, 1e-15);
  EXPECT_NEAR(p1.lam_n, 0.405285, 1e-6);
  const auto p2 = brownian_eigenpair(2);
  EXPECT_NEAR(p2.nu_n, 1.5 * kPi, 1e-15);
  EXPECT_NEAR(p2.lam_n, 0.045032, 1e-6);
  EXPECT_NEAR(p1.phi(0.3), std::sqrt(2.0) * std::sin(0.3 * kPi / 2), 1e-15);
  EXPECT_THROW(brownian_eigenpair(0), DomainError);
}

TEST(FbmNu, Examples) {
  for (int n : {1, 2, 7, 100}) EXPECT_DOUBLE_EQ(fbm_nu(HurstParam(0.5), n), (n - 0.5) * kPi);
  EXPECT_NEAR(fbm_nu(HurstParam(0.9), 1), kPi / 2 - (0.16 / 1.4) * (kPi / 2), 1e-14);
  for (double h : kHGrid) EXPECT_NEAR(fbm_nu(HurstParam(h), 8) - fbm_nu(HurstParam(h), 7), kPi, 1e-12);
}

TEST(FbmNu, BracketedAboveNMin) {
  for (double h : kHGrid)
    for (int n = 4; n <= 200; ++n) {
      const double nu = fbm_nu(HurstParam(h), n);
      EXPECT_GT(nu, (n - 1) * kPi);
      EXPECT_LT(nu, n * kPi);
    }
}

TEST(FbmEigenvalue, BrownianLimitAndContinuity) {
  EXPECT_NEAR(fbm_eigenvalue(HurstParam(0.5), 1), 1.0 / std::pow(kPi / 2, 2), 1e-14);
  for (int n : {1, 2, 5, 50}) {
    const double b = brownian_eigenpair(n).lam_n;
    EXPECT_LT(std::abs(fbm_eigenvalue(HurstParam(0.5 + 1e-6), n) / b - 1.0), 1e-4);
    EXPECT_LT(std::abs(fbm_eigenvalue(HurstParam(0.5 - 1e-6), n) / b - 1.0), 1e-4);
  }
}

TEST(FbmEigenvalue, MonotoneDecay) {
  for (double h : kHGrid) {
    const HurstParam hp(h);
    double prev = fbm_eigenvalue(hp, 1);
    for (int n = 2; n <= 10000; ++n) {
      const double v = fbm_eigenvalue(hp, n);
      ASSERT_LT(v, prev) << "H=" << h << " n=" << n;
      prev = v;
    }
  }
}

// the first-order constant ratio computed from the closed form: ((n pi)/nu_n)^{2H+1}
TEST(FbmEigenvalue, FirstOrderRatioShrinks) {
  for (double h : {0.6, 0.75, 0.9}) {
    const HurstParam hp(h);
    double prev = 1e9;
    for (int n : {10, 50, 100, 1000, 100000}) {
      const double r = bronski_ratio(hp, fbm_eigenvalue(hp, n), n);
      const double expect = std::pow(n * kPi / fbm_nu(hp, n), 2 * h + 1);
      EXPECT_NEAR(r, expect, 1e-12 * expect);
      EXPECT_LT(std::abs(r - 1.0), prev);
      prev = std::abs(r - 1.0);
    }
    EXPECT_LT(prev, 1e-4);
  }
}

TEST(EtaH, ValuesAndSign) {
  EXPECT_DOUBLE_EQ(eta_h(HurstParam(0.5)), 0.0);
  for (double h : {0.55, 0.7, 0.9}) EXPECT_LT(eta_h(HurstParam(h)), 0.0);
  for (double h : {0.1, 0.3, 0.45}) EXPECT_GT(eta_h(HurstParam(h)), 0.0);
  EXPECT_NEAR(eta_h(HurstParam(0.75)), 0.25 * 0.25 * (-0.75) / 1.25, 1e-15);
}

TEST(Eigenfunction, BrownianCase) {
  for (int n : {1, 3, 10})
    for (double t : {0.0, 0.2, 0.77, 1.0})
      EXPECT_NEAR(fbm_eigenfunction_leading(HurstParam(0.5), n, t), std::sqrt(2.0) * std::sin(fbm_nu(HurstParam(0.5), n) * t),
                  1e-14);
}

TEST(BoundaryValue, BrownianMagnitudeAndAlternation) {
  for (int n = 1; n <= 10; ++n) {
    const double b = fbm_boundary_value(HurstParam(0.5), n);
    EXPECT_NEAR(std::abs(b), std::sqrt(2.0), 1e-15);
    // sqrt(2) sin((n-1/2) pi) has the opposite sign convention
    EXPECT_NEAR(std::abs(brownian_eigenpair(n).boundary_value), std::abs(b), 1e-12);
    if (n > 1) EXPECT_LT(b * fbm_boundary_value(HurstParam(0.5), n - 1), 0.0);
  }
}

TEST(Oracle075, EigenvalueTwenty) {
  const auto& o = oracle_075();
  EXPECT_LT(std::abs(fbm_eigenvalue(HurstParam(0.75), 20) / o[19].lam - 1.0), 0.01);
}

TEST(Oracle075, BoundaryValueTwenty) {
  const auto& o = oracle_075();
  const double v = std::abs(o[19].eval(1.0));
  EXPECT_LT(std::abs(v / std::sqrt(2.5) - 1.0), 0.10) << v;
  EXPECT_NEAR(std::abs(fbm_boundary_value(HurstParam(0.75), 20)), std::sqrt(2.5), 1e-15);
}

TEST(Oracle075, InteriorDistanceDecreases) {
  const auto& o = oracle_075();
  const HurstParam h(0.75);
  const double d10 = interior_distance(h, 10, o[9]), d20 = interior_distance(h, 20, o[19]),
               d30 = interior_distance(h, 30, o[29]);
  EXPECT_LT(d20, d10);
  EXPECT_LT(d30, d20);
}

TEST(Calibration, Examples) {
  EXPECT_EQ(calibrate_enumeration(HurstParam(0.5), exact_brownian_list(20)).shift, 0);
  EXPECT_EQ(calibrate_enumeration(HurstParam(0.75), oracle_075()).shift, 0);
  EXPECT_THROW(calibrate_enumeration(HurstParam(0.5), exact_brownian_list(3)), DomainError);
}

TEST(Calibration, DetectsShift) {
  // drop the first eigenvalue; the best fit then moves by one index
  auto list = exact_brownian_list(20);
  list.erase(list.begin());
  EXPECT_EQ(calibrate_enumeration(HurstParam(0.5), list).shift, 1);
}

TEST(Compare, Rows) {
  const auto rows = compare_spectrum(HurstParam(0.75), oracle_075());
  ASSERT_EQ(rows.size(), 30u);
  EXPECT_EQ(rows[0].n, 1);
  EXPECT_NEAR(rows[29].rel_err, rows[29].lam_asym / rows[29].lam_oracle - 1.0, 1e-15);
  EXPECT_LT(std::abs(rows[29].rel_err), 0.01);
}
