// Acceptance suite: one PASS/FAIL line per criterion, indented detail lines above it.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracspec/cli.hpp"
#include "fracspec/filtering.hpp"
#include "fracspec/hilbert_system.hpp"
#include "fracspec/inference.hpp"
#include "fracspec/parallel.hpp"
#include "fracspec/quad_oracle.hpp"
#include "fracspec/secondkind.hpp"
#include "fracspec/smallball.hpp"
#include "fracspec/spectra.hpp"

using namespace fracspec;

namespace {

constexpr double kPi = std::numbers::pi;

struct Checker {
  bool ok = true;
  void check(bool cond, const std::string& what) {
    std::printf("    [%s] %s\n", cond ? "ok" : "FAIL", what.c_str());
    std::fflush(stdout);
    ok = ok && cond;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool c1() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  OracleOptions opt;
  opt.richardson = false;
  const auto pairs = oracle_eigenpairs(KernelSpec::brownian(), 2000, 5, opt);
  const double secs = seconds_since(t0);
  for (int n = 1; n <= 5; ++n) {
    const double exact = 1.0 / std::pow((n - 0.5) * kPi, 2);
    const double rel = std::abs(pairs[n - 1].lam / exact - 1.0);
    c.check(rel < 1e-3, fmt("lambda_%g rel err %.3e < 1e-3", n, rel));
  }
  c.check(secs < 60.0, fmt("runtime %.1fs < 60s", secs));
  return c.ok;
}

bool c2() {
  Checker c;
  for (double hv : {0.6, 0.75, 0.9}) {
    const HurstParam h(hv);
    const auto pairs = oracle_eigenpairs(KernelSpec::fbm(hv), 4000, 50);
    auto extrap = [&](int n) { return pairs[n - 1].lam - *pairs[n - 1].err; };
    auto rel = [&](int n) { return std::abs(fbm_eigenvalue(h, n) / extrap(n) - 1.0); };
    for (int start : {10, 11}) {
      bool mono = true;
      for (int n = start; n + 2 <= 30; n += 2) mono = mono && rel(n + 2) < rel(n);
      const int last = start == 10 ? 30 : 29;
      char buf[160];
      std::snprintf(buf, sizeof buf, "H=%.2f rel err decreasing over %s n in [10,30]: %.3e -> %.3e", hv,
                    start == 10 ? "even" : "odd", rel(start), rel(last));
      c.check(mono, buf);
    }
    c.check(rel(30) < 0.01, fmt("H=%.2f rel err at n=30 %.3e < 1e-2", hv, rel(30)));
    const auto cal = calibrate_enumeration(h, pairs);
    c.check(cal.shift == 0, fmt("H=%.2f calibration shift %g", hv, cal.shift));
    const double br = bronski_ratio(h, extrap(50), 50);
    c.check(std::abs(br - 1.0) < 0.02, fmt("H=%.2f first-order constant ratio at n=50 %.4f within 2%%", hv, br));
  }
  return c.ok;
}

bool c3() {
  Checker c;
  const auto bg = beta_gamma(HurstParam(0.5));
  c.check(std::abs(bg.beta - 0.125) <= 1e-12, fmt("beta(0.5) = %.15f", bg.beta));
  c.check(std::abs(bg.gamma - 1.0) <= 1e-12, fmt("gamma(0.5) = %.15f", bg.gamma));
  std::vector<double> lams;
  double head = 0.0;
  for (int n = 1; n <= 500; ++n) {
    lams.push_back(1.0 / std::pow((n - 0.5) * kPi, 2));
    head += lams.back();
  }
  SmallBallOptions so;
  so.tail_sum = 0.5 - head;  // trace of the Brownian covariance is 1/2
  const double p = smallball_oracle(lams, 0.3, so);
  const double cm = cameron_martin(0.3).value;
  c.check(std::abs(p / cm - 1.0) <= 0.15, fmt("P_oracle(0.3)=%.5e CM=%.5e ratio %.4f within 15%%", p, cm, p / cm));
  return c.ok;
}

bool c4() {
  Checker c;
  const HurstParam h(0.75);
  const std::vector<double> eps = {0.1, 0.05, 0.025, 0.0125};
  const auto u = u_eps_boundary_sweep(h, eps, 2000, 3.0);
  std::vector<double> y;
  for (const auto& r : u) y.push_back(r.value);
  const double s = loglog_slope(eps, y);
  c.check(std::abs(s + 0.5) <= 0.05, fmt("u_eps(1) slope %.4f = -0.50 +- 0.05", s));
  const auto curve = martingale_bracket(h, 1.0, 32.0, 2048);
  std::vector<double> x, d;
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    if (curve.t[i] >= 4.0 && curve.t[i] <= 32.0) {
      x.push_back(curve.t[i]);
      d.push_back(curve.derivative[i]);
    }
    if (curve.t[i] >= 0.5) worst = std::max(worst, std::abs(curve.bracket_b[i] / curve.bracket_a[i] - 1.0));
  }
  const double bs = loglog_slope(x, d);
  c.check(std::abs(bs - (1.0 - 2.0 * 0.75)) <= 0.1, fmt("bracket growth slope %.4f = %.2f +- 0.1", bs, 1.0 - 1.5));
  c.check(worst <= 0.02, fmt("bracket variants max rel diff on [0.5,32] %.4f <= 0.02", worst));
  return c.ok;
}

bool c5() {
  Checker c;
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> ub(-2.0, 2.0), um(0.2, 3.0), ue(0.05, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    FilterModel m;
    m.beta = ub(gen);
    m.mu = um(gen);
    m.eps = ue(gen);
    worst = std::max(worst, std::abs(klb_steady_state(HurstParam(0.5), m) / steady_state_bm(m) - 1.0));
  }
  c.check(worst <= 1e-12, fmt("equal-Hurst formula vs classical limit at H=1/2: max rel %.2e", worst));
  for (double hv : {0.55, 0.7, 0.85}) {
    FilterModel m;
    m.beta = -1.0;
    m.mu = 1.0;
    m.eps = 0.5;
    const HurstParam h(hv);
    const double a = steady_state_white(h, m), b = stationary_spectral_error(h, m);
    c.check(std::abs(a / b - 1.0) <= 0.005, fmt("H=%.2f arg-integral %.10f vs spectral %.10f", hv, a, b));
  }
  FilterModel m;
  m.beta = -1.0;
  m.mu = 1.0;
  m.eps = 1.0;
  const double pr = riccati_error(m, 50.0), ps = steady_state_bm(m);
  c.check(std::abs(pr - ps) <= 1e-6, fmt("Riccati P_50 %.12f vs limit %.12f", pr, ps));
  const HurstParam h(0.7);
  FilterModel w;
  w.beta = 0.0;
  w.mu = 1.0;
  std::vector<double> eps = {1e-2, 1e-3, 1e-4}, p;
  for (double e : eps) {
    w.eps = e;
    p.push_back(steady_state_white(h, w));
  }
  const double s = loglog_slope(eps, p), target = 1.4 / 2.4;
  c.check(std::abs(s - target) <= 0.01, fmt("small-noise slope %.5f vs %.5f +- 0.01", s, target));
  const double ratio = p.back() / small_noise_error_white(h, 1.0, 1e-4);
  c.check(std::abs(ratio - 1.0) <= 0.02, fmt("prefactor ratio at eps=1e-4 %.5f within 2%%", ratio));
  return c.ok;
}

bool c6() {
  Checker c;
  struct Set {
    double h1, h2, beta, mu, eps;
  };
  const std::vector<Set> sets = {{0.8, 0.5, 0.0, 1.0, 1.0},   {0.7, 0.5, -1.0, 1.0, 0.5}, {0.9, 0.6, 1.0, 2.0, 0.1},
                                 {0.6, 0.55, -0.5, 1.0, 2.0}, {0.75, 0.3, 0.0, 0.5, 1.0}, {0.95, 0.7, 2.0, 1.0, 0.3},
                                 {0.5, 0.8, 0.0, 1.0, 1.0},   {0.5, 0.7, -1.0, 1.0, 0.5}, {0.6, 0.9, 1.0, 2.0, 0.1},
                                 {0.55, 0.6, -0.5, 1.0, 2.0}, {0.3, 0.75, 0.0, 0.5, 1.0}, {0.7, 0.95, 2.0, 1.0, 0.3}};
  int good = 0;
  for (const auto& s : sets) {
    FilterModel m;
    m.h1 = HurstParam(s.h1);
    m.h2 = HurstParam(s.h2);
    m.beta = s.beta;
    m.mu = s.mu;
    m.eps = s.eps;
    const auto z = find_zero_first_quadrant(m);
    const int want = s.h1 > s.h2 ? 1 : 0;
    bool ok = z.winding == want && z.z0.has_value() == (want == 1);
    if (ok && z.z0) ok = z.z0->real() > 0.0 && z.z0->imag() > 0.0;
    good += ok;
  }
  c.check(good == 12, fmt("winding census matches on %g of 12 sets", good));
  double worst = 0.0;
  for (double hv : {0.3, 0.5, 0.7}) {
    FilterModel m;
    m.h1 = m.h2 = HurstParam(hv);
    m.beta = 1.0;
    m.mu = 1.0;
    m.eps = 1.0;
    const auto z = find_zero_first_quadrant(m);
    worst = std::max(worst, z.z0 ? std::abs(z.z0->real() - std::sqrt(2.0)) + std::abs(z.z0->imag()) : 1.0);
  }
  c.check(worst <= 1e-10, fmt("equal-Hurst real zero t0 = sqrt(2): max err %.2e", worst));
  return c.ok;
}

bool c7() {
  Checker c;
  for (double th : {0.5, 1.0, 2.0, 5.0}) {
    const double v = whittle_rate(ou_spectral_density, th, 1e-4);
    c.check(std::abs(v * 2.0 * th - 1.0) <= 1e-6, fmt("theta=%g Whittle rate %.10f vs %.10f", th, v, 0.5 / th));
  }
  int spd = 0;
  for (double hv : {0.8, 0.9, 0.95})
    for (double s : {0.5, 1.0, 2.0}) {
      const auto I = mixed_fisher_matrix(MixedTheta{HurstParam(hv), s}, 1.0);
      const bool sym = std::abs(I(0, 1) - I(1, 0)) <= 1e-14 * I.norm();
      const bool pd = I(0, 0) > 0.0 && I.determinant() > 0.0;
      spd += sym && pd;
    }
  c.check(spd == 9, fmt("Fisher matrix symmetric positive definite on %g of 9 grid points", spd));
  return c.ok;
}

bool c8() {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  int passed = 0;
  double worst_mean = 0.0, std_lo = 1e9, std_hi = 0.0;
  for (int m = 0; m < 20; ++m) {
    const auto r = mc_asymptotic_normality(1.0, 100.0, 0.01, 500, derive_seed(20240611, m));
    passed += r.pass();
    worst_mean = std::max(worst_mean, std::abs(r.mean));
    std_lo = std::min(std_lo, r.std);
    std_hi = std::max(std_hi, r.std);
  }
  const double secs = seconds_since(t0);
  std::printf("    z std range [%.4f, %.4f], max |mean| %.4f\n", std_lo, std_hi, worst_mean);
  c.check(passed >= 19, fmt("master seeds passing both thresholds: %g of 20 (need 19)", passed));
  c.check(secs < 300.0, fmt("runtime %.1fs < 300s", secs));
  return c.ok;
}

bool c9() {
  Checker c;
  const auto zr = find_nu_roots([](double nu) { return HilbertSystemSpec::zero_kernel(nu); }, 30.0, 60.0, 5);
  double worst = 0.0;
  for (const auto& r : zr) worst = std::max(worst, std::abs(r.nu - (std::round(r.nu / kPi - 0.5) + 0.5) * kPi));
  c.check(worst <= 1e-10, fmt("zero kernel: %g roots at (k+1/2)pi, max err %.2e", zr.size(), worst));

  Deviation d[2];
  int i = 0;
  for (double nu : {50.0, 100.0}) {
    const auto s = HilbertSystemSpec::synthetic(nu);
    d[i++] = deviation_metrics(s, solve_pq(s));
  }
  const double rp = d[0].p_sup / d[1].p_sup, rq = d[0].q_sup / d[1].q_sup;
  c.check(rp >= 1.4 && rp <= 2.6, fmt("sup|p-1| ratio nu 50->100: %.4f (2 +- 30%%)", rp));
  c.check(rq >= 2.4 && rq <= 5.6, fmt("sup|q-t| ratio nu 50->100: %.4f (4 +- 40%%)", rq));

  const auto sr = find_nu_roots([](double nu) { return HilbertSystemSpec::synthetic(nu); }, 30.0, 60.0, 5);
  bool small = true;
  for (const auto& r : sr) small = small && r.residual < 1e-8 * r.scale;
  c.check(small && sr.size() >= 9, fmt("synthetic kernel: %g bracketed roots in [30,60], all residuals < 1e-8 |xi||eta|",
                                       sr.size()));
  return c.ok;
}

// data rows (no comment lines) split into fields
std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream is(csv);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string x;
    while (std::getline(ss, x, ',')) f.push_back(x);
    if (!line.empty() && line.back() == ',') f.push_back("");
    out.push_back(f);
  }
  return out;
}

bool within_tol(const std::string& a, const std::string& b) {
  const auto ra = data_rows(a), rb = data_rows(b);
  if (ra.size() != rb.size()) return false;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    if (ra[i].size() != rb[i].size() || ra[i].empty()) return false;
    const double tol = std::stod(ra[i].back());
    for (std::size_t j = 0; j < ra[i].size(); ++j) {
      if (ra[i][j] == rb[i][j]) continue;
      char *ea, *eb;
      const double x = std::strtod(ra[i][j].c_str(), &ea), y = std::strtod(rb[i][j].c_str(), &eb);
      if (*ea || *eb || ra[i][j].empty() || rb[i][j].empty()) return false;
      if (std::abs(x - y) > tol * std::max(1.0, std::abs(x))) return false;
    }
  }
  return true;
}

bool c10() {
  Checker c;
  for (const auto& name : cli::preset_names()) {
    auto cfg = cli::preset(name);
    if (!cfg.seed) cfg.seed = 99;
    const auto t0 = std::chrono::steady_clock::now();
    const std::string a = cli::render(cfg), b = cli::render(cfg);
    cfg.jobs = 4;
    const std::string p4 = cli::render(cfg);
    c.check(a == b, name + ": rerun byte-identical (" + std::to_string(a.size()) + " bytes)");
    c.check(within_tol(a, p4), name + ": --jobs 1 vs --jobs 4 within tol column" +
                                   fmt(" (%.0fs for three runs)", seconds_since(t0)));
  }
  return c.ok;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<bool()>>> crits = {
      {"Brownian exactness", c1},   {"fBm eigenvalue asymptotics", c2}, {"small-ball constants", c3},
      {"second-kind blow-up law", c4}, {"filtering identities", c5},    {"zero structure", c6},
      {"information rates", c7},    {"MLE normality", c8},             {"Hilbert pipeline", c9},
      {"reproducibility", c10}};
  int failed = 0;
  for (std::size_t i = 0; i < crits.size(); ++i) {
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ok = crits[i].second();
    } catch (const std::exception& e) {
      std::printf("    exception: %s\n", e.what());
    }
    std::printf("%s %zu %s (%.1fs)\n", ok ? "PASS" : "FAIL", i + 1, crits[i].first.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failed += !ok;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(crits.size()) - failed, crits.size());
  return failed == 0 ? 0 : 1;
}
