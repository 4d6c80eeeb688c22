#include "fracspec/secondkind.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "fracspec/errors.hpp"
#include "fracspec/quad_oracle.hpp"

namespace fracspec {

namespace {

std::shared_ptr<const Mesh> make_mesh(int n, double grading, double T) {
  if (grading == 1.0) return std::make_shared<const Mesh>(Mesh::uniform(n, T));
  return std::make_shared<const Mesh>(Mesh::graded(n, grading, T));
}

// phi(T) from the eigen-equation with exact cell integrals of the kernel
double endpoint_value(const HurstParam& h, const EigenPair& e, double T) {
  const auto& x = e.mesh->nodes;
  const double a = 2.0 * h.h() - 1.0;
  double s = 0.0;
  for (std::size_t j = 0; j < e.phi.size(); ++j) s += e.phi[j] * (std::pow(T - x[j], a) - std::pow(T - x[j + 1], a));
  return h.c_h() / a * s / e.lam;
}

// cell averages of the right-hand side
Eigen::VectorXd rhs_averages(const SecondKindProblem& p, const Mesh& m) {
  const int n = m.cells();
  Eigen::VectorXd f(n);
  if (p.rhs == RhsKind::One) {
    f.setOnes();
    return f;
  }
  const double e = 2.0 * p.h.h() - 1.0;
  const double c = p.h.c_h();
  for (int i = 0; i < n; ++i) {
    const double a = p.T - m.nodes[i], b = p.T - m.nodes[i + 1];
    f(i) = c * (std::pow(a, e) - std::pow(b, e)) / (e * m.width(i));
  }
  return f;
}

// average of (distance to endpoint)^p over [a,b]
double pow_avg(double p, double a, double b) {
  return (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / ((p + 1.0) * (b - a));
}

double endpoint_extrapolate(const Mesh& m, const std::vector<double>& u, double H) {
  const int n = m.cells();
  const double p = 2.0 * H - 1.0;
  const double T = m.nodes.back();
  const double e1 = T - m.nodes[n - 1], e0 = T - m.nodes[n - 2];
  // u ~ c0 - c1 (T-s)^p over the last two cells
  Eigen::Matrix2d A;
  A << 1.0, -pow_avg(p, 0.0, e1), 1.0, -pow_avg(p, e1, e0);
  Eigen::Vector2d r(u[n - 1], u[n - 2]);
  return A.partialPivLu().solve(r)(0);
}

}  // namespace

void SecondKindProblem::validate() const {
  if (!h.is_long_memory()) throw RegimeError("second-kind problem needs H > 1/2");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (!(T > 0.0)) throw DomainError("horizon must be positive");
  if (n < 4) throw DomainError("too few cells");
}

SecondKindSolution solve_second_kind(const SecondKindProblem& p) {
  p.validate();
  auto mesh = make_mesh(p.n, p.grading, p.T);
  const int n = mesh->cells();
  Eigen::MatrixXd B = assemble_cell_integrals(KernelSpec::frac_noise(p.h.h()), *mesh);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = mesh->width(i);
  Eigen::MatrixXd A = B;
  A.diagonal() += p.eps * w;
  Eigen::VectorXd f = rhs_averages(p, *mesh);
  Eigen::VectorXd rhs = w.cwiseProduct(f);
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw NumericalError("second-kind matrix is not positive definite");
  Eigen::VectorXd g = llt.solve(rhs);
  Eigen::VectorXd r = (A * g - rhs).cwiseQuotient(w);
  // one refinement step
  g -= llt.solve(r.cwiseProduct(w));
  r = (A * g - rhs).cwiseQuotient(w);
  SecondKindSolution s;
  s.mesh = mesh;
  s.g.assign(g.data(), g.data() + n);
  s.residual = r.cwiseAbs().maxCoeff();
  if (s.residual > 1e-10 * std::max(1.0, f.cwiseAbs().maxCoeff()))
    throw NumericalError("second-kind residual above tolerance");
  return s;
}

std::vector<UEpsBoundary> u_eps_boundary_sweep(const HurstParam& h, const std::vector<double>& eps, int n,
                                               double grading) {
  if (!h.is_long_memory()) throw RegimeError("u_eps needs H > 1/2");
  auto mesh = make_mesh(n, grading, 1.0);
  Eigen::MatrixXd B = assemble_cell_integrals(KernelSpec::frac_noise(h.h()), *mesh);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = mesh->width(i);
  std::vector<UEpsBoundary> out;
  for (double e : eps) {
    if (!(e > 0.0)) throw DomainError("eps must be positive");
    Eigen::MatrixXd A = B;
    A.diagonal() += e * w;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw NumericalError("second-kind matrix is not positive definite");
    Eigen::VectorXd u = llt.solve(w);
    std::vector<double> uv(u.data(), u.data() + n);
    UEpsBoundary b;
    b.eps = e;
    b.last_cell = uv[n - 1];
    b.second_last = uv[n - 2];
    if (std::abs(b.last_cell - b.second_last) > 0.2 * std::abs(b.last_cell))
      throw NumericalError("boundary layer unresolved: last two cells differ by more than 20%");
    b.value = endpoint_extrapolate(*mesh, uv, h.h());
    out.push_back(b);
  }
  return out;
}

UEpsBoundary u_eps_boundary(const HurstParam& h, double eps, int n, double grading) {
  return u_eps_boundary_sweep(h, {eps}, n, grading).front();
}

HsSeries hs_series_u_eps(const HurstParam& h, double eps, const std::vector<EigenPair>& pairs) {
  if (!h.is_long_memory()) throw RegimeError("series needs H > 1/2");
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (pairs.size() < 100) throw DomainError("series needs at least 100 eigenpairs");
  const int N = static_cast<int>(pairs.size()) / 2 * 2;
  const int K = N / 2;
  const double T = pairs.front().mesh->nodes.back();

  HsSeries out;
  out.terms = N;
  std::vector<double> num(N);
  for (int k = 0; k < N; ++k) {
    num[k] = pairs[k].inner_one() * endpoint_value(h, pairs[k], T);
    out.partial_sum += num[k] / (eps + pairs[k].lam);
  }

  // odd-index numerators decay like k^{-(1/2+H)}, eigenvalues like n^{1-2H}
  const double p = -(0.5 + h.h());
  const double q = 1.0 - 2.0 * h.h();
  double la = 0.0, lc = 0.0;
  int ca = 0, cc = 0;
  for (int k = K / 2; k <= K; ++k) {
    la += std::log(std::abs(num[2 * k - 2])) - p * std::log(static_cast<double>(k));
    ++ca;
  }
  for (int m = N / 2; m <= N; ++m) {
    lc += std::log(pairs[m - 1].lam) - q * std::log(static_cast<double>(m));
    ++cc;
  }
  const double A = std::exp(la / ca), C = std::exp(lc / cc);
  const double sgn = num[2 * K - 2] < 0.0 ? -1.0 : 1.0;
  const long kmax = 20000000;
  double tail = 0.0;
  for (long k = kmax; k > K; --k) {
    const double kd = static_cast<double>(k);
    tail += A * std::pow(kd, p) / (eps + C * std::pow(2.0 * kd - 1.0, q));
  }
  tail += A / eps * std::pow(static_cast<double>(kmax), p + 1.0) / (-(p + 1.0));
  out.tail = sgn * tail;
  out.value = out.partial_sum + out.tail;
  return out;
}

BracketCurve martingale_bracket(const HurstParam& h, double eps, double t_max, int n) {
  if (!h.is_long_memory()) throw RegimeError("bracket needs H > 1/2");
  if (!(eps > 0.0) || !(t_max > 0.0)) throw DomainError("eps and t_max must be positive");
  if (n < 8) throw DomainError("too few cells");
  Mesh mesh = Mesh::uniform(n, t_max);
  Eigen::MatrixXd A = assemble_cell_integrals(KernelSpec::frac_noise(h.h()), mesh);
  const double dt = t_max / n;
  A.diagonal().array() += eps * dt;
  // leading principal blocks of A are the systems on [0, t_k]
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw NumericalError("bracket matrix is not positive definite");
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::VectorXd y = L.triangularView<Eigen::Lower>().solve(Eigen::VectorXd::Constant(n, dt));

  BracketCurve c;
  c.t.resize(n + 1);
  c.bracket_a.assign(n + 1, 0.0);
  c.bracket_b.assign(n + 1, 0.0);
  c.g_diag.assign(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) c.t[k] = k * dt;
  for (int k = 1; k <= n; ++k) c.bracket_a[k] = c.bracket_a[k - 1] + y(k - 1) * y(k - 1);

  const double p = 2.0 * h.h() - 1.0;
  Eigen::Matrix3d M;
  M << 1.0, -pow_avg(p, 0.0, dt), 0.5 * dt, 1.0, -pow_avg(p, dt, 2.0 * dt), 1.5 * dt, 1.0,
      -pow_avg(p, 2.0 * dt, 3.0 * dt), 2.5 * dt;
  Eigen::PartialPivLU<Eigen::Matrix3d> lu(M);
  c.g_diag[0] = 1.0 / eps;
  for (int k = 1; k <= n; ++k) {
    const int i = k - 1;
    const double uk = y(i) / L(i, i);
    if (k >= 3) {
      const double u1 = (y(i - 1) - L(i, i - 1) * uk) / L(i - 1, i - 1);
      const double u2 = (y(i - 2) - L(i, i - 2) * uk - L(i - 1, i - 2) * u1) / L(i - 2, i - 2);
      c.g_diag[k] = lu.solve(Eigen::Vector3d(uk, u1, u2))(0);
    } else {
      c.g_diag[k] = uk;
    }
  }
  for (int k = 1; k <= n; ++k) {
    const double d0 = eps * c.g_diag[k - 1] * c.g_diag[k - 1];
    const double d1 = eps * c.g_diag[k] * c.g_diag[k];
    c.bracket_b[k] = c.bracket_b[k - 1] + 0.5 * (d0 + d1) * dt;
  }
  c.derivative.assign(n + 1, 0.0);
  for (int k = 1; k < n; ++k) c.derivative[k] = (c.bracket_a[k + 1] - c.bracket_a[k - 1]) / (2.0 * dt);
  c.derivative[0] = (c.bracket_a[1] - c.bracket_a[0]) / dt;
  c.derivative[n] = (c.bracket_a[n] - c.bracket_a[n - 1]) / dt;
  return c;
}

GrowthReport growth_conditions_check(const BracketCurve& curve) {
  const std::size_t m = curve.t.size();
  if (m < 8 || curve.derivative.size() != m) throw DomainError("malformed bracket curve");
  const double t_end = curve.t.back();
  if (t_end < 32.0) throw DomainError("growth check needs the curve to reach t >= 32");

  auto value_at = [&](double t) {
    std::size_t k = 0;
    while (k + 1 < m && curve.t[k + 1] <= t) ++k;
    return k;
  };
  GrowthReport r;
  for (double t : {t_end / 4.0, t_end / 2.0, t_end}) {
    const std::size_t k = value_at(t);
    const double d = curve.derivative[k];
    r.t_probe.push_back(curve.t[k]);
    r.first_condition.push_back(std::max(1.0 / d, d) / curve.t[k]);
  }
  r.first_trends_to_zero = r.first_condition[1] < r.first_condition[0] && r.first_condition[2] < r.first_condition[1];

  // (d/dt log d<M>/dt)^2 over points with positive finite derivative
  std::vector<double> ts, ls;
  for (std::size_t k = 0; k < m; ++k) {
    const double d = curve.derivative[k];
    if (curve.t[k] > 0.0 && d > 0.0 && std::isfinite(d)) {
      ts.push_back(curve.t[k]);
      ls.push_back(std::log(d));
    }
  }
  if (ts.size() < 4) throw DomainError("too few usable bracket samples");
  double total = 0.0, tail = 0.0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double dl = (ls[k + 1] - ls[k]) / (ts[k + 1] - ts[k]);
    const double piece = dl * dl * (ts[k + 1] - ts[k]);
    total += piece;
    if (ts[k] >= t_end / 2.0) tail += piece;
  }
  r.log_derivative_integral = total;
  r.tail_fraction = total > 0.0 ? tail / total : 0.0;
  r.integral_cauchy = total <= 0.0 || r.tail_fraction < 0.1;
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs matching samples");
  const int m = static_cast<int>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < m; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("log-log fit needs positive samples");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void write_secondkind_csv(const HurstParam& h, const std::vector<UEpsBoundary>& u, const BracketCurve* curve,
                          std::ostream& os) {
  os << std::setprecision(12);
  if (!u.empty()) {
    std::vector<double> e, v;
    for (const auto& b : u) {
      e.push_back(b.eps);
      v.push_back(b.value);
    }
    const double slope = u.size() >= 2 ? loglog_slope(e, v) : 0.0;
    os << "H,eps,T,u_eps_boundary,slope\n";
    for (const auto& b : u) os << h.h() << ',' << b.eps << ",1," << b.value << ',' << slope << '\n';
  }
  if (curve) {
    os << "H,t,bracketA,bracketB,derivative\n";
    for (std::size_t k = 0; k < curve->t.size(); ++k)
      os << h.h() << ',' << curve->t[k] << ',' << curve->bracket_a[k] << ',' << curve->bracket_b[k] << ','
         << curve->derivative[k] << '\n';
  }
}

}  // namespace fracspec
