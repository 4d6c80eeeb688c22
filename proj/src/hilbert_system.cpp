#include "fracspec/hilbert_system.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fracspec/errors.hpp"

namespace fracspec {

namespace {
constexpr double kPi = std::numbers::pi;

// g_j = h0(s_j) e^{-nu s_j} w_j / pi
std::vector<double> node_weights(const HilbertSystemSpec& spec) {
  const auto& x = spec.grid.x;
  std::vector<double> g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double h = spec.h0(x[j]);
    if (!(h >= 0.0) || !std::isfinite(h)) throw DomainError("h0 must be finite and nonnegative");
    g[j] = h * std::exp(-spec.nu * x[j]) * spec.grid.w[j] / kPi;
  }
  return g;
}

}  // namespace

double d_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  const double c = (1.0 - alpha / 2.0) * (1.0 - alpha);
  return c / std::tgamma(alpha) * kPi / std::cos(kPi * alpha / 2.0);
}

double nu_lambda_bridge(const HurstParam& h, double value, BridgeDirection dir) {
  if (!(value > 0.0)) throw DomainError("bridge value must be positive");
  const double a = h.alpha();
  const double d = d_alpha(a);
  if (dir == BridgeDirection::NuToLambda) return d * std::pow(value, a - 3.0);
  return std::pow(value / d, 1.0 / (a - 3.0));
}

HilbertSystemSpec HilbertSystemSpec::zero_kernel(double nu) {
  HilbertSystemSpec s;
  s.kernel_name = "zero";
  s.h0 = [](double) { return 0.0; };
  s.x0 = [](cplx) { return cplx(1.0, 0.0); };
  s.nu = nu;
  s.build_grid();
  return s;
}

HilbertSystemSpec HilbertSystemSpec::synthetic(double nu) {
  HilbertSystemSpec s;
  s.kernel_name = "synthetic";
  s.h0 = [](double t) { return 1.0 / (1.0 + t * t); };
  s.x0 = [](cplx) { return cplx(1.0, 0.0); };
  s.nu = nu;
  s.build_grid();
  return s;
}

void HilbertSystemSpec::build_grid(double ratio, double floor, int nodes_per_panel) {
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  grid = geometric_panels(40.0 / nu, ratio, floor, nodes_per_panel);
}

void HilbertSystemSpec::validate() const {
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  if (!h0 || !x0) throw DomainError("h0 and X0 must be supplied");
  if (grid.x.empty() || grid.x.size() != grid.w.size()) throw DomainError("quadrature grid missing");
}

std::string HilbertSystemSpec::to_json() const {
  std::ostringstream os;
  os << std::setprecision(17) << "{\"kernel\":\"" << kernel_name << "\",\"nu\":" << nu << ",\"b_alpha\":["
     << b_alpha.real() << ',' << b_alpha.imag() << "],\"grid_nodes\":" << grid.x.size() << '}';
  return os.str();
}

double contraction_estimate(const HilbertSystemSpec& spec) {
  spec.validate();
  const auto& x = spec.grid.x;
  const auto& w = spec.grid.w;
  const int n = static_cast<int>(x.size());
  const auto g = node_weights(spec);
  // symmetrized with sqrt(w): M_ij = sqrt(w_i) k(t_i, s_j) sqrt(w_j)
  Eigen::MatrixXd M(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) M(i, j) = std::sqrt(w[i] / w[j]) * g[j] / (x[j] + x[i]);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n))), y(n);
  double sigma = 0.0;
  for (int it = 0; it < 300; ++it) {
    y.noalias() = M.transpose() * (M * v);
    const double nrm = y.norm();
    if (nrm == 0.0) return 0.0;
    const double next = std::sqrt(nrm);
    v = y / nrm;
    if (std::abs(next - sigma) <= 1e-10 * next) return next;
    sigma = next;
  }
  return sigma;
}

PqSolution solve_pq(const HilbertSystemSpec& spec, double tol, int max_iter) {
  spec.validate();
  PqSolution sol;
  sol.contraction = contraction_estimate(spec);
  if (!(sol.contraction < 1.0)) throw NumericalError("auxiliary operator is not a contraction");
  // the L2 estimate understates the sup-norm rate a little, hence the 25% margin
  sol.iteration_bound = sol.contraction > 0.0
                            ? static_cast<int>(std::ceil(1.25 * std::log(tol) / std::log(sol.contraction))) + 20
                            : 2;
  const auto& x = spec.grid.x;
  const int n = static_cast<int>(x.size());
  const auto g = node_weights(spec);
  Eigen::MatrixXd K(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) K(i, j) = g[j] / (x[j] + x[i]);
  // columns p+, p-, q+, q-
  Eigen::MatrixXd F(n, 4);
  for (int i = 0; i < n; ++i) F.row(i) << 1.0, 1.0, x[i], x[i];
  const Eigen::RowVector4d sign(1.0, -1.0, 1.0, -1.0);
  Eigen::MatrixXd X = F, Y(n, 4);
  for (int it = 1; it <= max_iter; ++it) {
    Y.noalias() = K * X;
    Y = (Y.array().rowwise() * sign.array()).matrix() + F;
    // sup distance relative to the size of the iterate; the + solutions grow near t = 0
    double conv = 0.0;
    for (int c = 0; c < 4; ++c)
      conv = std::max(conv, (Y.col(c) - X.col(c)).cwiseAbs().maxCoeff() / std::max(1.0, Y.col(c).cwiseAbs().maxCoeff()));
    X.swap(Y);
    sol.iterations = it;
    if (conv < tol) {
      sol.p_plus.assign(X.col(0).data(), X.col(0).data() + n);
      sol.p_minus.assign(X.col(1).data(), X.col(1).data() + n);
      sol.q_plus.assign(X.col(2).data(), X.col(2).data() + n);
      sol.q_minus.assign(X.col(3).data(), X.col(3).data() + n);
      return sol;
    }
  }
  throw NumericalError("fixed-point iteration cap reached");
}

PqValues eval_complex(const HilbertSystemSpec& spec, const PqSolution& sol, cplx z) {
  spec.validate();
  if (z.imag() == 0.0 && z.real() <= 0.0) throw DomainError("evaluation point lies on the cut");
  const auto& x = spec.grid.x;
  if (sol.p_plus.size() != x.size()) throw DomainError("solution does not match the grid");
  const auto g = node_weights(spec);
  cplx sp = 0.0, sm = 0.0, tp = 0.0, tm = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const cplx k = g[j] / (x[j] + z);
    sp += k * sol.p_plus[j];
    sm += k * sol.p_minus[j];
    tp += k * sol.q_plus[j];
    tm += k * sol.q_minus[j];
  }
  return {1.0 + sp, 1.0 - sm, z + tp, z - tm};
}

XiEta xi_eta(const HilbertSystemSpec& spec, const PqValues& at_i, const PqValues& at_mi) {
  if (!spec.x0) throw DomainError("X0 evaluations missing");
  const cplx I(0.0, 1.0);
  const cplx X_i = spec.x0(I), X_mi = spec.x0(-I);
  const cplx ap_mi = at_mi.p_plus + at_mi.p_minus, am_mi = at_mi.p_plus - at_mi.p_minus;
  const cplx bp_mi = at_mi.q_plus + at_mi.q_minus;
  const cplx ap_i = at_i.p_plus + at_i.p_minus, am_i = at_i.p_plus - at_i.p_minus;
  const cplx bm_i = at_i.q_plus - at_i.q_minus;
  const cplx e = std::exp(I * (spec.nu / 2.0));
  const cplx ec = std::conj(e);
  XiEta r;
  r.xi = e * X_i * (bp_mi - spec.b_alpha * ap_mi) + ec * X_mi * (bm_i - spec.b_alpha * am_i);
  r.eta = e * X_i * am_mi + ec * X_mi * ap_i;
  return r;
}

XiEta xi_eta(const HilbertSystemSpec& spec, const PqSolution& sol) {
  const cplx I(0.0, 1.0);
  return xi_eta(spec, eval_complex(spec, sol, I), eval_complex(spec, sol, -I));
}

double determinant_residual(const HilbertSystemSpec& spec) {
  const auto sol = solve_pq(spec);
  const auto r = xi_eta(spec, sol);
  return std::imag(r.xi * std::conj(r.eta));
}

double phase_law_root(const HilbertSystemSpec& spec, int k) {
  if (!spec.x0) throw DomainError("X0 evaluations missing");
  const cplx I(0.0, 1.0);
  const double phase = -std::arg(spec.x0(I)) + std::arg(spec.x0(-I)) - std::arg(I + spec.b_alpha);
  return k * kPi + phase;
}

std::vector<NuRoot> find_nu_roots(const SpecFamily& family, double lo, double hi, int count) {
  if (!(hi > lo) || !(lo > 0.0)) throw DomainError("bad nu bracket");
  if (count < 1) throw DomainError("count must be positive");
  const auto probe = family(0.5 * (lo + hi));
  const double p0 = phase_law_root(probe, 0);
  const int k_lo = static_cast<int>(std::ceil((lo - p0) / kPi));
  const int k_hi = static_cast<int>(std::floor((hi - p0) / kPi));
  if (k_hi - k_lo + 1 < count) throw DomainError("fewer sign changes than requested in the nu bracket");

  auto f = [&](double nu) { return determinant_residual(family(nu)); };
  std::vector<NuRoot> out;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double pred = p0 + k * kPi;
    const double a = pred - kPi / 4.0, b = pred + kPi / 4.0;
    const double fa = f(a), fb = f(b);
    if (fa * fb > 0.0) throw NumericalError("no sign change in a predicted root bracket");
    std::uintmax_t max_it = 200;
    const auto br = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52),
                                                      max_it);
    NuRoot r;
    r.n = k;
    r.nu = 0.5 * (br.first + br.second);
    const auto spec = family(r.nu);
    const auto xe = xi_eta(spec, solve_pq(spec));
    r.residual = std::abs(std::imag(xe.xi * std::conj(xe.eta)));
    r.scale = std::abs(xe.xi) * std::abs(xe.eta);
    r.asymptotic_prediction = pred;
    out.push_back(r);
  }
  return out;
}

Deviation deviation_metrics(const HilbertSystemSpec& spec, const PqSolution& sol) {
  Deviation d;
  for (int i = 0; i <= 35; ++i) {
    const double t = 0.5 + 0.1 * i;
    const auto v = eval_complex(spec, sol, cplx(t, 0.0));
    d.p_sup = std::max({d.p_sup, std::abs(v.p_plus - 1.0), std::abs(v.p_minus - 1.0)});
    const double qd = std::max(std::abs(v.q_plus - t), std::abs(v.q_minus - t));
    d.q_sup = std::max(d.q_sup, qd);
    d.q_rel = std::max(d.q_rel, qd / t);
  }
  return d;
}

void write_roots_csv(const std::vector<NuRoot>& roots, std::ostream& os) {
  os << "n,nu_root,residual,prediction,gap\n" << std::setprecision(17);
  for (const auto& r : roots)
    os << r.n << ',' << r.nu << ',' << r.residual << ',' << r.asymptotic_prediction << ',' << r.gap() << '\n';
}

}  // namespace fracspec
