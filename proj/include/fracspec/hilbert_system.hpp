#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracspec/kernels.hpp"
#include "fracspec/quadrature.hpp"

namespace fracspec {

using cplx = std::complex<double>;

double d_alpha(double alpha);

enum class BridgeDirection { LambdaToNu, NuToLambda };
double nu_lambda_bridge(const HurstParam& h, double value, BridgeDirection dir);

struct HilbertSystemSpec {
  std::string kernel_name;
  std::function<double(double)> h0;
  std::function<cplx(cplx)> x0;
  cplx b_alpha{0.0, 0.0};
  double nu = 50.0;
  QuadRule grid;  // on (0, 40/nu], clustered at 0

  static HilbertSystemSpec zero_kernel(double nu);
  // h0(s) = 1/(1+s^2), X0 = 1, b_alpha = 0
  static HilbertSystemSpec synthetic(double nu);

  void build_grid(double ratio = 0.5, double floor = 1e-8, int nodes_per_panel = 10);
  void validate() const;
  std::string to_json() const;
};

struct PqSolution {
  // values at grid nodes
  std::vector<double> p_plus, p_minus, q_plus, q_minus;
  double contraction = 0.0;  // L2 operator norm estimate
  int iterations = 0;
  int iteration_bound = 0;
};

// L2 norm of the integral operator in the auxiliary equations
double contraction_estimate(const HilbertSystemSpec& spec);

PqSolution solve_pq(const HilbertSystemSpec& spec, double tol = 1e-12, int max_iter = 5000);

struct PqValues {
  cplx p_plus, p_minus, q_plus, q_minus;
};

// z off the closed negative half-line
PqValues eval_complex(const HilbertSystemSpec& spec, const PqSolution& sol, cplx z);

struct XiEta {
  cplx xi, eta;
};

XiEta xi_eta(const HilbertSystemSpec& spec, const PqValues& at_i, const PqValues& at_minus_i);
XiEta xi_eta(const HilbertSystemSpec& spec, const PqSolution& sol);

double determinant_residual(const HilbertSystemSpec& spec);

struct NuRoot {
  int n = 0;
  double nu = 0.0;
  double residual = 0.0;
  double scale = 0.0;  // |xi||eta| at the root
  double asymptotic_prediction = 0.0;
  double gap() const { return nu - asymptotic_prediction; }
};

using SpecFamily = std::function<HilbertSystemSpec(double nu)>;

// asymptotic root k of the residual for data X0, b_alpha
double phase_law_root(const HilbertSystemSpec& spec, int k);

// roots with predictions inside [lo, hi]; throws when fewer than `count` are bracketed
std::vector<NuRoot> find_nu_roots(const SpecFamily& family, double lo, double hi, int count);

struct Deviation {
  double p_sup = 0.0;  // max over +/- of sup |p - 1|
  double q_sup = 0.0;  // max over +/- of sup |q - t|
  double q_rel = 0.0;  // max over +/- of sup |q - t|/t
};

// sup over a fixed set of t in [0.5, 4]
Deviation deviation_metrics(const HilbertSystemSpec& spec, const PqSolution& sol);

void write_roots_csv(const std::vector<NuRoot>& roots, std::ostream& os);

}  // namespace fracspec
