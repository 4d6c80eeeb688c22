#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fracspec {

class HurstParam {
 public:
  explicit HurstParam(double h);

  double h() const { return h_; }
  bool is_long_memory() const { return h_ > 0.5; }
  bool is_semimartingale_mix() const { return h_ > 0.75; }

  // alpha = 2 - 2H
  double alpha() const { return 2.0 - 2.0 * h_; }
  double c_alpha() const;
  // Gamma(2H+1) sin(pi H)
  double kappa() const;
  // H(2H-1)
  double c_h() const { return h_ * (2.0 * h_ - 1.0); }

 private:
  double h_;
};

double kappa(double h);

// Cell mesh on [0, T]. Eigenfunctions and solutions are stored as cell values.
struct Mesh {
  std::vector<double> nodes;

  static Mesh uniform(int n, double T = 1.0);
  // symmetric power grading, nodes cluster like s^q at both ends
  static Mesh graded(int n, double q, double T = 1.0);

  int cells() const { return static_cast<int>(nodes.size()) - 1; }
  double width(int i) const { return nodes[i + 1] - nodes[i]; }
  double mid(int i) const { return 0.5 * (nodes[i] + nodes[i + 1]); }
  double length() const { return nodes.back() - nodes.front(); }
  bool is_uniform() const;
};

struct EigenPair {
  int index = 0;
  double lam = 0.0;
  std::optional<double> nu;
  std::vector<double> phi;  // cell midpoint values
  std::shared_ptr<const Mesh> mesh;
  // estimated discretization error of lam (lam - exact), when known
  std::optional<double> err;

  // linear interpolation between midpoints, linear extrapolation at the ends
  double eval(double t) const;
  double l2_norm() const;
  double inner_one() const;  // integral of phi over the mesh
};

enum class KernelKind { FbmCovariance, FracNoise, BrownianCovariance, MixedFbm };

struct KernelSpec {
  KernelKind kind;
  HurstParam h;
  double sigma = 1.0;
  double eps = 0.0;

  static KernelSpec fbm(double h, double sigma = 1.0);
  static KernelSpec frac_noise(double h, double sigma = 1.0);
  static KernelSpec brownian();
  static KernelSpec mixed(double h, double eps, double sigma = 1.0);

  void validate() const;
  // pointwise kernel value; the white-noise part of MixedFbm is a delta and is not sampled
  double operator()(double s, double t) const;
  std::string name() const;
};

double fbm_cov(const HurstParam& h, double s, double t);
double frac_noise_kernel(const HurstParam& h, double s, double t);
EigenPair scale_eigenpair(double T, const EigenPair& pair, const HurstParam& h);
double ou_spectral_density(double theta, double lam);
double mixed_spectral_density(const HurstParam& h, double sigma, double eps, double lam);

}  // namespace fracspec
