#include "fracspec/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracspec/errors.hpp"

namespace fracspec {

HurstParam::HurstParam(double h) : h_(h) {
  if (!(h > 0.0 && h < 1.0)) {
    std::ostringstream os;
    os << "Hurst exponent must lie in (0,1), got " << h;
    throw DomainError(os.str());
  }
}

double HurstParam::c_alpha() const {
  const double a = alpha();
  return (1.0 - a / 2.0) * (1.0 - a);
}

double kappa(double h) { return std::tgamma(2.0 * h + 1.0) * std::sin(std::numbers::pi * h); }

double HurstParam::kappa() const { return fracspec::kappa(h_); }

Mesh Mesh::uniform(int n, double T) {
  if (n < 1) throw DomainError("mesh needs at least one cell");
  Mesh m;
  m.nodes.resize(n + 1);
  for (int i = 0; i <= n; ++i) m.nodes[i] = T * static_cast<double>(i) / n;
  m.nodes[n] = T;
  return m;
}

Mesh Mesh::graded(int n, double q, double T) {
  if (n < 2 || n % 2 != 0) throw DomainError("graded mesh needs an even cell count");
  if (q < 1.0) throw DomainError("grading exponent must be >= 1");
  const int m = n / 2;
  Mesh out;
  out.nodes.resize(n + 1);
  for (int i = 0; i <= m; ++i) {
    double s = static_cast<double>(i) / m;
    double left = 0.5 * std::pow(s, q);
    out.nodes[i] = T * left;
    out.nodes[n - i] = T * (1.0 - left);
  }
  out.nodes[m] = 0.5 * T;
  return out;
}

bool Mesh::is_uniform() const {
  const int n = cells();
  const double w = length() / n;
  for (int i = 0; i < n; ++i)
    if (std::abs(width(i) - w) > 1e-12 * w) return false;
  return true;
}

double EigenPair::eval(double t) const {
  if (!mesh || phi.empty()) throw DomainError("eigenpair has no mesh");
  const auto& m = *mesh;
  const int n = m.cells();
  if (n == 1) return phi[0];
  // locate the pair of midpoints bracketing t
  int lo = 0;
  if (t <= m.mid(0)) {
    lo = 0;
  } else if (t >= m.mid(n - 1)) {
    lo = n - 2;
  } else {
    auto it = std::upper_bound(m.nodes.begin(), m.nodes.end(), t);
    int cell = static_cast<int>(it - m.nodes.begin()) - 1;
    cell = std::clamp(cell, 0, n - 1);
    lo = (t >= m.mid(cell)) ? cell : cell - 1;
    lo = std::clamp(lo, 0, n - 2);
  }
  const double x0 = m.mid(lo), x1 = m.mid(lo + 1);
  const double w = (t - x0) / (x1 - x0);
  return (1.0 - w) * phi[lo] + w * phi[lo + 1];
}

double EigenPair::l2_norm() const {
  if (!mesh) throw DomainError("eigenpair has no mesh");
  double s = 0.0;
  for (int i = 0; i < mesh->cells(); ++i) s += mesh->width(i) * phi[i] * phi[i];
  return std::sqrt(s);
}

double EigenPair::inner_one() const {
  if (!mesh) throw DomainError("eigenpair has no mesh");
  double s = 0.0;
  for (int i = 0; i < mesh->cells(); ++i) s += mesh->width(i) * phi[i];
  return s;
}

KernelSpec KernelSpec::fbm(double h, double sigma) {
  KernelSpec k{KernelKind::FbmCovariance, HurstParam(h), sigma, 0.0};
  k.validate();
  return k;
}

KernelSpec KernelSpec::frac_noise(double h, double sigma) {
  KernelSpec k{KernelKind::FracNoise, HurstParam(h), sigma, 0.0};
  k.validate();
  return k;
}

KernelSpec KernelSpec::brownian() { return KernelSpec{KernelKind::BrownianCovariance, HurstParam(0.5), 1.0, 0.0}; }

KernelSpec KernelSpec::mixed(double h, double eps, double sigma) {
  KernelSpec k{KernelKind::MixedFbm, HurstParam(h), sigma, eps};
  k.validate();
  return k;
}

void KernelSpec::validate() const {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (!(eps >= 0.0)) throw DomainError("eps must be nonnegative");
  if ((kind == KernelKind::FracNoise || kind == KernelKind::MixedFbm) && !h.is_long_memory())
    throw RegimeError("fractional noise kernel needs H > 1/2");
  if (kind == KernelKind::BrownianCovariance && h.h() != 0.5)
    throw DomainError("Brownian kernel has H = 1/2");
}

double KernelSpec::operator()(double s, double t) const {
  const double s2 = sigma * sigma;
  switch (kind) {
    case KernelKind::FbmCovariance:
    case KernelKind::BrownianCovariance:
      return s2 * fbm_cov(h, s, t);
    case KernelKind::FracNoise:
    case KernelKind::MixedFbm:
      return s2 * frac_noise_kernel(h, s, t);
  }
  return 0.0;
}

std::string KernelSpec::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case KernelKind::FbmCovariance: os << "fbm"; break;
    case KernelKind::FracNoise: os << "fracnoise"; break;
    case KernelKind::BrownianCovariance: os << "brownian"; break;
    case KernelKind::MixedFbm: os << "mixed"; break;
  }
  os << ":h=" << h.h() << ":sigma=" << sigma << ":eps=" << eps;
  return os.str();
}

double fbm_cov(const HurstParam& h, double s, double t) {
  if (s < 0.0 || t < 0.0) throw DomainError("fbm_cov needs nonnegative times");
  const double e = 2.0 * h.h();
  return 0.5 * (std::pow(t, e) + std::pow(s, e) - std::pow(std::abs(t - s), e));
}

double frac_noise_kernel(const HurstParam& h, double s, double t) {
  if (!h.is_long_memory()) throw RegimeError("fractional noise kernel needs H > 1/2");
  const double d = std::abs(s - t);
  if (d < 1e-14) throw SingularityError("fractional noise kernel is singular on the diagonal");
  return h.c_h() * std::pow(d, 2.0 * h.h() - 2.0);
}

EigenPair scale_eigenpair(double T, const EigenPair& pair, const HurstParam& h) {
  if (!(T > 0.0)) throw DomainError("horizon must be positive");
  if (!pair.mesh) throw DomainError("eigenpair has no mesh");
  EigenPair out = pair;
  out.lam = std::pow(T, 2.0 * h.h() + 1.0) * pair.lam;
  if (pair.nu) out.nu = *pair.nu / T;
  if (pair.err) out.err = std::pow(T, 2.0 * h.h() + 1.0) * *pair.err;
  auto m = std::make_shared<Mesh>(*pair.mesh);
  for (auto& x : m->nodes) x *= T;
  out.mesh = m;
  const double f = 1.0 / std::sqrt(T);
  for (auto& v : out.phi) v *= f;
  return out;
}

double ou_spectral_density(double theta, double lam) {
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  return 1.0 / (lam * lam + theta * theta);
}

double mixed_spectral_density(const HurstParam& h, double sigma, double eps, double lam) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (eps < 0.0) throw DomainError("eps must be nonnegative");
  const double e = 1.0 - 2.0 * h.h();
  if (lam == 0.0) {
    if (e < 0.0) throw SingularityError("spectral density is singular at zero frequency");
    if (e == 0.0) return eps + sigma * sigma * h.kappa();
    return eps;
  }
  return eps + sigma * sigma * h.kappa() * std::pow(std::abs(lam), e);
}

}  // namespace fracspec
