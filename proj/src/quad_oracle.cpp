#include "fracspec/quad_oracle.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fracspec/errors.hpp"

namespace fracspec {

namespace {

// antiderivative of order two of |x|^g
inline double G2(double g, double x) {
  return std::pow(std::abs(x), g + 2.0) / ((g + 1.0) * (g + 2.0));
}

const double kGL3x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
const double kGL3w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t cache_key(const KernelSpec& k, const Mesh& m) {
  std::string name = k.name();
  std::uint64_t h = fnv1a(name.data(), name.size());
  return fnv1a(m.nodes.data(), m.nodes.size() * sizeof(double), h);
}

std::filesystem::path cache_path(const KernelSpec& k, const Mesh& m) {
  const char* dir = std::getenv("FRACSPEC_CACHE");
  if (!dir || !*dir) return {};
  std::ostringstream os;
  os << "galerkin_" << std::hex << std::setw(16) << std::setfill('0') << cache_key(k, m) << ".bin";
  return std::filesystem::path(dir) / os.str();
}

bool load_cached(const std::filesystem::path& p, int n, Eigen::MatrixXd& out) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return false;
  std::int64_t stored = 0;
  in.read(reinterpret_cast<char*>(&stored), sizeof(stored));
  if (!in || stored != n) return false;
  out.resize(n, n);
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(sizeof(double)) * n * n);
  return static_cast<bool>(in);
}

void store_cached(const std::filesystem::path& p, const Eigen::MatrixXd& m) {
  std::error_code ec;
  std::filesystem::create_directories(p.parent_path(), ec);
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) return;
    std::int64_t n = m.rows();
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(double)) * n * n);
  }
  std::filesystem::rename(tmp, p, ec);
}

void fix_sign(std::vector<double>& phi) {
  double mx = 0.0;
  for (double v : phi) mx = std::max(mx, std::abs(v));
  for (double v : phi) {
    if (std::abs(v) > 1e-12 * mx) {
      if (v < 0.0)
        for (auto& x : phi) x = -x;
      return;
    }
  }
}

std::vector<EigenPair> eigen_impl(const GalerkinMatrix& m, int count, int check) {
  const int n = m.n();
  if (n < 1) throw DomainError("empty matrix");
  if (count < 1 || count > n) throw DomainError("requested eigenpair count out of range");
  const double asym = (m.entries - m.entries.transpose()).cwiseAbs().maxCoeff();
  const double scale = m.entries.cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1e-300)) throw DomainError("matrix is not symmetric");

  Eigen::MatrixXd a = m.entries;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, count);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(std::max(1, count)));
  lapack_int found = 0;
  const char range = (count == n) ? 'A' : 'I';
  lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', range, 'U', n, a.data(), n, 0.0, 0.0,
                                   n - count + 1, n, 0.0, &found, w.data(), z.data(), n, isuppz.data());
  if (info != 0 || found != count) {
    std::ostringstream os;
    os << "symmetric eigensolver failed (info=" << info << ")";
    throw NumericalError(os.str());
  }

  const Mesh& mesh = *m.mesh;
  double norm = 0.0;
  for (int k = 0; k < count; ++k) norm = std::max(norm, std::abs(w(k)));
  const int nc = std::min(check, count);
  if (nc > 0) {
    Eigen::MatrixXd zc = z.rightCols(nc);
    Eigen::MatrixXd r = m.entries * zc - zc * w.head(count).tail(nc).asDiagonal();
    for (int k = 0; k < nc; ++k) {
      if (r.col(k).norm() > 1e-10 * std::max(norm, 1e-300))
        throw NumericalError("eigenpair residual above tolerance");
    }
  }

  std::vector<EigenPair> out(count);
  for (int k = 0; k < count; ++k) {
    const int col = count - 1 - k;
    EigenPair& p = out[k];
    p.index = k + 1;
    p.lam = w(col);
    p.phi.resize(n);
    for (int i = 0; i < n; ++i) p.phi[i] = z(i, col) / std::sqrt(mesh.width(i));
    fix_sign(p.phi);
    p.mesh = m.mesh;
  }
  return out;
}

}  // namespace

double power_cell_pair(double g, double a, double b, double c, double d) {
  const double wa = b - a, wb = d - c;
  const double dc = 0.5 * (a + b) - 0.5 * (c + d);
  if (wa * wb < 1e-4 * dc * dc) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double x = 0.5 * (a + b) + 0.5 * wa * kGL3x[i];
      for (int j = 0; j < 3; ++j) {
        const double y = 0.5 * (c + d) + 0.5 * wb * kGL3x[j];
        s += kGL3w[i] * kGL3w[j] * std::pow(std::abs(x - y), g);
      }
    }
    return 0.25 * wa * wb * s;
  }
  return G2(g, b - c) - G2(g, a - c) - G2(g, b - d) + G2(g, a - d);
}

Eigen::MatrixXd assemble_cell_integrals(const KernelSpec& kernel, const Mesh& mesh) {
  kernel.validate();
  const int n = mesh.cells();
  const double H = kernel.h.h();
  const double s2 = kernel.sigma * kernel.sigma;
  const bool cov = kernel.kind == KernelKind::FbmCovariance || kernel.kind == KernelKind::BrownianCovariance;
  const double g = cov ? 2.0 * H : 2.0 * H - 2.0;
  const double coef = cov ? -0.5 * s2 : s2 * kernel.h.c_h();

  Eigen::MatrixXd B(n, n);
  if (mesh.is_uniform()) {
    const double w = mesh.length() / n;
    std::vector<double> band(n);
    for (int k = 0; k < n; ++k) band[k] = power_cell_pair(g, 0.0, w, k * w, (k + 1) * w);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) B(i, j) = coef * band[std::abs(i - j)];
  } else {
    for (int j = 0; j < n; ++j) {
      for (int i = j; i < n; ++i) {
        double v = coef * power_cell_pair(g, mesh.nodes[i], mesh.nodes[i + 1], mesh.nodes[j], mesh.nodes[j + 1]);
        B(i, j) = v;
        B(j, i) = v;
      }
    }
  }

  if (cov) {
    const double e = 2.0 * H + 1.0;
    std::vector<double> P(n);
    for (int i = 0; i < n; ++i) P[i] = (std::pow(mesh.nodes[i + 1], e) - std::pow(mesh.nodes[i], e)) / e;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) B(i, j) += 0.5 * s2 * (mesh.width(j) * P[i] + mesh.width(i) * P[j]);
  }
  if (kernel.kind == KernelKind::MixedFbm)
    for (int i = 0; i < n; ++i) B(i, i) += kernel.eps * mesh.width(i);
  return B;
}

GalerkinMatrix assemble_galerkin(const KernelSpec& kernel, int n, const AssemblyOptions& opt) {
  if (n < 2) throw DomainError("Galerkin assembly needs at least two cells");
  if (n > opt.max_cells) throw ConfigError("cell count exceeds the configured memory cap");
  return assemble_galerkin(kernel, std::make_shared<const Mesh>(Mesh::uniform(n)), opt);
}

GalerkinMatrix assemble_galerkin(const KernelSpec& kernel, std::shared_ptr<const Mesh> mesh,
                                 const AssemblyOptions& opt) {
  if (!mesh) throw DomainError("null mesh");
  const int n = mesh->cells();
  if (n < 2) throw DomainError("Galerkin assembly needs at least two cells");
  if (n > opt.max_cells) throw ConfigError("cell count exceeds the configured memory cap");
  kernel.validate();

  GalerkinMatrix m{mesh, Eigen::MatrixXd(), kernel};
  std::filesystem::path cp;
  if (opt.use_cache) cp = cache_path(kernel, *mesh);
  if (!cp.empty() && load_cached(cp, n, m.entries)) return m;

  Eigen::MatrixXd B = assemble_cell_integrals(kernel, *mesh);
  Eigen::VectorXd isw(n);
  for (int i = 0; i < n; ++i) isw(i) = 1.0 / std::sqrt(mesh->width(i));
  m.entries = isw.asDiagonal() * B * isw.asDiagonal();
  // exact symmetry
  m.entries = 0.5 * (m.entries + m.entries.transpose()).eval();
  if (!cp.empty()) store_cached(cp, m.entries);
  return m;
}

std::vector<EigenPair> sym_eigen(const GalerkinMatrix& m) { return eigen_impl(m, m.n(), 64); }

std::vector<EigenPair> sym_eigen_top(const GalerkinMatrix& m, int count) { return eigen_impl(m, count, count); }

std::vector<EigenPair> oracle_eigenpairs(const KernelSpec& kernel, int n, int count, const OracleOptions& opt) {
  if (count < 1) throw DomainError("count must be positive");
  if (count > n / 10) throw DomainError("count exceeds n/10; only resolved modes are returned");
  auto make_mesh = [&](int cells) {
    if (opt.grading == 1.0) return std::make_shared<const Mesh>(Mesh::uniform(cells));
    return std::make_shared<const Mesh>(Mesh::graded(cells, opt.grading));
  };
  if (n > opt.assembly.max_cells) throw ConfigError("cell count exceeds the configured memory cap");
  auto pairs = sym_eigen_top(assemble_galerkin(kernel, make_mesh(n), opt.assembly), count);
  if (opt.richardson) {
    int half = n / 2;
    if (opt.grading != 1.0 && half % 2 != 0) half += 1;
    auto coarse = sym_eigen_top(assemble_galerkin(kernel, make_mesh(half), opt.assembly), count);
    for (int k = 0; k < count; ++k) pairs[k].err = (coarse[k].lam - pairs[k].lam) / 3.0;
  }
  return pairs;
}

FirstKindSolution solve_first_kind(const HurstParam& h, int n, double rcond_min) {
  if (!h.is_long_memory()) throw RegimeError("first-kind solve needs H > 1/2");
  if (n < 40) throw DomainError("first-kind solve needs at least 40 cells");
  auto mesh = std::make_shared<const Mesh>(Mesh::uniform(n));
  Eigen::MatrixXd B = assemble_cell_integrals(KernelSpec::frac_noise(h.h()), *mesh);
  const double w = 1.0 / n;
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) throw NumericalError("first-kind matrix is not positive definite");
  const double rc = llt.rcond();
  if (rc < rcond_min) {
    std::ostringstream os;
    os << "first-kind system ill-conditioned, reciprocal condition estimate " << rc;
    throw NumericalError(os.str());
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n, w);
  Eigen::VectorXd u = llt.solve(rhs);

  FirstKindSolution s;
  s.mesh = mesh;
  s.u.assign(u.data(), u.data() + n);
  s.rcond = rc;

  Eigen::VectorXd r = (B * u) / w - Eigen::VectorXd::Ones(n);
  const double p = 0.5 - h.h();
  double num = 0.0, den = 0.0, res = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = mesh->mid(i);
    if (x < 0.2 || x > 0.8) continue;
    const double f = std::pow(x * (1.0 - x), p);
    num += u(i) * f;
    den += f * f;
    res = std::max(res, std::abs(r(i)));
  }
  s.a_h = num / den;
  s.interior_residual = res;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int cnt = 0;
  for (int i = 0; i < n; ++i) {
    const double x = mesh->mid(i);
    if (x < 10.0 * w || x > 0.05) continue;
    const double lx = std::log(x), ly = std::log(u(i));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt < 3) throw NumericalError("too few cells for the edge exponent fit");
  s.edge_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return s;
}

void write_galerkin_csv(const GalerkinMatrix& m, std::ostream& os) {
  os << "# kernel=" << m.kernel.name() << " n=" << m.n() << "\n";
  os << std::setprecision(17);
  for (int i = 0; i < m.n(); ++i) {
    for (int j = 0; j < m.n(); ++j) {
      if (j) os << ',';
      os << m.entries(i, j);
    }
    os << '\n';
  }
}

void write_spectrum_csv(const std::vector<EigenPair>& pairs, const KernelSpec& kernel, std::ostream& os) {
  os << "# kernel=" << kernel.name() << "\n";
  os << "index,lambda,err_estimate\n" << std::setprecision(17);
  for (const auto& p : pairs) os << p.index << ',' << p.lam << ',' << (p.err ? *p.err : 0.0) << '\n';
}

}  // namespace fracspec
