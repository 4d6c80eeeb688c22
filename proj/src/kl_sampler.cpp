#include "fracspec/kl_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "fracspec/errors.hpp"

namespace fracspec {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("empty time grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("time grid must be strictly increasing");
}

}  // namespace

double kl_normal(std::uint64_t seed, std::uint64_t n) {
  std::mt19937_64 gen(splitmix(splitmix(seed) ^ n));
  std::normal_distribution<double> nd(0.0, 1.0);
  return nd(gen);
}

KlBasis::KlBasis(const std::vector<EigenPair>& pairs, int n_terms, const std::vector<double>& grid) : grid_(grid) {
  check_grid(grid);
  if (n_terms < 1 || n_terms > static_cast<int>(pairs.size())) throw DomainError("insufficient eigenpairs for n_terms");
  basis_.resize(grid.size(), n_terms);
  for (int k = 0; k < n_terms; ++k) {
    const double s = std::sqrt(std::max(pairs[k].lam, 0.0));
    for (std::size_t i = 0; i < grid.size(); ++i) basis_(i, k) = s * pairs[k].eval(grid[i]);
  }
}

KlBasis::KlBasis(const std::vector<AsymptoticEigenpair>& pairs, int n_terms, const std::vector<double>& grid)
    : grid_(grid) {
  check_grid(grid);
  if (n_terms < 1 || n_terms > static_cast<int>(pairs.size())) throw DomainError("insufficient eigenpairs for n_terms");
  basis_.resize(grid.size(), n_terms);
  for (int k = 0; k < n_terms; ++k) {
    const double s = std::sqrt(pairs[k].lam_n);
    for (std::size_t i = 0; i < grid.size(); ++i) basis_(i, k) = s * pairs[k].phi(grid[i]);
  }
}

PathSample KlBasis::sample(std::uint64_t seed) const {
  const int N = n_terms();
  Eigen::VectorXd z(N);
  for (int k = 0; k < N; ++k) z(k) = kl_normal(seed, static_cast<std::uint64_t>(k));
  Eigen::VectorXd v = basis_ * z;
  PathSample p;
  p.grid = grid_;
  p.values.assign(v.data(), v.data() + v.size());
  p.seed = seed;
  p.n_terms = N;
  return p;
}

PathSample kl_sample(const std::vector<EigenPair>& pairs, int n_terms, const std::vector<double>& grid,
                     std::uint64_t seed) {
  return KlBasis(pairs, n_terms, grid).sample(seed);
}

PathSample kl_sample(const std::vector<AsymptoticEigenpair>& pairs, int n_terms, const std::vector<double>& grid,
                     std::uint64_t seed) {
  return KlBasis(pairs, n_terms, grid).sample(seed);
}

Eigen::MatrixXd empirical_cov(const std::vector<PathSample>& paths) {
  if (paths.size() < 2) throw DomainError("empirical covariance needs at least two paths");
  const std::size_t m = paths[0].grid.size();
  for (const auto& p : paths)
    if (p.grid != paths[0].grid || p.values.size() != m) throw DomainError("paths do not share a common grid");
  const int n = static_cast<int>(paths.size());
  Eigen::MatrixXd X(n, m);
  for (int r = 0; r < n; ++r)
    for (std::size_t c = 0; c < m; ++c) X(r, c) = paths[r].values[c];
  Eigen::RowVectorXd mean = X.colwise().mean();
  Eigen::MatrixXd C = X.rowwise() - mean;
  return (C.transpose() * C) / (n - 1.0);
}

void write_path_csv(const PathSample& p, std::ostream& os) {
  os << "# seed=" << p.seed << " n_terms=" << p.n_terms << "\n";
  os << "t,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < p.grid.size(); ++i) os << p.grid[i] << ',' << p.values[i] << '\n';
}

}  // namespace fracspec
