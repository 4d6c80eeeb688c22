#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fracspec/kernels.hpp"
#include "fracspec/spectra.hpp"

namespace fracspec {

struct PathSample {
  std::vector<double> grid;
  std::vector<double> values;
  std::uint64_t seed = 0;
  int n_terms = 0;
};

// standard normal variate number `n` of stream `seed`; pure function of (seed, n)
double kl_normal(std::uint64_t seed, std::uint64_t n);

// sqrt(lambda_n) phi_n(t_i) tabulated once, reused across seeds
class KlBasis {
 public:
  KlBasis(const std::vector<EigenPair>& pairs, int n_terms, const std::vector<double>& grid);
  KlBasis(const std::vector<AsymptoticEigenpair>& pairs, int n_terms, const std::vector<double>& grid);

  PathSample sample(std::uint64_t seed) const;
  int n_terms() const { return static_cast<int>(basis_.cols()); }
  const std::vector<double>& grid() const { return grid_; }
  // truncated covariance sum_{n<=N} lambda_n phi_n(s) phi_n(t) on the grid
  Eigen::MatrixXd truncated_covariance() const { return basis_ * basis_.transpose(); }

 private:
  std::vector<double> grid_;
  Eigen::MatrixXd basis_;
};

PathSample kl_sample(const std::vector<EigenPair>& pairs, int n_terms, const std::vector<double>& grid,
                     std::uint64_t seed);
PathSample kl_sample(const std::vector<AsymptoticEigenpair>& pairs, int n_terms, const std::vector<double>& grid,
                     std::uint64_t seed);

Eigen::MatrixXd empirical_cov(const std::vector<PathSample>& paths);

void write_path_csv(const PathSample& p, std::ostream& os);

}  // namespace fracspec
