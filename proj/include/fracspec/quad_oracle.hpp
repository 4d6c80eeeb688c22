#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <vector>

#include "fracspec/kernels.hpp"

namespace fracspec {

struct AssemblyOptions {
  int max_cells = 8192;
  bool use_cache = true;  // honours FRACSPEC_CACHE when set
};

// Operator matrix W^{-1/2} B W^{-1/2}, where B holds the cell-pair double integrals of the
// kernel and W the cell widths. On a uniform mesh this is n * B.
struct GalerkinMatrix {
  std::shared_ptr<const Mesh> mesh;
  Eigen::MatrixXd entries;
  KernelSpec kernel;

  int n() const { return static_cast<int>(entries.rows()); }
  double cell_width() const { return mesh->length() / n(); }
};

// closed-form double integral of |s-t|^g over [a,b]x[c,d], g > -1
double power_cell_pair(double g, double a, double b, double c, double d);
// cell-pair integrals B (not scaled by widths)
Eigen::MatrixXd assemble_cell_integrals(const KernelSpec& kernel, const Mesh& mesh);

GalerkinMatrix assemble_galerkin(const KernelSpec& kernel, int n, const AssemblyOptions& opt = {});
GalerkinMatrix assemble_galerkin(const KernelSpec& kernel, std::shared_ptr<const Mesh> mesh,
                                 const AssemblyOptions& opt = {});

// full spectrum, descending
std::vector<EigenPair> sym_eigen(const GalerkinMatrix& m);
// top `count` pairs only
std::vector<EigenPair> sym_eigen_top(const GalerkinMatrix& m, int count);

struct OracleOptions {
  bool richardson = true;  // attach error estimates from a solve at n/2
  double grading = 1.0;    // 1 = uniform mesh
  AssemblyOptions assembly;
};

std::vector<EigenPair> oracle_eigenpairs(const KernelSpec& kernel, int n, int count,
                                         const OracleOptions& opt = {});

struct FirstKindSolution {
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> u;
  double a_h = 0.0;            // fitted constant of u ~ a (x(1-x))^{1/2-H}
  double edge_exponent = 0.0;  // fitted log-log slope near x = 0
  double interior_residual = 0.0;
  double rcond = 0.0;
};

FirstKindSolution solve_first_kind(const HurstParam& h, int n, double rcond_min = 1e-14);

void write_galerkin_csv(const GalerkinMatrix& m, std::ostream& os);
void write_spectrum_csv(const std::vector<EigenPair>& pairs, const KernelSpec& kernel, std::ostream& os);

}  // namespace fracspec
