#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace spca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Enumeration/size guard violations. The CLI maps these to exit code 2.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Eigensolver failed to converge; carries the achieved reconstruction
// residual for diagnostics.
struct EigError : std::runtime_error {
  double residual;
  EigError(const std::string& what, double res)
      : std::runtime_error(what), residual(res) {}
};

struct SpectralDecomp {
  Vector eigenvalues;   // sorted descending
  Matrix eigenvectors;  // column i pairs with eigenvalues[i]; orthonormal
};

struct PsdReport {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

double max_abs(const Eigen::Ref<const Matrix>& a);

bool is_symmetric(const Eigen::Ref<const Matrix>& a, double tol);

// Exactly symmetric copy: averages a with its transpose and mirrors the
// upper triangle so a(i,j) == a(j,i) bitwise.
Matrix symmetrized(const Eigen::Ref<const Matrix>& a);

void require_symmetric(const Eigen::Ref<const Matrix>& a, double tol = 1e-12);

// Default PSD tolerance, scaled for conditioning.
inline double psd_tolerance(const Eigen::Ref<const Matrix>& a) {
  return 1e-9 * (1.0 + max_abs(a));
}

// Full spectral decomposition of a symmetric matrix, eigenvalues descending.
// Deterministic for fixed input; eigenvector signs are canonicalized so the
// largest-magnitude component of each column is positive.
SpectralDecomp eig_sym(const Eigen::Ref<const Matrix>& a);

// Continuous-time walk matrix exp(-t(I - G)) for a symmetric doubly
// stochastic G, computed spectrally so the result is symmetric and PSD by
// construction. Rejects inputs whose row sums deviate from 1.
Matrix expm_walk(const Eigen::Ref<const Matrix>& g, double t);

PsdReport is_psd(const Eigen::Ref<const Matrix>& a, double tol);

// x^T a x.
double quad_form(const Eigen::Ref<const Matrix>& a,
                 const Eigen::Ref<const Vector>& x);

// Text format: line 1 is n, then n lines of n space-separated decimals.
// Symmetry is validated on load (tolerance 1e-12); near-symmetric input is
// symmetrized by averaging, anything worse is rejected.
Matrix parse_matrix(std::istream& in);
Matrix load_matrix(const std::string& path);
void write_matrix(std::ostream& out, const Eigen::Ref<const Matrix>& a);
void save_matrix(const std::string& path, const Eigen::Ref<const Matrix>& a);

}  // namespace spca
