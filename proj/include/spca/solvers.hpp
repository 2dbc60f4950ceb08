#pragma once

#include <cstdint>
#include <vector>

#include "spca/linalg.hpp"

namespace spca {

// Default cap on C(n,k) * k^3 for support enumeration. Overridable per call,
// via the CLI --budget flag, or the SPCA_BUDGET environment variable.
inline constexpr double kDefaultExactBudget = 1e9;

// Default cap on epsilon-net size; the sampling fallback uses the same
// budget as its sample count.
inline constexpr double kDefaultNetBudget = 1e7;

// A unit-norm vector with at most k nonzeros plus its objective value.
struct SparseSolution {
  std::vector<Index> support;  // ascending indices of nonzero coordinates
  Vector coefficients;         // aligned with support; unit l2 norm overall
  double value = 0.0;

  Vector dense(Index n) const;
};

// Low-rank factor B such that B^T B approximates the input entrywise.
struct SketchMatrix {
  Index jl_dim = 0;        // number of gaussian projection rows
  Matrix factor;           // jl_dim x n
  double deviation = 0.0;  // achieved max entrywise |A - B^T B|
};

// Randomized sketch failed to reach the requested deviation after retries.
struct SketchError : std::runtime_error {
  double achieved;
  SketchError(const std::string& what, double dev)
      : std::runtime_error(what), achieved(dev) {}
};

// Keeps the k largest-magnitude entries of v (ties broken by lower index),
// zeroes the rest and rescales to unit norm. Signs are preserved.
Vector truncate_to_sparse(const Eigen::Ref<const Vector>& v, Index k);

// Builds a SparseSolution from a dense candidate, evaluating against a.
SparseSolution make_solution(const Eigen::Ref<const Matrix>& a,
                             const Eigen::Ref<const Vector>& x);

// Exact optimum by support enumeration: for each size-k support the best
// unit vector is the top eigenvector of the principal submatrix. Ties across
// supports resolve to the lexicographically smallest support.
SparseSolution solve_exact(const Eigen::Ref<const Matrix>& a, Index k,
                           double budget = kDefaultExactBudget);

// Best truncated column of a, also considering every standard basis vector.
// For PSD input the value is at least OPT / sqrt(k).
SparseSolution best_column_truncation(const Eigen::Ref<const Matrix>& a,
                                      Index k);

// Truncation of the top eigenvector. For PSD input the value is at least
// (k/n) * lambda_1 >= (k/n) * OPT.
SparseSolution top_eigenvector_truncation(const Eigen::Ref<const Matrix>& a,
                                          Index k);

// Best of the two procedures above; for PSD input the value is at least
// OPT / n^(1/3).
SparseSolution solve_approx(const Eigen::Ref<const Matrix>& a, Index k);

// Gaussian sketch B = P A^(1/2) with P of shape d x n, d = ceil(8 ln n /
// eps^2), entry variance 1/d. Requires PSD a with entries in [-1, 1].
// Retries up to 10 derived seeds until the entrywise deviation is <= eps,
// otherwise throws SketchError carrying the best deviation achieved.
SketchMatrix jl_sketch(const Eigen::Ref<const Matrix>& a, double eps,
                       std::uint64_t seed);

// Scans directions c on the unit sphere of the sketch's row space, truncates
// the score vector B^T c to the top k entries and returns the best candidate
// evaluated against B^T B. Uses a deterministic spherical grid when the
// effective rank is <= 3 and the net fits the budget, otherwise uniform
// random sampling with the same budget.
SparseSolution eps_net_search(const SketchMatrix& b, Index k, double eps,
                              std::uint64_t seed = 0,
                              double net_budget = kDefaultNetBudget,
                              bool allow_sampling = true);

// Sketch with eps/3, net-search with eps/3, evaluate the winner against the
// original matrix. For PSD a with entries in [-1,1] the result is within an
// additive eps*k of the optimum when sketch and net both succeed.
SparseSolution solve_additive_ptas(const Eigen::Ref<const Matrix>& a, Index k,
                                   double eps, std::uint64_t seed,
                                   double net_budget = kDefaultNetBudget);

// C(n,k) in double precision (saturates instead of overflowing).
double binomial(Index n, Index k);

}  // namespace spca
