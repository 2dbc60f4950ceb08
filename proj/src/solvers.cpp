#include "spca/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spca/rng.hpp"

namespace spca {

Vector SparseSolution::dense(Index n) const {
  Vector x = Vector::Zero(n);
  for (std::size_t i = 0; i < support.size(); ++i)
    x[support[i]] = coefficients[static_cast<Index>(i)];
  return x;
}

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) {
    r *= static_cast<double>(n - k + i) / static_cast<double>(i);
    if (r > 1e300) return 1e300;
  }
  return r;
}

Vector truncate_to_sparse(const Eigen::Ref<const Vector>& v, Index k) {
  const Index n = v.size();
  if (k < 1 || k > n)
    throw std::invalid_argument("truncate_to_sparse: k must be in [1, n]");
  if (v.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("truncate_to_sparse: input is all-zero");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(v[a]) > std::abs(v[b]);
  });
  Vector out = Vector::Zero(n);
  for (Index i = 0; i < k; ++i) out[order[static_cast<std::size_t>(i)]] = v[order[static_cast<std::size_t>(i)]];
  out /= out.norm();
  return out;
}

SparseSolution make_solution(const Eigen::Ref<const Matrix>& a,
                             const Eigen::Ref<const Vector>& x) {
  SparseSolution s;
  for (Index i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) s.support.push_back(i);
  s.coefficients.resize(static_cast<Index>(s.support.size()));
  for (std::size_t i = 0; i < s.support.size(); ++i)
    s.coefficients[static_cast<Index>(i)] = x[s.support[i]];
  s.value = quad_form(a, x);
  return s;
}

namespace {

// Largest eigenpair of a small symmetric matrix.
void top_eigenpair(const Matrix& sub, double& val, Vector& vec) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sub);
  const Index last = sub.rows() - 1;
  val = es.eigenvalues()[last];
  vec = es.eigenvectors().col(last);
  // Canonical sign: largest-magnitude component positive.
  Index arg = 0;
  double best = -1.0;
  for (Index r = 0; r < vec.size(); ++r) {
    if (std::abs(vec[r]) > best) {
      best = std::abs(vec[r]);
      arg = r;
    }
  }
  if (vec[arg] < 0.0) vec = -vec;
}

bool next_combination(std::vector<Index>& c, Index n) {
  const Index k = static_cast<Index>(c.size());
  Index i = k - 1;
  while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++c[static_cast<std::size_t>(i)];
  for (Index j = i + 1; j < k; ++j)
    c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

}  // namespace

SparseSolution solve_exact(const Eigen::Ref<const Matrix>& a, Index k,
                           double budget) {
  require_symmetric(a, 1e-12 * (1.0 + max_abs(a)));
  const Index n = a.rows();
  if (k < 1 || k > n)
    throw std::invalid_argument("solve_exact: k must be in [1, n]");
  const double cost = binomial(n, k) * static_cast<double>(k) *
                      static_cast<double>(k) * static_cast<double>(k);
  if (cost > budget)
    throw BudgetError("solve_exact: C(n,k)*k^3 = " + std::to_string(cost) +
                      " exceeds budget " + std::to_string(budget) +
                      " (raise with --budget or SPCA_BUDGET)");

  std::vector<Index> comb(static_cast<std::size_t>(k));
  std::iota(comb.begin(), comb.end(), Index{0});
  Matrix sub(k, k);
  Vector vec;
  double best_val = -std::numeric_limits<double>::infinity();
  std::vector<Index> best_support;
  Vector best_vec;
  do {
    for (Index i = 0; i < k; ++i)
      for (Index j = 0; j < k; ++j)
        sub(i, j) = a(comb[static_cast<std::size_t>(i)],
                      comb[static_cast<std::size_t>(j)]);
    double val;
    top_eigenpair(sub, val, vec);
    if (val > best_val) {
      best_val = val;
      best_support = comb;
      best_vec = vec;
    }
  } while (next_combination(comb, n));

  SparseSolution s;
  s.support = best_support;
  s.coefficients = best_vec;
  s.value = best_val;
  return s;
}

SparseSolution best_column_truncation(const Eigen::Ref<const Matrix>& a,
                                      Index k) {
  require_symmetric(a, 1e-12 * (1.0 + max_abs(a)));
  const Index n = a.rows();
  if (k < 1 || k > n)
    throw std::invalid_argument("best_column_truncation: k must be in [1, n]");
  bool have = false;
  SparseSolution best;
  auto consider = [&](const Vector& x) {
    SparseSolution s = make_solution(a, x);
    if (!have || s.value > best.value) {
      best = std::move(s);
      have = true;
    }
  };
  for (Index i = 0; i < n; ++i) {
    if (a.col(i).cwiseAbs().maxCoeff() == 0.0) continue;  // zero column
    consider(truncate_to_sparse(a.col(i), k));
  }
  for (Index i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e[i] = 1.0;
    consider(e);
  }
  return best;
}

SparseSolution top_eigenvector_truncation(const Eigen::Ref<const Matrix>& a,
                                          Index k) {
  require_symmetric(a, 1e-12 * (1.0 + max_abs(a)));
  const Index n = a.rows();
  if (k < 1 || k > n)
    throw std::invalid_argument(
        "top_eigenvector_truncation: k must be in [1, n]");
  const SpectralDecomp d = eig_sym(a);
  return make_solution(a, truncate_to_sparse(d.eigenvectors.col(0), k));
}

SparseSolution solve_approx(const Eigen::Ref<const Matrix>& a, Index k) {
  SparseSolution s1 = best_column_truncation(a, k);
  SparseSolution s2 = top_eigenvector_truncation(a, k);
  // max(v1, v2) >= v1^(2/3) * v2^(1/3) whenever both are nonnegative; a
  // violation would mean the value bookkeeping is broken.
  if (s1.value >= 0.0 && s2.value >= 0.0) {
    const double geo = std::pow(s1.value, 2.0 / 3.0) * std::cbrt(s2.value);
    if (std::max(s1.value, s2.value) < geo - 1e-9 * (1.0 + geo))
      throw std::logic_error("solve_approx: combination identity violated");
  }
  return s1.value >= s2.value ? s1 : s2;
}

SketchMatrix jl_sketch(const Eigen::Ref<const Matrix>& a, double eps,
                       std::uint64_t seed) {
  require_symmetric(a, 1e-12 * (1.0 + max_abs(a)));
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("jl_sketch: eps must be in (0, 1)");
  if (max_abs(a) > 1.0 + 1e-12)
    throw std::invalid_argument("jl_sketch: entries must lie in [-1, 1]");
  const Index n = a.rows();
  const SpectralDecomp d = eig_sym(a);
  const double tol = psd_tolerance(a);
  Vector sq(n);
  for (Index i = 0; i < n; ++i) {
    const double ev = d.eigenvalues[i];
    if (ev < -tol)
      throw std::invalid_argument("jl_sketch: input is not PSD (eigenvalue " +
                                  std::to_string(ev) + ")");
    sq[i] = std::sqrt(std::max(ev, 0.0));
  }
  const Matrix root =
      symmetrized(d.eigenvectors * sq.asDiagonal() * d.eigenvectors.transpose());

  const Index dim = std::max<Index>(
      1, static_cast<Index>(
             std::ceil(8.0 * std::log(static_cast<double>(n)) / (eps * eps))));
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  double best_dev = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 10; ++attempt) {
    Rng rng = substream(seed, "jl", static_cast<std::uint64_t>(attempt));
    Matrix proj(dim, n);
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < n; ++j) proj(i, j) = scale * rng.gaussian();
    Matrix b = proj * root;
    const double dev = (b.transpose() * b - a).cwiseAbs().maxCoeff();
    best_dev = std::min(best_dev, dev);
    if (dev <= eps) return SketchMatrix{dim, std::move(b), dev};
  }
  throw SketchError("jl_sketch: deviation " + std::to_string(best_dev) +
                        " still above eps = " + std::to_string(eps) +
                        " after 10 seeds",
                    best_dev);
}

namespace {

// Candidate ranking inside the net search. For a unit direction c the best
// k-sparse unit x maximizing (c^T B x)^2 is the normalized top-k truncation
// of the score vector s = B^T c, and its guaranteed value is |s_topk|^2;
// x^T (B^T B) x can only be larger. Ranking by |s_topk|^2 therefore
// preserves the net guarantee while avoiding a second mat-vec per direction.
struct NetScan {
  const Matrix& factor;  // r x n, effective-rank reduction of the sketch
  Index k;
  double best_score = -1.0;
  Vector best_direction;

  void consider(const Eigen::Ref<const Vector>& c) {
    thread_local std::vector<double> sq;
    const Index n = factor.cols();
    Vector s = factor.transpose() * c;
    sq.assign(static_cast<std::size_t>(n), 0.0);
    for (Index i = 0; i < n; ++i) sq[static_cast<std::size_t>(i)] = s[i] * s[i];
    double score = 0.0;
    if (k >= n) {
      for (double v : sq) score += v;
    } else {
      std::nth_element(sq.begin(), sq.begin() + (k - 1), sq.end(),
                       std::greater<double>());
      for (Index i = 0; i < k; ++i) score += sq[static_cast<std::size_t>(i)];
    }
    if (score > best_score) {
      best_score = score;
      best_direction = c;
    }
  }
};

double net_size_estimate(Index rank, double eps) {
  switch (rank) {
    case 1:
      return 2.0;
    case 2:
      return std::ceil(2.0 * M_PI / eps) + 1.0;
    case 3: {
      const double h = eps / std::sqrt(2.0);
      return (std::floor(M_PI / h) + 1.0) * (std::ceil(2.0 * M_PI / h) + 1.0);
    }
    default:
      return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

SparseSolution eps_net_search(const SketchMatrix& b, Index k, double eps,
                              std::uint64_t seed, double net_budget,
                              bool allow_sampling) {
  const Index n = b.factor.cols();
  if (k < 1 || k > n)
    throw std::invalid_argument("eps_net_search: k must be in [1, n]");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("eps_net_search: eps must be in (0, 1)");

  // Directions only matter through B^T c, so reduce to an orthonormal basis
  // of B's row space: with B = U S V^T, scanning z over the rank-r sphere
  // against S V^T is exactly equivalent to scanning c over the full sphere.
  Eigen::JacobiSVD<Matrix> svd(b.factor,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0)
    throw std::invalid_argument("eps_net_search: sketch factor is zero");
  Index rank = 0;
  while (rank < sv.size() && sv[rank] > 1e-12 * sv[0]) ++rank;
  Matrix reduced(rank, n);
  for (Index i = 0; i < rank; ++i)
    reduced.row(i) = sv[i] * svd.matrixV().col(i).transpose();

  NetScan scan{reduced, k};
  const double net_size = net_size_estimate(rank, eps);

  if (net_size <= net_budget) {
    // Deterministic grid with chord covering radius eps/2, so the best
    // candidate is within (1 - eps/2)^2 > 1 - eps of the rank-r optimum.
    if (rank == 1) {
      Vector c(1);
      c[0] = 1.0;
      scan.consider(c);
      c[0] = -1.0;
      scan.consider(c);
    } else if (rank == 2) {
      const double h = eps;  // max angle h/2, chord <= angle <= eps/2
      const auto steps = static_cast<Index>(std::ceil(2.0 * M_PI / h));
      Vector c(2);
      for (Index i = 0; i < steps; ++i) {
        const double th = h * static_cast<double>(i);
        c[0] = std::cos(th);
        c[1] = std::sin(th);
        scan.consider(c);
      }
    } else {
      const double h = eps / std::sqrt(2.0);  // two angular coordinates
      const auto polar = static_cast<Index>(std::floor(M_PI / h)) + 1;
      const auto azim = static_cast<Index>(std::ceil(2.0 * M_PI / h));
      Vector c(3);
      for (Index i = 0; i < polar; ++i) {
        const double th = std::min(h * static_cast<double>(i), M_PI);
        for (Index j = 0; j < azim; ++j) {
          const double ph = h * static_cast<double>(j);
          c[0] = std::sin(th) * std::cos(ph);
          c[1] = std::sin(th) * std::sin(ph);
          c[2] = std::cos(th);
          scan.consider(c);
        }
      }
    }
  } else if (allow_sampling) {
    const auto samples = static_cast<std::int64_t>(net_budget);
    constexpr std::int64_t kBatch = 16384;
    Matrix z(rank, kBatch);
    Matrix scores(n, kBatch);
    std::vector<double> sq(static_cast<std::size_t>(n));
    for (std::int64_t done = 0, batch = 0; done < samples; ++batch) {
      const std::int64_t count = std::min<std::int64_t>(kBatch, samples - done);
      Rng rng = substream(seed, "net", static_cast<std::uint64_t>(batch));
      for (std::int64_t c = 0; c < count; ++c) {
        double norm2 = 0.0;
        do {
          norm2 = 0.0;
          for (Index i = 0; i < rank; ++i) {
            const double g = rng.gaussian();
            z(i, c) = g;
            norm2 += g * g;
          }
        } while (norm2 == 0.0);
        z.col(c) /= std::sqrt(norm2);
      }
      scores.leftCols(count).noalias() =
          reduced.transpose() * z.leftCols(count);
      for (std::int64_t c = 0; c < count; ++c) {
        for (Index i = 0; i < n; ++i) {
          const double v = scores(i, c);
          sq[static_cast<std::size_t>(i)] = v * v;
        }
        double score = 0.0;
        if (k >= n) {
          for (double v : sq) score += v;
        } else {
          std::nth_element(sq.begin(), sq.begin() + (k - 1), sq.end(),
                           std::greater<double>());
          for (Index i = 0; i < k; ++i)
            score += sq[static_cast<std::size_t>(i)];
        }
        if (score > scan.best_score) {
          scan.best_score = score;
          scan.best_direction = z.col(c);
        }
      }
      done += count;
    }
  } else {
    throw BudgetError(
        "eps_net_search: net size " + std::to_string(net_size) +
        " exceeds budget " + std::to_string(net_budget) +
        " and sampling is disabled (raise with --net-budget or SPCA_BUDGET)");
  }

  const Vector s = reduced.transpose() * scan.best_direction;
  const Vector x = truncate_to_sparse(s, k);
  SparseSolution sol = make_solution(Matrix(reduced.transpose() * reduced), x);
  return sol;
}

SparseSolution solve_additive_ptas(const Eigen::Ref<const Matrix>& a, Index k,
                                   double eps, std::uint64_t seed,
                                   double net_budget) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("solve_additive_ptas: eps must be in (0, 1)");
  const SketchMatrix sk = jl_sketch(a, eps / 3.0, seed);
  const SparseSolution on_sketch =
      eps_net_search(sk, k, eps / 3.0, seed, net_budget, true);
  return make_solution(a, on_sketch.dense(a.rows()));
}

}  // namespace spca
