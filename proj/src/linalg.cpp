#include "spca/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>

namespace spca {

double max_abs(const Eigen::Ref<const Matrix>& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

bool is_symmetric(const Eigen::Ref<const Matrix>& a, double tol) {
  if (a.rows() != a.cols()) return false;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

Matrix symmetrized(const Eigen::Ref<const Matrix>& a) {
  Matrix s(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    s(i, i) = a(i, i);
    for (Index j = i + 1; j < a.cols(); ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

void require_symmetric(const Eigen::Ref<const Matrix>& a, double tol) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("matrix is not square: " +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()));
  if (a.rows() < 1) throw std::invalid_argument("matrix must have n >= 1");
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol)
        throw std::invalid_argument(
            "matrix is not symmetric at (" + std::to_string(i) + "," +
            std::to_string(j) + "): |" + std::to_string(a(i, j)) + " - " +
            std::to_string(a(j, i)) + "| exceeds tolerance");
}

namespace {

// Flip eigenvector signs so the largest-magnitude component (lowest index on
// ties) is positive. Keeps decompositions reproducible.
void canonicalize_columns(Matrix& v) {
  for (Index c = 0; c < v.cols(); ++c) {
    Index arg = 0;
    double best = -1.0;
    for (Index r = 0; r < v.rows(); ++r) {
      const double m = std::abs(v(r, c));
      if (m > best) {
        best = m;
        arg = r;
      }
    }
    if (v(arg, c) < 0.0) v.col(c) = -v.col(c);
  }
}

}  // namespace

SpectralDecomp eig_sym(const Eigen::Ref<const Matrix>& a) {
  require_symmetric(a, 1e-12 * (1.0 + max_abs(a)));
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) {
    const double res =
        es.info() == Eigen::NoConvergence
            ? (a - es.eigenvectors() * es.eigenvalues().asDiagonal() *
                       es.eigenvectors().transpose())
                  .cwiseAbs()
                  .maxCoeff()
            : std::numeric_limits<double>::quiet_NaN();
    throw EigError("eigensolver did not converge; achieved residual " +
                       std::to_string(res),
                   res);
  }
  SpectralDecomp out;
  const Index n = a.rows();
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors.resize(n, n);
  for (Index i = 0; i < n; ++i)
    out.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
  canonicalize_columns(out.eigenvectors);
  return out;
}

Matrix expm_walk(const Eigen::Ref<const Matrix>& g, double t) {
  if (t < 0.0) throw std::invalid_argument("expm_walk requires t >= 0");
  require_symmetric(g, 1e-12 * (1.0 + max_abs(g)));
  for (Index i = 0; i < g.rows(); ++i) {
    const double rs = g.row(i).sum();
    if (std::abs(rs - 1.0) > 1e-9)
      throw std::invalid_argument("expm_walk: row " + std::to_string(i) +
                                  " sums to " + std::to_string(rs) +
                                  ", expected 1");
  }
  const SpectralDecomp d = eig_sym(g);
  Vector w(d.eigenvalues.size());
  for (Index i = 0; i < w.size(); ++i)
    w[i] = std::exp(-t * (1.0 - d.eigenvalues[i]));
  return symmetrized(d.eigenvectors * w.asDiagonal() *
                     d.eigenvectors.transpose());
}

PsdReport is_psd(const Eigen::Ref<const Matrix>& a, double tol) {
  const SpectralDecomp d = eig_sym(a);
  const double mn = d.eigenvalues[d.eigenvalues.size() - 1];
  return {mn >= -tol, mn};
}

double quad_form(const Eigen::Ref<const Matrix>& a,
                 const Eigen::Ref<const Vector>& x) {
  if (a.rows() != a.cols() || a.cols() != x.size())
    throw std::invalid_argument("quad_form: dimension mismatch (" +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs vector " +
                                std::to_string(x.size()) + ")");
  return x.dot(a * x);
}

Matrix parse_matrix(std::istream& in) {
  std::string line;
  long line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line())
    throw std::invalid_argument("matrix file: missing size on line 1");
  Index n = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> n) || n < 1)
      throw std::invalid_argument("matrix file: bad size on line " +
                                  std::to_string(line_no));
  }
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i) {
    if (!next_line())
      throw std::invalid_argument("matrix file: expected row " +
                                  std::to_string(i + 1) + " after line " +
                                  std::to_string(line_no));
    std::istringstream ss(line);
    for (Index j = 0; j < n; ++j) {
      if (!(ss >> a(i, j)))
        throw std::invalid_argument("matrix file: bad value on line " +
                                    std::to_string(line_no) + ", column " +
                                    std::to_string(j + 1));
    }
    double extra;
    if (ss >> extra)
      throw std::invalid_argument("matrix file: too many values on line " +
                                  std::to_string(line_no));
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > 1e-12)
        throw std::invalid_argument(
            "matrix file: asymmetric at (" + std::to_string(i + 1) + "," +
            std::to_string(j + 1) + ") beyond tolerance 1e-12");
  return symmetrized(a);
}

Matrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open matrix file: " + path);
  return parse_matrix(in);
}

void write_matrix(std::ostream& out, const Eigen::Ref<const Matrix>& a) {
  out << a.rows() << "\n";
  char buf[32];
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
      out << buf << (j + 1 == a.cols() ? "" : " ");
    }
    out << "\n";
  }
}

void save_matrix(const std::string& path, const Eigen::Ref<const Matrix>& a) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write matrix file: " + path);
  write_matrix(out, a);
}

}  // namespace spca
