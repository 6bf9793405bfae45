#include "maxdet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "maxdet/error.hpp"

namespace maxdet::linalg {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kJacobiTolerance = 1e-12;
constexpr double kPivotTolerance = 1e-13;
constexpr double kNegativeEigenTolerance = 1e-12;

void require_square_match(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": dimension " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  Matrix m(values.size(), 1);
  std::copy(values.begin(), values.end(), m.data_.begin());
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require_square_match(a.cols(), b.rows(), "matrix product");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_square_match(a.rows(), b.rows(), "matrix difference");
  require_square_match(a.cols(), b.cols(), "matrix difference");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), full_(dim, dim) {
  if (dim == 0) throw Error(ErrorCode::InvalidInput, "symmetric matrix dimension must be >= 1");
}

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.set(i, i, diag[i]);
  return m;
}

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
  require_square_match(m.rows(), m.cols(), "symmetrize");
  SymMatrix s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  return s;
}

SymMatrix SymMatrix::from_spectrum(const Matrix& vectors, std::span<const double> values) {
  const std::size_t n = vectors.rows();
  require_square_match(n, values.size(), "spectral reconstruction");
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += vectors(i, k) * values[k] * vectors(j, k);
      s.set(i, j, acc);
    }
  }
  return s;
}

void SymMatrix::set(std::size_t i, std::size_t j, double value) {
  full_(i, j) = value;
  full_(j, i) = value;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += full_(i, i);
  return t;
}

bool SymMatrix::all_finite() const {
  const auto v = values();
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  require_square_match(dim_, other.dim_, "symmetric sum");
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j) set(i, j, (*this)(i, j) + other(i, j));
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  require_square_match(dim_, other.dim_, "symmetric difference");
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j) set(i, j, (*this)(i, j) - other(i, j));
  return *this;
}

SymMatrix& SymMatrix::operator*=(double scale) {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j) set(i, j, scale * (*this)(i, j));
  return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double scale, SymMatrix a) { return a *= scale; }

std::vector<double> operator*(const SymMatrix& m, std::span<const double> v) {
  require_square_match(m.dim(), v.size(), "matrix-vector product");
  std::vector<double> out(m.dim(), 0.0);
  for (std::size_t i = 0; i < m.dim(); ++i) {
    const auto row = m.as_matrix().row(i);
    out[i] = std::inner_product(row.begin(), row.end(), v.begin(), 0.0);
  }
  return out;
}

EigenDecomp eigh(const SymMatrix& m) {
  if (!m.all_finite()) throw Error(ErrorCode::InvalidInput, "eigh: non-finite entries");
  const std::size_t n = m.dim();
  Matrix a = m.as_matrix();
  Matrix v = Matrix::identity(n);
  const double threshold = kJacobiTolerance * frobenius_norm(m);

  auto off_diagonal = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  bool converged = false;
  for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
    if (off_diagonal() <= threshold) {
      converged = true;
      break;
    }
    if (sweep == kMaxSweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "eigh: Jacobi sweep cap exceeded");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomp out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

Cholesky::Cholesky(const SymMatrix& m) : lower_(m.dim(), m.dim()) {
  if (!m.all_finite()) throw Error(ErrorCode::InvalidInput, "cholesky: non-finite entries");
  const std::size_t n = m.dim();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, m(i, i));
  const double tol = kPivotTolerance * max_diag;

  for (std::size_t j = 0; j < n; ++j) {
    double pivot = m(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= lower_(j, k) * lower_(j, k);
    if (!(pivot > tol)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "cholesky: pivot " + std::to_string(j) + " is not positive");
    }
    const double ljj = std::sqrt(pivot);
    lower_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double acc = m(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= lower_(i, k) * lower_(j, k);
      lower_(i, j) = acc / ljj;
    }
  }
}

double Cholesky::logdet() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += std::log(lower_(i, i));
  return 2.0 * s;
}

std::vector<double> Cholesky::solve(std::span<const double> rhs) const {
  const std::size_t n = dim();
  require_square_match(n, rhs.size(), "cholesky solve");
  std::vector<double> x(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) x[i] -= lower_(i, k) * x[k];
    x[i] /= lower_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) x[i] -= lower_(k, i) * x[k];
    x[i] /= lower_(i, i);
  }
  return x;
}

Matrix Cholesky::solve(const Matrix& rhs) const {
  require_square_match(dim(), rhs.rows(), "cholesky solve");
  Matrix out(rhs.rows(), rhs.cols());
  std::vector<double> col(rhs.rows());
  for (std::size_t j = 0; j < rhs.cols(); ++j) {
    for (std::size_t i = 0; i < rhs.rows(); ++i) col[i] = rhs(i, j);
    const auto x = solve(col);
    for (std::size_t i = 0; i < rhs.rows(); ++i) out(i, j) = x[i];
  }
  return out;
}

double logdet_posdef(const SymMatrix& m) { return Cholesky(m).logdet(); }

SymMatrix sym_sqrt(const SymMatrix& m) {
  auto eig = eigh(m);
  const double norm = std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
  for (double& lambda : eig.eigenvalues) {
    if (lambda < -kNegativeEigenTolerance * norm) {
      throw Error(ErrorCode::NotPSD, "sym_sqrt: matrix has a negative eigenvalue");
    }
    lambda = std::sqrt(std::max(lambda, 0.0));
  }
  return SymMatrix::from_spectrum(eig.eigenvectors, eig.eigenvalues);
}

SymMatrix inverse_posdef(const SymMatrix& m) {
  const Cholesky chol(m);
  return SymMatrix::symmetrized(chol.solve(Matrix::identity(m.dim())));
}

double spectral_norm(const SymMatrix& m) {
  const auto eig = eigh(m);
  return std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
}

double frobenius_norm(const Matrix& m) {
  // Scaled accumulation so very large or tiny entries do not overflow.
  double scale = 0.0;
  for (double x : m.values()) {
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidInput, "frobenius_norm: non-finite entries");
    scale = std::max(scale, std::abs(x));
  }
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : m.values()) {
    const double r = x / scale;
    s += r * r;
  }
  return scale * std::sqrt(s);
}

double frobenius_norm(const SymMatrix& m) { return frobenius_norm(m.as_matrix()); }

Matrix solve_posdef(const SymMatrix& m, const Matrix& rhs) { return Cholesky(m).solve(rhs); }

std::vector<double> solve_posdef(const SymMatrix& m, std::span<const double> rhs) {
  return Cholesky(m).solve(rhs);
}

}  // namespace maxdet::linalg
