#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace maxdet::linalg {

// Dense row-major matrix. Used for eigenvectors, right-hand sides and
// intermediate products; symmetric quantities live in SymMatrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);
  static Matrix column(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> values() const noexcept { return data_; }

  Matrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

// Dense symmetric matrix. Entries are stored in full but every write goes to
// both (i, j) and (j, i), so entries[i][j] == entries[j][i] holds bit for bit.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t dim);

  static SymMatrix identity(std::size_t n);
  static SymMatrix zeros(std::size_t n) { return SymMatrix(n); }
  static SymMatrix diagonal(std::span<const double> diag);
  // Averages a square matrix with its transpose.
  static SymMatrix symmetrized(const Matrix& m);
  // Builds V diag(values) V^T.
  static SymMatrix from_spectrum(const Matrix& vectors, std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }

  double operator()(std::size_t i, std::size_t j) const { return full_(i, j); }
  void set(std::size_t i, std::size_t j, double value);

  std::span<const double> values() const noexcept { return full_.values(); }
  const Matrix& as_matrix() const noexcept { return full_; }

  double trace() const;
  bool all_finite() const;

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double scale);

 private:
  std::size_t dim_;
  Matrix full_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double scale, SymMatrix a);
std::vector<double> operator*(const SymMatrix& m, std::span<const double> v);

struct EigenDecomp {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // orthonormal columns
};

// Cyclic Jacobi. Sweeps until the off-diagonal Frobenius mass drops to
// 1e-12 * ||m||_F; more than 100 sweeps raises NoConvergence.
EigenDecomp eigh(const SymMatrix& m);

// Lower-triangular Cholesky factor. A pivot at or below 1e-13 times the
// largest diagonal entry raises NotPositiveDefinite.
class Cholesky {
 public:
  explicit Cholesky(const SymMatrix& m);

  std::size_t dim() const noexcept { return lower_.rows(); }
  const Matrix& lower() const noexcept { return lower_; }

  double logdet() const;
  std::vector<double> solve(std::span<const double> rhs) const;
  Matrix solve(const Matrix& rhs) const;

 private:
  Matrix lower_;
};

double logdet_posdef(const SymMatrix& m);
SymMatrix sym_sqrt(const SymMatrix& m);
SymMatrix inverse_posdef(const SymMatrix& m);
double spectral_norm(const SymMatrix& m);
double frobenius_norm(const SymMatrix& m);
double frobenius_norm(const Matrix& m);
Matrix solve_posdef(const SymMatrix& m, const Matrix& rhs);
std::vector<double> solve_posdef(const SymMatrix& m, std::span<const double> rhs);

}  // namespace maxdet::linalg
