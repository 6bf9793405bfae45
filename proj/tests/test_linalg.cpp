#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "maxdet/error.hpp"
#include "maxdet/linalg.hpp"
#include "support.hpp"

using namespace maxdet;
using namespace maxdet::linalg;
using testing_support::random_spd;
using testing_support::random_symmetric;

namespace {

SymMatrix sym2(double a, double b, double d) {
  SymMatrix m(2);
  m.set(0, 0, a);
  m.set(0, 1, b);
  m.set(1, 1, d);
  return m;
}

SymMatrix diag(std::initializer_list<double> d) { return SymMatrix::diagonal(std::vector<double>(d)); }

Eigen::MatrixXd to_eigen(const SymMatrix& m) {
  Eigen::MatrixXd e(m.dim(), m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) e(i, j) = m(i, j);
  return e;
}

double max_abs_diff(const SymMatrix& a, const SymMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected maxdet::Error");
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST_CASE("storage keeps both triangles identical") {
  SymMatrix m(3);
  m.set(2, 0, 1.5);
  CHECK(m(0, 2) == 1.5);
  CHECK(m(2, 0) == 1.5);
  CHECK(code_of([] { SymMatrix z(0); }) == ErrorCode::InvalidInput);
}

TEST_CASE("eigh on small hand-checked matrices") {
  const auto id = eigh(SymMatrix::identity(3));
  for (double v : id.eigenvalues) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

  const auto d = eigh(diag({2.0, 5.0}));
  CHECK(d.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(d.eigenvalues[1] == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(std::abs(d.eigenvectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(d.eigenvectors(1, 1)) == doctest::Approx(1.0));

  const auto t = eigh(sym2(2, 1, 2));
  CHECK(t.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("eigh rejects non-finite entries") {
  auto m = SymMatrix::identity(2);
  m.set(0, 1, std::numeric_limits<double>::quiet_NaN());
  CHECK(code_of([&] { eigh(m); }) == ErrorCode::InvalidInput);
  m.set(0, 1, std::numeric_limits<double>::infinity());
  CHECK(code_of([&] { eigh(m); }) == ErrorCode::InvalidInput);
}

TEST_CASE("eigh reconstructs random symmetric matrices and matches Eigen") {
  Xoshiro256 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 20);
    const auto m = random_symmetric(n, rng, trial % 3 == 0 ? 1e3 : 1.0);
    const auto e = eigh(m);
    const double norm = frobenius_norm(m);

    const auto rebuilt = SymMatrix::from_spectrum(e.eigenvectors, e.eigenvalues);
    CHECK(frobenius_norm(rebuilt - m) <= 1e-9 * norm);
    const auto vtv = e.eigenvectors.transposed() * e.eigenvectors;
    CHECK(frobenius_norm(vtv - Matrix::identity(n)) <= 1e-10 * std::sqrt(static_cast<double>(n)));
    for (std::size_t k = 1; k < n; ++k) CHECK(e.eigenvalues[k - 1] <= e.eigenvalues[k]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(to_eigen(m));
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(std::abs(e.eigenvalues[k] - ref.eigenvalues()(static_cast<Eigen::Index>(k))) <= 1e-11 * norm);
    }
  }
}

TEST_CASE("eigh handles repeated and clustered eigenvalues") {
  Xoshiro256 rng(5);
  const auto q = testing_support::random_orthogonal(6, rng);
  const std::vector<double> spectrum{-2.0, 1.0, 1.0, 1.0 + 1e-13, 4.0, 4.0};
  const auto m = SymMatrix::from_spectrum(q, spectrum);
  const auto e = eigh(m);
  for (std::size_t k = 0; k < spectrum.size(); ++k) CHECK(e.eigenvalues[k] == doctest::Approx(spectrum[k]).epsilon(1e-12));
}

TEST_CASE("logdet_posdef examples") {
  CHECK(logdet_posdef(SymMatrix::identity(4)) == 0.0);
  CHECK(logdet_posdef(diag({std::numbers::e, std::numbers::e})) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(logdet_posdef(sym2(4, 2, 3)) == doctest::Approx(std::log(8.0)).epsilon(1e-15));
}

TEST_CASE("logdet_posdef rejects indefinite and singular input") {
  CHECK(code_of([] { logdet_posdef(sym2(1, 2, 1)); }) == ErrorCode::NotPositiveDefinite);
  CHECK(code_of([] { logdet_posdef(sym2(1, 1, 1)); }) == ErrorCode::NotPositiveDefinite);
  CHECK(code_of([] { logdet_posdef(diag({1.0, -1e-3})); }) == ErrorCode::NotPositiveDefinite);
}

TEST_CASE("logdet_posdef agrees with the eigenvalue route and with Eigen's LLT") {
  Xoshiro256 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 15);
    const auto m = random_spd(n, rng);
    double from_eigs = 0.0;
    for (double v : eigh(m).eigenvalues) from_eigs += std::log(v);
    const double ld = logdet_posdef(m);
    CHECK(std::abs(ld - from_eigs) <= 1e-9 * (1.0 + std::abs(ld)));

    Eigen::LLT<Eigen::MatrixXd> llt(to_eigen(m));
    const double ref = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    CHECK(std::abs(ld - ref) <= 1e-11 * (1.0 + std::abs(ref)));
  }
}

TEST_CASE("sym_sqrt examples") {
  CHECK(max_abs_diff(sym_sqrt(SymMatrix::identity(3)), SymMatrix::identity(3)) <= 1e-15);
  CHECK(max_abs_diff(sym_sqrt(diag({4.0, 9.0})), diag({2.0, 3.0})) <= 1e-14);
  CHECK(max_abs_diff(sym_sqrt(sym2(5, 4, 5)), sym2(2, 1, 2)) <= 1e-14);
}

TEST_CASE("sym_sqrt squares back for random SPD and PSD input") {
  Xoshiro256 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 12);
    auto m = random_spd(n, rng, trial % 2 == 0 ? 0.0 : 1.0);
    const auto s = sym_sqrt(m);
    const auto ss = SymMatrix::symmetrized(s.as_matrix() * s.as_matrix());
    CHECK(frobenius_norm(ss - m) <= 1e-9 * (1.0 + frobenius_norm(m)));
    CHECK(eigh(s).eigenvalues.front() >= -1e-12);
  }
  // Rank-deficient PSD: the zero eigenvalue may come out as a tiny negative.
  const auto rank_one = sym2(1, 1, 1);
  const auto s = sym_sqrt(rank_one);
  CHECK(max_abs_diff(s, 0.5 * sym2(std::sqrt(2.0), std::sqrt(2.0), std::sqrt(2.0))) <= 1e-12);
}

TEST_CASE("sym_sqrt rejects clearly negative eigenvalues") {
  CHECK(code_of([] { sym_sqrt(diag({1.0, -1e-6})); }) == ErrorCode::NotPSD);
  CHECK(code_of([] { sym_sqrt(sym2(1, 2, 1)); }) == ErrorCode::NotPSD);
  CHECK_NOTHROW(sym_sqrt(diag({1.0, -1e-13})));
}

TEST_CASE("spectral_norm examples") {
  CHECK(spectral_norm(SymMatrix::identity(5)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spectral_norm(diag({-3.0, 2.0})) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(spectral_norm(sym2(2, 1, 2)) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("frobenius_norm examples") {
  CHECK(frobenius_norm(SymMatrix::zeros(3)) == 0.0);
  CHECK(frobenius_norm(SymMatrix::identity(4)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(frobenius_norm(sym2(3, 4, 3)) == doctest::Approx(std::sqrt(50.0)).epsilon(1e-15));
  CHECK(frobenius_norm(diag({1e200, 1e200})) == doctest::Approx(std::sqrt(2.0) * 1e200).epsilon(1e-15));
  CHECK(code_of([] { frobenius_norm(diag({1.0, std::numeric_limits<double>::infinity()})); }) ==
        ErrorCode::InvalidInput);
}

TEST_CASE("spectral norm lies between F/sqrt(N) and F") {
  Xoshiro256 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 10);
    const auto m = random_symmetric(n, rng);
    const double s = spectral_norm(m);
    const double f = frobenius_norm(m);
    CHECK(s >= f / std::sqrt(static_cast<double>(n)) * (1.0 - 1e-12));
    CHECK(s <= f * (1.0 + 1e-12));
  }
}

TEST_CASE("solve_posdef examples") {
  Matrix rhs(2, 2);
  rhs(0, 0) = 1.0;
  rhs(0, 1) = -2.0;
  rhs(1, 0) = 3.0;
  rhs(1, 1) = 0.5;
  const auto same = solve_posdef(SymMatrix::identity(2), rhs);
  CHECK(frobenius_norm(same - rhs) == 0.0);

  const std::vector<double> b1{2.0, 4.0};
  const auto x1 = solve_posdef(diag({2.0, 4.0}), std::span<const double>(b1));
  CHECK(x1[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(x1[1] == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<double> b2{8.0, 7.0};
  const auto x2 = solve_posdef(sym2(4, 2, 3), std::span<const double>(b2));
  CHECK(x2[0] == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(x2[1] == doctest::Approx(1.5).epsilon(1e-15));

  CHECK(code_of([] { solve_posdef(sym2(1, 2, 1), Matrix::identity(2)); }) == ErrorCode::NotPositiveDefinite);
}

TEST_CASE("solve_posdef residual on random systems") {
  Xoshiro256 rng(3);
  NormalSampler normal;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 12);
    const auto m = random_spd(n, rng);
    Matrix rhs(n, 3);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < 3; ++j) rhs(i, j) = normal(rng);
    const auto x = solve_posdef(m, rhs);
    CHECK(frobenius_norm(m.as_matrix() * x - rhs) <= 1e-9 * (1.0 + frobenius_norm(rhs)));
  }
}

TEST_CASE("inverse_posdef is a two-sided inverse") {
  Xoshiro256 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 10);
    const auto m = random_spd(n, rng);
    const auto inv = inverse_posdef(m);
    CHECK(frobenius_norm(m.as_matrix() * inv.as_matrix() - Matrix::identity(n)) <= 1e-10);
  }
}
