#include "maxdet/certificate.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "maxdet/error.hpp"
#include "maxdet/lambert.hpp"

namespace maxdet::cert {

namespace {

constexpr double kDivergenceTolerance = 1e-15;

void require_gap(double epsilon, const char* fn) {
  if (!(epsilon >= 0.0)) {
    throw Error(ErrorCode::InvalidGap, std::string(fn) + ": optimality gap must be >= 0, got " +
                                           std::to_string(epsilon));
  }
}

Certificate assemble(const linalg::SymMatrix& x_f, double epsilon) {
  // Cholesky first so a non-SPD X_f reports NotPositiveDefinite.
  (void)linalg::Cholesky(x_f);
  const auto star = lambda_star(epsilon);

  Certificate c;
  c.epsilon = epsilon;
  c.lambda_star = star.value;
  c.reduced_accuracy = star.reduced_accuracy;
  c.g_exact = g_exact(epsilon);
  c.g_closed = g_closed(epsilon);
  c.spectral_norm_xf = linalg::spectral_norm(x_f);
  c.vacuous = std::isinf(c.g_closed);
  c.frobenius_bound = c.vacuous ? std::numeric_limits<double>::infinity()
                                : c.spectral_norm_xf * c.spectral_norm_xf * c.g_closed;
  return c;
}

}  // namespace

OptimalEigenvalue lambda_star(double epsilon) {
  require_gap(epsilon, "lambda_star");
  const auto root = lambert::w0_log_form(epsilon);
  return {-root.w_plus_one, -root.w, root.reduced_accuracy};
}

double g_exact(double epsilon) {
  const auto star = lambda_star(epsilon);
  if (star.value == 0.0) return 0.0;
  if (star.one_plus_value == 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = star.value / star.one_plus_value;
  return ratio * ratio;
}

double g_closed(double epsilon) {
  require_gap(epsilon, "g_closed");
  if (epsilon == 0.0) return 0.0;
  const double c = std::cbrt(-std::expm1(-epsilon));
  const double denom = 1.0 - c;
  if (denom <= kDivergenceTolerance) return std::numeric_limits<double>::infinity();
  const double ratio = c / denom;
  return ratio * ratio;
}

Certificate frobenius_certificate(const linalg::SymMatrix& x_f, double epsilon) {
  require_gap(epsilon, "frobenius_certificate");
  return assemble(x_f, epsilon);
}

Certificate frobenius_certificate(const linalg::SymMatrix& x_f, const linalg::SymMatrix& x_star) {
  if (x_f.dim() != x_star.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "frobenius_certificate: X_f and X* differ in dimension");
  }
  const double raw = linalg::logdet_posdef(x_star) - linalg::logdet_posdef(x_f);
  auto c = assemble(x_f, raw < 0.0 ? 0.0 : raw);
  c.epsilon_clamped = raw < 0.0;
  return c;
}

QDiagnostics q_diagnostics(const linalg::SymMatrix& x_star, const linalg::SymMatrix& x_f) {
  if (x_star.dim() != x_f.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "q_diagnostics: X* and X_f differ in dimension");
  }
  const double logdet_star = linalg::logdet_posdef(x_star);
  const double logdet_f = linalg::logdet_posdef(x_f);

  // Q = S^{-1} D S^{-1} with S = X*^{1/2}, D = X_f - X*.
  const auto root = linalg::sym_sqrt(x_star);
  const auto diff = x_f - x_star;
  const auto left = linalg::solve_posdef(root, diff.as_matrix());
  const auto q = linalg::SymMatrix::symmetrized(linalg::solve_posdef(root, left.transposed()));

  auto eig = linalg::eigh(q);
  double gap_lower = 0.0;
  for (double lambda : eig.eigenvalues) {
    gap_lower += lambda > -1.0 ? lambert::log_gap(lambda) : std::numeric_limits<double>::infinity();
  }
  return QDiagnostics{q, std::move(eig.eigenvalues), q.trace(), gap_lower, logdet_star - logdet_f};
}

std::vector<double> g_candidates(double epsilon, int n_max) {
  require_gap(epsilon, "g_candidates");
  if (epsilon == 0.0) throw Error(ErrorCode::InvalidGap, "g_candidates: optimality gap must be > 0");
  if (n_max < 1) throw Error(ErrorCode::InvalidInput, "g_candidates: n_max must be >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) out.push_back(n * g_exact(epsilon / n));
  return out;
}

}  // namespace maxdet::cert
