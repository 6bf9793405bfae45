#pragma once

#include <vector>

#include "maxdet/linalg.hpp"

namespace maxdet::cert {

// Worst-case eigenvalue of Q for a log-determinant gap epsilon:
// lambda* = -W0(-e^{-(1+eps)}) - 1. one_plus_value is carried separately
// because lambda* approaches -1 as epsilon grows.
struct OptimalEigenvalue {
  double value;
  double one_plus_value;
  bool reduced_accuracy;
};

struct Certificate {
  double epsilon = 0.0;
  double lambda_star = 0.0;
  double g_exact = 0.0;
  double g_closed = 0.0;
  double spectral_norm_xf = 0.0;
  // Bound on ||X* - X_f||_F^2, i.e. spectral_norm_xf^2 * g_closed.
  double frobenius_bound = 0.0;
  // g_closed diverged; the bound carries no information.
  bool vacuous = false;
  // A reference-derived gap came out negative from roundoff and was clamped to 0.
  bool epsilon_clamped = false;
  bool reduced_accuracy = false;
};

// Q = X*^{-1/2} (X_f - X*) X*^{-1/2} and its spectrum.
struct QDiagnostics {
  linalg::SymMatrix q;
  std::vector<double> eigenvalues;
  double trace;
  // sum_i lambda_i - log(1 + lambda_i)
  double gap_lower;
  // logdet(X*) - logdet(X_f)
  double logdet_gap;
};

OptimalEigenvalue lambda_star(double epsilon);

// (lambda* / (1 + lambda*))^2: the exact worst-case squared normalised error.
double g_exact(double epsilon);

// (c / (1 - c))^2 with c = cbrt(1 - e^{-eps}). Returns +infinity once
// 1 - c drops to 1e-15.
double g_closed(double epsilon);

Certificate frobenius_certificate(const linalg::SymMatrix& x_f, double epsilon);

// Gap taken from the two log-determinants; a negative gap is clamped to zero
// and flagged.
Certificate frobenius_certificate(const linalg::SymMatrix& x_f, const linalg::SymMatrix& x_star);

QDiagnostics q_diagnostics(const linalg::SymMatrix& x_star, const linalg::SymMatrix& x_f);

// f_n = n (lambda_n / (1 + lambda_n))^2 where n (lambda_n - log(1 + lambda_n)) = eps,
// for n = 1..n_max: the objective when the gap is spread evenly over n eigenvalues.
std::vector<double> g_candidates(double epsilon, int n_max);

}  // namespace maxdet::cert
