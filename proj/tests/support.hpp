#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "maxdet/linalg.hpp"
#include "maxdet/random.hpp"

namespace testing_support {

using maxdet::linalg::Matrix;
using maxdet::linalg::SymMatrix;

inline SymMatrix random_symmetric(std::size_t n, maxdet::Xoshiro256& rng, double scale = 1.0) {
  maxdet::NormalSampler normal;
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.set(i, j, scale * normal(rng));
  return m;
}

// B B^T + shift I with B standard normal.
inline SymMatrix random_spd(std::size_t n, maxdet::Xoshiro256& rng, double shift = 0.5) {
  maxdet::NormalSampler normal;
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = normal(rng);
  SymMatrix m = SymMatrix::symmetrized(b * b.transposed());
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, m(i, i) + shift);
  return m;
}

// Orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
inline Matrix random_orthogonal(std::size_t n, maxdet::Xoshiro256& rng) {
  maxdet::NormalSampler normal;
  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) = normal(rng);
  for (std::size_t c = 0; c < n; ++c) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < c; ++p) {
        double dot = 0.0;
        for (std::size_t r = 0; r < n; ++r) dot += q(r, c) * q(r, p);
        for (std::size_t r = 0; r < n; ++r) q(r, c) -= dot * q(r, p);
      }
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < n; ++r) norm += q(r, c) * q(r, c);
    norm = std::sqrt(norm);
    for (std::size_t r = 0; r < n; ++r) q(r, c) /= norm;
  }
  return q;
}

inline std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
    out[k] = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  }
  return out;
}

}  // namespace testing_support
