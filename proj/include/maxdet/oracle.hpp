#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace maxdet::cert {

// Brute-force search for
//   max sum_i (l_i / (1 + l_i))^2
//   s.t. sum_i l_i - log(1 + l_i) <= eps,  sum_i l_i <= 0,  l_i > -1
// over n eigenvalues. Deliberately free of Lambert W and of any
// stationarity reasoning: a refined grid plus random multistart with
// coordinate-wise polish, where every 1-D subproblem is solved by bisection.
struct OracleOptions {
  std::size_t random_samples = 100000;
  std::uint64_t seed = 0x6d617864657421ULL;
  // Worker threads for the random phase. Results do not depend on it:
  // samples are split into a fixed number of independently seeded shards.
  unsigned threads = 1;
  // Grid tuples per refinement level (spread over the n - 1 free coordinates).
  std::size_t grid_budget = 40000;
  int refinement_levels = 10;
  int max_polish_sweeps = 8;
};

struct OracleResult {
  double best = 0.0;
  std::vector<double> argmax;
  // Largest objective seen at any feasible point with some l_i > 0
  // (negative when no such point was visited).
  double best_with_positive = -1.0;
  std::size_t feasible_samples = 0;
  std::size_t positive_samples = 0;
};

OracleResult brute_force_search(double epsilon, int n, const OracleOptions& options = {});

double brute_force_g(double epsilon, int n);

}  // namespace maxdet::cert
