#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maxdet/mvee.hpp"

namespace maxdet::cli {

enum class Format { Csv, Json };

// 1, 1e-1, ..., 1e-8
std::vector<double> default_ladder();

struct ExperimentConfig {
  std::size_t dim = 50;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  // Strictly descending; the last entry is the reference rung.
  std::vector<double> tolerances = default_ladder();
  std::string output_path;
  Format format = Format::Csv;
  unsigned threads = 1;
  std::size_t max_iters = 0;

  // InvalidShape for N < 2 or M < N + 1, InvalidInput for a bad ladder.
  void validate() const;
};

struct ExperimentRow {
  double delta = 0.0;
  double epsilon = 0.0;
  double normalized_error = 0.0;
  double bound_exact = 0.0;
  double bound_closed = 0.0;
  bool holds = false;
  // Not part of the CSV schema.
  double trace_q = 0.0;
  bool epsilon_clamped = false;
};

struct ExperimentOutcome {
  std::vector<ExperimentRow> rows;
  // One report per rung, in ladder order; empty when that rung failed.
  std::vector<std::optional<mvee::SolveReport>> reports;
  // Set when a solve failed; rows then hold whatever could be computed.
  std::optional<std::string> failure;

  bool all_hold() const;
};

// M standard normal points in R^N: one xoshiro256** stream seeded with
// 'seed' through SplitMix64, Box-Muller pairs, filled point by point.
mvee::PointSet generate_points(std::size_t n, std::size_t m, std::uint64_t seed);

// Solves every rung on 'points' (up to cfg.threads at once) and compares each
// non-reference rung with the last one. Rows are in ladder order.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const mvee::PointSet& points);

// Generates the points from cfg.seed, cfg.dim and cfg.count.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

// Header delta,epsilon,normalized_error,bound_exact,bound_closed,holds; a
// trailing "# failure: ..." line when the outcome carries a failure.
std::string rows_csv(const ExperimentOutcome& outcome);
std::string rows_json(const ExperimentOutcome& outcome);

// MAXDET_CERTIFY_THREADS, default 1.
unsigned worker_cap_from_env();

}  // namespace maxdet::cli
