#include "maxdet/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <thread>

#include "maxdet/error.hpp"
#include "maxdet/random.hpp"

namespace maxdet::cert {

namespace {

constexpr int kShards = 16;
constexpr int kBisectionCap = 400;
constexpr double kGridFloor = -1.0 + 1e-6;
constexpr double kGridCeiling = 3.0;

double term(double l) {
  const double r = l / (1.0 + l);
  return r * r;
}

double gap(double l) { return l - std::log1p(l); }

double objective(const std::vector<double>& l) {
  double s = 0.0;
  for (double v : l) s += term(v);
  return s;
}

// Most negative l in (-1, 0] with gap(l) <= budget.
double negative_edge(double budget) {
  double lo = -1.0;
  double hi = 0.0;
  for (int it = 0; it < kBisectionCap; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (gap(mid) <= budget ? hi : lo) = mid;
  }
  return hi;
}

// Largest l >= 0 with gap(l) <= budget.
double positive_edge(double budget) {
  double lo = 0.0;
  double hi = 1.0;
  while (gap(hi) <= budget) hi *= 2.0;
  for (int it = 0; it < kBisectionCap; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (gap(mid) <= budget ? lo : hi) = mid;
  }
  return lo;
}

bool feasible(const std::vector<double>& l, double epsilon) {
  double g = 0.0;
  double s = 0.0;
  for (double v : l) {
    if (!(v > -1.0)) return false;
    g += gap(v);
    s += v;
  }
  return g <= epsilon && s <= 0.0;
}

bool has_positive(const std::vector<double>& l) {
  return std::any_of(l.begin(), l.end(), [](double v) { return v > 0.0; });
}

struct Tally {
  double best = -1.0;
  std::vector<double> argmax;
  double best_with_positive = -1.0;
  std::size_t feasible_samples = 0;
  std::size_t positive_samples = 0;

  void visit(const std::vector<double>& l, double value) {
    if (value > best) {
      best = value;
      argmax = l;
    }
    if (has_positive(l)) {
      ++positive_samples;
      best_with_positive = std::max(best_with_positive, value);
    }
  }

  void merge(const Tally& other) {
    if (other.best > best) {
      best = other.best;
      argmax = other.argmax;
    }
    best_with_positive = std::max(best_with_positive, other.best_with_positive);
    feasible_samples += other.feasible_samples;
    positive_samples += other.positive_samples;
  }
};

// Best feasible value of coordinate i with the others held fixed. The
// feasible set in l_i is an interval and the per-coordinate objective is
// decreasing on (-1, 0] and increasing on [0, inf), so an endpoint wins.
std::optional<double> best_coordinate(const std::vector<double>& l, std::size_t i, double epsilon) {
  double other_gap = 0.0;
  double other_sum = 0.0;
  for (std::size_t j = 0; j < l.size(); ++j) {
    if (j == i) continue;
    other_gap += gap(l[j]);
    other_sum += l[j];
  }
  const double budget = epsilon - other_gap;
  if (budget < 0.0) return std::nullopt;
  const double a = negative_edge(budget);
  const double b = std::min(positive_edge(budget), -other_sum);
  if (a > b) return std::nullopt;
  return term(a) >= term(b) ? a : b;
}

// Monotone coordinate ascent; every visited point is reported to the tally.
void polish(std::vector<double>& l, double epsilon, int max_sweeps, Tally& tally) {
  double current = objective(l);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool improved = false;
    for (std::size_t i = 0; i < l.size(); ++i) {
      const auto candidate = best_coordinate(l, i, epsilon);
      if (!candidate) continue;
      const double saved = l[i];
      l[i] = *candidate;
      const double value = objective(l);
      if (value > current * (1.0 + 1e-15) && feasible(l, epsilon)) {
        current = value;
        improved = true;
        tally.visit(l, value);
      } else {
        l[i] = saved;
      }
    }
    if (!improved) break;
  }
}

std::vector<double> axis(double lo, double hi, double centre, std::size_t points) {
  // Uniform points on [lo, hi] that always include 'centre'.
  std::vector<double> out{centre};
  if (points <= 1 || hi <= lo) return out;
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    const double v = lo + step * static_cast<double>(k);
    if (v != centre) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Grid over coordinates 1..n-1 with coordinate 0 placed at its best endpoint,
// zoomed around the incumbent for several levels.
void grid_phase(double epsilon, int n, const OracleOptions& options, Tally& tally) {
  const double lo = std::max(kGridFloor, negative_edge(epsilon));
  const double hi = std::min(kGridCeiling, positive_edge(epsilon));
  const std::size_t free = static_cast<std::size_t>(n - 1);

  std::vector<double> l(static_cast<std::size_t>(n), 0.0);
  auto evaluate = [&](std::vector<double>& point) {
    const auto first = best_coordinate(point, 0, epsilon);
    if (!first) return;
    point[0] = *first;
    if (!feasible(point, epsilon)) return;
    ++tally.feasible_samples;
    tally.visit(point, objective(point));
  };

  if (free == 0) {
    evaluate(l);
    return;
  }

  const auto per_axis = static_cast<std::size_t>(
      std::max(3.0, std::floor(std::pow(static_cast<double>(options.grid_budget), 1.0 / free))));

  std::vector<double> centre(free, 0.0);
  std::vector<double> half(free, 0.0);
  for (std::size_t k = 0; k < free; ++k) half[k] = std::max(hi, -lo);

  for (int level = 0; level < options.refinement_levels; ++level) {
    std::vector<std::vector<double>> axes(free);
    for (std::size_t k = 0; k < free; ++k) {
      const double a = std::max(lo, centre[k] - half[k]);
      const double b = std::min(hi, centre[k] + half[k]);
      axes[k] = axis(a, b, centre[k], per_axis);
    }
    std::vector<std::size_t> idx(free, 0);
    while (true) {
      for (std::size_t k = 0; k < free; ++k) l[k + 1] = axes[k][idx[k]];
      std::vector<double> point = l;
      evaluate(point);
      std::size_t k = 0;
      while (k < free && ++idx[k] == axes[k].size()) idx[k++] = 0;
      if (k == free) break;
    }
    if (!tally.argmax.empty()) {
      for (std::size_t k = 0; k < free; ++k) centre[k] = tally.argmax[k + 1];
    }
    for (std::size_t k = 0; k < free; ++k) {
      half[k] = 2.0 * (2.0 * half[k]) / static_cast<double>(per_axis - 1);
    }
  }
}

Tally random_shard(double epsilon, int n, std::size_t samples, std::uint64_t seed,
                   const OracleOptions& options) {
  Tally tally;
  Xoshiro256 rng(seed);
  const double lo = negative_edge(epsilon);
  const double hi = positive_edge(epsilon);
  std::vector<double> l(static_cast<std::size_t>(n));
  for (std::size_t s = 0; s < samples; ++s) {
    for (double& v : l) v = lo + (hi - lo) * rng.uniform();
    if (!feasible(l, epsilon)) continue;
    ++tally.feasible_samples;
    tally.visit(l, objective(l));
    polish(l, epsilon, options.max_polish_sweeps, tally);
  }
  return tally;
}

}  // namespace

OracleResult brute_force_search(double epsilon, int n, const OracleOptions& options) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidGap, "brute_force_search: gap must be finite and >= 0");
  }
  if (n < 1 || n > 4) throw Error(ErrorCode::InvalidInput, "brute_force_search: n must be in 1..4");

  if (epsilon == 0.0) {
    // Only l = 0 satisfies sum gap(l_i) <= 0.
    return OracleResult{0.0, std::vector<double>(static_cast<std::size_t>(n), 0.0), -1.0, 1, 0};
  }

  Tally total;
  grid_phase(epsilon, n, options, total);

  std::vector<Tally> shards(kShards);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int s = next++; s < kShards; s = next++) {
      const std::size_t begin = options.random_samples * static_cast<std::size_t>(s) / kShards;
      const std::size_t end = options.random_samples * static_cast<std::size_t>(s + 1) / kShards;
      SplitMix64 mix(options.seed + static_cast<std::uint64_t>(s));
      shards[static_cast<std::size_t>(s)] = random_shard(epsilon, n, end - begin, mix.next(), options);
    }
  };
  const unsigned threads = std::clamp(options.threads, 1u, static_cast<unsigned>(kShards));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& shard : shards) total.merge(shard);

  return OracleResult{std::max(total.best, 0.0), total.argmax, total.best_with_positive,
                      total.feasible_samples, total.positive_samples};
}

double brute_force_g(double epsilon, int n) { return brute_force_search(epsilon, n).best; }

}  // namespace maxdet::cert
