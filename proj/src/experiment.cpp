#include "maxdet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include <json.hpp>

#include "maxdet/certificate.hpp"
#include "maxdet/error.hpp"
#include "maxdet/io.hpp"
#include "maxdet/random.hpp"

namespace maxdet::cli {

namespace {

constexpr double kHoldsSlack = 1e-9;

double closed_form_ratio(double epsilon) {
  const double c = std::cbrt(-std::expm1(-epsilon));
  const double denom = 1.0 - c;
  return denom > 0.0 ? std::abs(c / denom) : std::numeric_limits<double>::infinity();
}

std::string describe(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return std::string(to_string(err->code())) + ": " + err->what();
  }
  return e.what();
}

}  // namespace

std::vector<double> default_ladder() {
  std::vector<double> out;
  for (int k = 0; k <= 8; ++k) out.push_back(std::pow(10.0, -k));
  return out;
}

void ExperimentConfig::validate() const {
  if (dim < 2) throw Error(ErrorCode::InvalidShape, "experiment: dimension must be at least 2");
  if (count < dim + 1) {
    throw Error(ErrorCode::InvalidShape, "experiment: need at least N + 1 = " + std::to_string(dim + 1) + " points");
  }
  if (tolerances.empty()) throw Error(ErrorCode::InvalidInput, "experiment: empty tolerance ladder");
  for (std::size_t k = 0; k < tolerances.size(); ++k) {
    const double t = tolerances[k];
    if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorCode::InvalidInput, "experiment: tolerances must lie in (0, 1]");
    if (k > 0 && !(t < tolerances[k - 1])) {
      throw Error(ErrorCode::InvalidInput, "experiment: tolerances must be strictly descending");
    }
  }
}

bool ExperimentOutcome::all_hold() const {
  return std::all_of(rows.begin(), rows.end(), [](const ExperimentRow& r) { return r.holds; });
}

mvee::PointSet generate_points(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n < 2 || m < n + 1) {
    throw Error(ErrorCode::InvalidShape, "generate_points: need n >= 2 and m >= n + 1");
  }
  Xoshiro256 rng(seed);
  NormalSampler normal;
  std::vector<double> coords(n * m);
  for (double& v : coords) v = normal(rng);
  return mvee::PointSet(n, std::move(coords));
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const mvee::PointSet& points) {
  cfg.validate();
  if (points.dim() != cfg.dim) {
    throw Error(ErrorCode::DimensionMismatch, "experiment: point dimension differs from config");
  }

  const std::size_t rungs = cfg.tolerances.size();
  ExperimentOutcome outcome;
  outcome.reports.resize(rungs);
  std::vector<std::string> errors(rungs);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < rungs; k = next++) {
      try {
        outcome.reports[k] = mvee::solve_mvee(points, cfg.tolerances[k], cfg.max_iters);
      } catch (const std::exception& e) {
        errors[k] = describe(e);
      }
    }
  };
  const auto threads = static_cast<unsigned>(std::clamp<std::size_t>(cfg.threads, 1, rungs));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t k = 0; k < rungs; ++k) {
    if (!errors[k].empty()) {
      outcome.failure = "rung delta=" + io::format_real(cfg.tolerances[k]) + ": " + errors[k];
      break;
    }
  }
  const auto& reference = outcome.reports.back();
  if (!reference) return outcome;

  const auto& x_star = reference->ellipsoid.x;
  for (std::size_t k = 0; k + 1 < rungs; ++k) {
    const auto& report = outcome.reports[k];
    if (!report) continue;
    ExperimentRow row;
    row.delta = cfg.tolerances[k];
    const auto gap = mvee::optimality_gap(*report, *reference);
    row.epsilon = gap.epsilon;
    row.epsilon_clamped = gap.clamped;
    row.normalized_error = mvee::normalized_error(report->ellipsoid.x, x_star);
    row.bound_exact = std::sqrt(cert::g_exact(row.epsilon));
    row.bound_closed = closed_form_ratio(row.epsilon);
    row.holds = row.normalized_error <= row.bound_closed + kHoldsSlack;
    row.trace_q = cert::q_diagnostics(x_star, report->ellipsoid.x).trace;
    outcome.rows.push_back(row);
  }
  return outcome;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, generate_points(cfg.dim, cfg.count, cfg.seed));
}

std::string rows_csv(const ExperimentOutcome& outcome) {
  std::string out = "delta,epsilon,normalized_error,bound_exact,bound_closed,holds\n";
  for (const auto& r : outcome.rows) {
    out += io::format_real(r.delta) + ',' + io::format_real(r.epsilon) + ',' + io::format_real(r.normalized_error) +
           ',' + io::format_real(r.bound_exact) + ',' + io::format_real(r.bound_closed) + ',' +
           (r.holds ? "true" : "false") + '\n';
  }
  if (outcome.failure) out += "# failure: " + *outcome.failure + '\n';
  return out;
}

std::string rows_json(const ExperimentOutcome& outcome) {
  using nlohmann::json;
  auto real = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json rows = json::array();
  for (const auto& r : outcome.rows) {
    rows.push_back(json{{"delta", real(r.delta)},
                        {"epsilon", real(r.epsilon)},
                        {"normalized_error", real(r.normalized_error)},
                        {"bound_exact", real(r.bound_exact)},
                        {"bound_closed", real(r.bound_closed)},
                        {"holds", r.holds},
                        {"trace_q", real(r.trace_q)}});
  }
  json doc{{"rows", std::move(rows)}};
  doc["failure"] = outcome.failure ? json(*outcome.failure) : json(nullptr);
  return doc.dump(2) + '\n';
}

unsigned worker_cap_from_env() {
  const char* raw = std::getenv("MAXDET_CERTIFY_THREADS");
  if (raw == nullptr || *raw == '\0') return 1;
  char* end = nullptr;
  const unsigned long v = std::strtoul(raw, &end, 10);
  if (*end != '\0' || v == 0) return 1;
  return static_cast<unsigned>(std::min<unsigned long>(v, 256));
}

}  // namespace maxdet::cli
