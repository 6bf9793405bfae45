// maxdet: Lambert W bound dumps, Frobenius certificates, MVEE solves and
// tolerance-ladder experiments.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "maxdet/certificate.hpp"
#include "maxdet/error.hpp"
#include "maxdet/experiment.hpp"
#include "maxdet/io.hpp"
#include "maxdet/lambert.hpp"
#include "maxdet/mvee.hpp"

namespace {

using namespace maxdet;

constexpr double kSandwichSlack = 1e-12;

struct Globals {
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    io::write_file(g.out, text);
  }
}

// --- lambert ---------------------------------------------------------------

struct LambertArgs {
  double from = -lambert::kInvE;
  double to = -1e-15;
  std::size_t points = 10000;
  std::string spacing = "linear";
};

std::vector<double> lambert_grid(const LambertArgs& a) {
  if (a.points == 0 || a.from > a.to) return {};
  if (a.from < -lambert::kInvE * (1.0 + 1e-14) || a.to >= 0.0) {
    throw Error(ErrorCode::OutOfDomain, "lambert: range must lie in [-1/e, 0)");
  }
  std::vector<double> xs(a.points);
  if (a.points == 1) {
    xs[0] = a.from;
    return xs;
  }
  const double n = static_cast<double>(a.points - 1);
  for (std::size_t k = 0; k < a.points; ++k) {
    const double t = static_cast<double>(k) / n;
    if (a.spacing == "log") {
      // Geometric in |x|, from 'from' towards zero.
      xs[k] = -std::exp(std::log(-a.from) + t * (std::log(-a.to) - std::log(-a.from)));
    } else {
      xs[k] = a.from + t * (a.to - a.from);
    }
  }
  xs.front() = a.from;
  xs.back() = a.to;
  return xs;
}

int cmd_lambert(const Globals& g, const LambertArgs& a) {
  const auto xs = lambert_grid(a);
  nlohmann::json rows = nlohmann::json::array();
  std::string csv = "x,w0,wm1,lower,upper,sandwich_ok\n";
  for (double x : xs) {
    const double w0 = lambert::w0(x).w;
    const double wm1 = lambert::wm1(x).w;
    const auto b = lambert::w0_bounds(x);
    const bool ok = b.lower - kSandwichSlack <= w0 && w0 <= b.upper + kSandwichSlack;
    if (g.format == "json") {
      rows.push_back({{"x", x}, {"w0", w0}, {"wm1", wm1}, {"lower", b.lower}, {"upper", b.upper}, {"sandwich_ok", ok}});
    } else {
      csv += io::format_real(x) + ',' + io::format_real(w0) + ',' + io::format_real(wm1) + ',' +
             io::format_real(b.lower) + ',' + io::format_real(b.upper) + ',' + (ok ? "true" : "false") + '\n';
    }
  }
  emit(g, g.format == "json" ? rows.dump(2) + '\n' : csv);
  return 0;
}

// --- certify ---------------------------------------------------------------

struct CertifyArgs {
  std::string xf;
  std::optional<double> epsilon;
  std::string xstar;
};

int cmd_certify(const Globals& g, const CertifyArgs& a) {
  const auto x_f = io::load_matrix(a.xf);
  const auto c = a.epsilon ? cert::frobenius_certificate(x_f, *a.epsilon)
                           : cert::frobenius_certificate(x_f, io::load_matrix(a.xstar));
  emit(g, io::certificate_json(c) + '\n');
  return 0;
}

// --- mvee ------------------------------------------------------------------

struct MveeArgs {
  std::string points_file;
  std::size_t dim = 0;
  std::size_t count = 0;
  double delta = 1e-8;
  std::size_t max_iters = 0;
  std::string points_out;
};

mvee::PointSet obtain_points(const std::string& file, std::size_t dim, std::size_t count, std::uint64_t seed) {
  if (!file.empty()) return io::load_points(file);
  return cli::generate_points(dim, count, seed);
}

int cmd_mvee(const Globals& g, const MveeArgs& a) {
  const auto pts = obtain_points(a.points_file, a.dim, a.count, g.seed);
  if (!a.points_out.empty()) io::write_file(a.points_out, io::points_csv(pts));
  const auto report = mvee::solve_mvee(pts, a.delta, a.max_iters);
  emit(g, io::report_json(report) + '\n');
  return report.converged ? 0 : 3;
}

// --- experiment ------------------------------------------------------------

struct ExperimentArgs {
  std::string points_file;
  std::size_t dim = 50;
  std::size_t count = 100;
  std::vector<double> tolerances = cli::default_ladder();
  std::size_t max_iters = 0;
};

int cmd_experiment(const Globals& g, const ExperimentArgs& a) {
  cli::ExperimentConfig cfg;
  cfg.seed = g.seed;
  cfg.tolerances = a.tolerances;
  cfg.output_path = g.out;
  cfg.format = g.format == "json" ? cli::Format::Json : cli::Format::Csv;
  cfg.threads = cli::worker_cap_from_env();
  cfg.max_iters = a.max_iters;

  cli::ExperimentOutcome outcome;
  if (!a.points_file.empty()) {
    const auto pts = io::load_points(a.points_file);
    cfg.dim = pts.dim();
    cfg.count = pts.count();
    outcome = cli::run_experiment(cfg, pts);
  } else {
    cfg.dim = a.dim;
    cfg.count = a.count;
    outcome = cli::run_experiment(cfg);
  }

  emit(g, cfg.format == cli::Format::Json ? cli::rows_json(outcome) : cli::rows_csv(outcome));
  if (outcome.failure) {
    std::cerr << io::error_json("ExperimentFailed", *outcome.failure) << '\n';
    return 2;
  }
  if (!outcome.all_hold()) {
    std::cerr << io::error_json("BoundViolated", "normalized error exceeds the closed-form bound on some rung") << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified Frobenius error bounds for maxdet problems"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "PRNG seed for generated point sets");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", g.out, "Write output here instead of stdout");

  LambertArgs la;
  auto* lambert_cmd = app.add_subcommand("lambert", "Tabulate W0, W-1 and the square/cube-root bounds on [-1/e, 0)");
  lambert_cmd->add_option("--from", la.from, "Grid start (default -1/e)");
  lambert_cmd->add_option("--to", la.to, "Grid end");
  lambert_cmd->add_option("--points", la.points, "Number of grid points");
  lambert_cmd->add_option("--spacing", la.spacing, "linear or log")->check(CLI::IsMember({"linear", "log"}));

  CertifyArgs ca;
  double epsilon = 0.0;
  auto* certify_cmd = app.add_subcommand("certify", "Frobenius error certificate for a feasible X_f");
  certify_cmd->add_option("--xf", ca.xf, "X_f matrix or ellipsoid JSON")->required()->check(CLI::ExistingFile);
  auto* gap_group = certify_cmd->add_option_group("gap", "Either the gap itself or a reference optimizer");
  auto* eps_opt = gap_group->add_option("--epsilon", epsilon, "Log-det optimality gap");
  gap_group->add_option("--xstar", ca.xstar, "Reference X* JSON; the gap is computed from it")
      ->check(CLI::ExistingFile);
  gap_group->require_option(1);

  MveeArgs ma;
  auto* mvee_cmd = app.add_subcommand("mvee", "Minimum-volume enclosing ellipsoid");
  auto* mvee_file = mvee_cmd->add_option("--points-file", ma.points_file, "CSV of points")->check(CLI::ExistingFile);
  auto* mvee_dim = mvee_cmd->add_option("--dim", ma.dim, "Dimension of generated points");
  mvee_cmd->add_option("--count", ma.count, "Number of generated points")->needs(mvee_dim);
  mvee_dim->excludes(mvee_file);
  mvee_cmd->add_option("--delta", ma.delta, "Khachiyan gap tolerance in (0, 1]");
  mvee_cmd->add_option("--max-iters", ma.max_iters, "Iteration cap (0: 500 M N)");
  mvee_cmd->add_option("--points-out", ma.points_out, "Also write the points used as CSV");

  ExperimentArgs ea;
  auto* exp_cmd = app.add_subcommand("experiment", "Tolerance ladder with bound validation");
  auto* exp_file = exp_cmd->add_option("--points-file", ea.points_file, "CSV of points")->check(CLI::ExistingFile);
  exp_cmd->add_option("--dim", ea.dim, "Dimension of generated points")->excludes(exp_file);
  exp_cmd->add_option("--count", ea.count, "Number of generated points")->excludes(exp_file);
  exp_cmd->add_option("--tolerances", ea.tolerances, "Strictly descending ladder; the last is the reference")
      ->delimiter(',');
  exp_cmd->add_option("--max-iters", ea.max_iters, "Iteration cap per rung (0: 500 M N)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*lambert_cmd) return cmd_lambert(g, la);
    if (*certify_cmd) {
      if (*eps_opt) ca.epsilon = epsilon;
      return cmd_certify(g, ca);
    }
    if (*mvee_cmd) {
      if (ma.points_file.empty() && (ma.dim == 0 || ma.count == 0)) {
        throw Error(ErrorCode::InvalidInput, "mvee: give --points-file or both --dim and --count");
      }
      return cmd_mvee(g, ma);
    }
    if (*exp_cmd) return cmd_experiment(g, ea);
  } catch (const Error& e) {
    std::cerr << io::error_json(e) << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << io::error_json("InternalError", e.what()) << '\n';
    return 2;
  }
  return 0;
}
