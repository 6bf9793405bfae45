#include "maxdet/lambert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "maxdet/error.hpp"

namespace maxdet::lambert {

namespace {

// e split into a double and its rounding remainder, for computing e*x + 1
// without losing the leading digits near the branch point.
constexpr double kEHi = 2.718281828459045;
constexpr double kELo = 1.4456468917292502e-16;

constexpr double kDomainSlack = 1e-14;
constexpr double kSeriesCutoff = 1e-12;
constexpr int kMaxIterations = 50;
constexpr double kStepTolerance = 1e-15;

[[noreturn]] void out_of_domain(const char* fn, double x) {
  throw Error(ErrorCode::OutOfDomain, std::string(fn) + ": argument " + std::to_string(x) +
                                          " outside the real domain");
}

// e*x + 1 with the product carried in extra precision.
double shifted(double x) { return std::fma(kEHi, x, 1.0) + kELo * x; }

// e*x, same treatment.
double scaled(double x) { return std::fma(kEHi, x, kELo * x); }

double residual_of(double w, double x) { return std::abs(std::fma(w, std::exp(w), -x)); }

void check_lower_domain(const char* fn, double x) {
  if (!(x >= -kInvE * (1.0 + kDomainSlack))) out_of_domain(fn, x);
}

// Branch-point expansion in p = sqrt(2 (e x + 1)); sign = +1 for W0, -1 for W-1.
double branch_series(double p, double sign) {
  const double q = sign * p;
  return -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q * q * q;
}

double halley(double w, double x) {
  for (int it = 0; it < kMaxIterations; ++it) {
    const double ew = std::exp(w);
    const double f = std::fma(w, ew, -x);
    if (f == 0.0) break;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) break;
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= kStepTolerance * (1.0 + std::abs(w))) break;
  }
  return w;
}

// Newton on w + log(w) = log(x) for x > e, where w e^w is well scaled only in logs.
double newton_log_form(double w, double x) {
  const double lx = std::log(x);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double g = w + std::log(w) - lx;
    const double step = g / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= kStepTolerance * (1.0 + std::abs(w))) break;
  }
  return w;
}

// Walk a few ulps toward the smallest defining-equation residual.
double polish(double w, double x, double lo, double hi) {
  double best = residual_of(w, x);
  for (int step = 0; step < 8; ++step) {
    const double up = std::nextafter(w, hi);
    const double down = std::nextafter(w, lo);
    const double r_up = up <= hi ? residual_of(up, x) : best;
    const double r_down = down >= lo ? residual_of(down, x) : best;
    if (r_up < best && r_up <= r_down) {
      w = up;
      best = r_up;
    } else if (r_down < best) {
      w = down;
      best = r_down;
    } else {
      break;
    }
  }
  return w;
}

LambertEval make_eval(Branch branch, double x, double w) {
  return LambertEval{branch, x, w, residual_of(w, x)};
}

// Shared body of the two bound formulas, given s = e x and t = e x + 1.
Interval bounds_from_shift(double s, double t) {
  if (t <= 0.0) return {-1.0, -1.0};
  const double r2 = std::sqrt(t);
  const double r3 = std::cbrt(t);
  // sqrt(t) - 1 and cbrt(t) - 1 rewritten to avoid cancellation as t -> 1.
  return {s / (r2 + 1.0), s / (r3 * r3 + r3 + 1.0)};
}

}  // namespace

LambertEval w0(double x) {
  check_lower_domain("w0", x);
  if (x == 0.0) return make_eval(Branch::Principal, x, 0.0);
  const double t = shifted(x);
  if (t <= 0.0) return make_eval(Branch::Principal, x, -1.0);
  if (t < kSeriesCutoff) return make_eval(Branch::Principal, x, branch_series(std::sqrt(2.0 * t), 1.0));

  double w;
  if (x > std::exp(1.0)) {
    const double l = std::log(x);
    w = newton_log_form(l - std::log(l), x);
  } else {
    const double seed = t < 0.25 ? branch_series(std::sqrt(2.0 * t), 1.0) : std::log1p(x);
    w = halley(seed, x);
  }
  w = polish(w, x, -1.0, std::numeric_limits<double>::max());
  return make_eval(Branch::Principal, x, std::max(w, -1.0));
}

LambertEval wm1(double x) {
  check_lower_domain("wm1", x);
  if (!(x < 0.0)) out_of_domain("wm1", x);
  const double t = shifted(x);
  if (t <= 0.0) return make_eval(Branch::MinusOne, x, -1.0);
  if (t < kSeriesCutoff) return make_eval(Branch::MinusOne, x, branch_series(std::sqrt(2.0 * t), -1.0));

  double seed;
  if (t < 0.25) {
    seed = branch_series(std::sqrt(2.0 * t), -1.0);
  } else {
    const double l = std::log(-x);
    seed = l - std::log(-l);
  }
  double w = halley(seed, x);
  w = polish(w, x, std::numeric_limits<double>::lowest(), -1.0);
  return make_eval(Branch::MinusOne, x, std::min(w, -1.0));
}

Interval w0_bounds(double x) {
  check_lower_domain("w0_bounds", x);
  if (!(x < 0.0)) out_of_domain("w0_bounds", x);
  return bounds_from_shift(scaled(x), shifted(x));
}

Interval w0_log_form_bounds(double u) {
  if (!(u >= 0.0)) out_of_domain("w0_log_form_bounds", u);
  return bounds_from_shift(-std::exp(-u), -std::expm1(-u));
}

Interval log_gap_bounds(double x) {
  if (!(x > -1.0 && x <= 0.0)) out_of_domain("log_gap_bounds", x);
  // 1 + x^3 = (1 + x)(1 - x + x^2) and 1 - x^2 = (1 + x)(1 - x).
  const double lower = -(std::log1p(x) + std::log1p(x * (x - 1.0)));
  const double upper = -(std::log1p(x) + std::log1p(-x));
  return {lower, upper};
}

double log_gap(double y) {
  if (!(y > -1.0)) out_of_domain("log_gap", y);
  if (std::abs(y) < 0.1) {
    // sum_{k>=2} (-1)^k y^k / k
    double term = y * y;
    double sum = 0.0;
    for (int k = 2; k < 60; ++k) {
      const double contribution = term / k;
      sum += contribution;
      if (std::abs(contribution) <= 1e-18 * std::abs(sum)) break;
      term *= -y;
    }
    return sum;
  }
  return y - std::log1p(y);
}

BranchRatio branch_ratio_inequality(double x) {
  const auto principal = w0(x);
  const auto lower = wm1(x);
  if (principal.w == -1.0 && lower.w == -1.0) return {0.0, 0.0};
  return {(principal.w + 1.0) / -principal.w, (lower.w + 1.0) / lower.w};
}

LogFormEval w0_log_form(double u) {
  if (!(u >= 0.0) || std::isinf(u)) {
    if (std::isinf(u)) return {u, -0.0, 1.0, true};
    out_of_domain("w0_log_form", u);
  }
  if (u == 0.0) return {u, -1.0, 0.0, false};

  if (u <= 1.0) {
    // Newton on log_gap(y) = u for y in (-1, 0), seeded from the branch series.
    const double p = std::sqrt(-2.0 * std::expm1(-u));
    double y = -(p - p * p / 3.0 + 11.0 / 72.0 * p * p * p);
    if (!(y > -1.0)) y = -0.5;
    for (int it = 0; it < kMaxIterations; ++it) {
      const double h = log_gap(y) - u;
      double next = y - h * (1.0 + y) / y;
      if (next <= -1.0) next = 0.5 * (y - 1.0);
      if (next >= 0.0) next = 0.5 * y;
      const double step = next - y;
      y = next;
      if (std::abs(step) <= 4e-16 * std::abs(y)) break;
    }
    return {u, -1.0 - y, -y, false};
  }

  const double x = -std::exp(-1.0 - u);
  if (x == 0.0) return {u, -0.0, 1.0, true};
  const bool subnormal = std::abs(x) < std::numeric_limits<double>::min();
  const double w = w0(x).w;
  return {u, w, 1.0 + w, subnormal};
}

}  // namespace maxdet::lambert
