#pragma once

namespace maxdet::lambert {

enum class Branch { Principal, MinusOne };

// One evaluation of a real Lambert W branch. residual = |w e^w - x|.
struct LambertEval {
  Branch branch;
  double x;
  double w;
  double residual;
};

struct Interval {
  double lower;
  double upper;
};

struct BranchRatio {
  double lhs;  // (W0(x) + 1) / -W0(x)
  double rhs;  // (W-1(x) + 1) / W-1(x)
};

// W0 evaluated through its logarithmic parameterisation x = -e^{-1-u}.
// Both w and w + 1 are returned so callers near the branch point do not
// lose digits to cancellation.
struct LogFormEval {
  double u;
  double w;             // W0(-e^{-1-u}), in [-1, 0)
  double w_plus_one;    // 1 + w, in [0, 1)
  bool reduced_accuracy;  // -e^{-1-u} is subnormal or underflows to zero
};

inline constexpr double kInvE = 0.36787944117144232160;  // e^{-1}

// Principal branch, x >= -1/e. Arguments within a relative 1e-14 below -1/e
// are clamped onto the branch point.
LambertEval w0(double x);

// Lower branch, -1/e <= x < 0.
LambertEval wm1(double x);

// sqrt(e x + 1) - 1 <= W0(x) <= cbrt(e x + 1) - 1 on [-1/e, 0).
Interval w0_bounds(double x);

// The same bounds written in u for x = -e^{-1-u}:
// sqrt(1 - e^{-u}) - 1 <= W0(-e^{-1-u}) <= cbrt(1 - e^{-u}) - 1, u >= 0.
Interval w0_log_form_bounds(double u);

// -log(1 + x^3) <= x - log(1 + x) <= -log(1 - x^2) on (-1, 0].
Interval log_gap_bounds(double x);

// y - log(1 + y) for y > -1, accurate near y = 0.
double log_gap(double y);

BranchRatio branch_ratio_inequality(double x);

// W0(-e^{-1-u}) for u >= 0, i.e. -1 - y where y in (-1, 0] solves
// y - log(1 + y) = u.
LogFormEval w0_log_form(double u);

}  // namespace maxdet::lambert
