#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "maxdet/linalg.hpp"

namespace maxdet::mvee {

// M points in R^N, stored row-major. Construction checks M >= N + 1
// (InvalidShape), finiteness (InvalidInput) and that the lifted points
// (y_i, 1) span R^{N+1} (DegeneratePoints).
class PointSet {
 public:
  PointSet(std::size_t dim, std::vector<double> coords);

  static PointSet from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t count() const noexcept { return count_; }
  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<const double> coords() const noexcept { return coords_; }

  // Applies y -> U y to every point.
  PointSet transformed(const linalg::Matrix& u) const;

 private:
  std::size_t dim_;
  std::size_t count_;
  std::vector<double> coords_;
};

// {y : ||x y - b||_2 <= 1}
struct Ellipsoid {
  linalg::SymMatrix x;
  std::vector<double> b;

  double residual(std::span<const double> y) const;
  double max_residual(const PointSet& pts) const;
};

struct SolveReport {
  Ellipsoid ellipsoid;
  std::size_t iterations = 0;
  double tolerance = 0.0;
  // max_i z_i^T M(u)^{-1} z_i / (N + 1) - 1 at termination.
  double khachiyan_gap = 0.0;
  double logdet_x = 0.0;
  bool converged = false;
  // Containment scale applied after recovery (1 when no rescale was needed).
  double inflation = 1.0;
};

std::size_t default_max_iters(const PointSet& pts);

// Minimum-volume enclosing ellipsoid by Frank-Wolfe with away steps on the
// lifted dual weights. Stops once the Khachiyan gap is <= delta. The reported
// ellipsoid is the best (largest log det) containment-inflated ellipsoid seen
// along the iteration path, so tighter delta never yields a worse ellipsoid.
// When max_iters runs out, converged is false and the incumbent is returned.
SolveReport solve_mvee(const PointSet& pts, double delta, std::size_t max_iters = 0);

struct Gap {
  double epsilon;
  bool clamped;  // the raw log-det difference was negative
};

// max(0, logdet_x(star) - logdet_x(f)).
Gap optimality_gap(const SolveReport& report_f, const SolveReport& report_star);

// ||x_star - x_f||_F / ||x_f||_2.
double normalized_error(const linalg::SymMatrix& x_f, const linalg::SymMatrix& x_star);

// Points with ||x y_i - b|| >= 1 - slack.
std::size_t support_count(const Ellipsoid& e, const PointSet& pts, double slack = 1e-6);

}  // namespace maxdet::mvee
