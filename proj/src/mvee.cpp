#include "maxdet/mvee.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "maxdet/error.hpp"

namespace maxdet::mvee {

namespace {

constexpr std::size_t kRefreshInterval = 10000;
constexpr double kRankTolerance = 1e-12;

using linalg::Matrix;
using linalg::SymMatrix;

// Dual state for the lifted points z_i = (y_i, 1): weights u on the simplex,
// M(u)^{-1}, the variances kappa_i = z_i^T M(u)^{-1} z_i and log det M(u).
class LiftedState {
 public:
  explicit LiftedState(const PointSet& pts)
      : m_(pts.count()), d_(pts.dim() + 1), z_(m_, d_), u_(m_, 1.0 / static_cast<double>(m_)),
        minv_(d_, d_), kappa_(m_), scratch_v_(d_), scratch_w_(m_) {
    for (std::size_t i = 0; i < m_; ++i) {
      const auto y = pts.point(i);
      std::copy(y.begin(), y.end(), z_.row(i).begin());
      z_(i, d_ - 1) = 1.0;
    }
    refresh();
  }

  std::size_t lifted_dim() const { return d_; }
  std::span<const double> weights() const { return u_; }
  std::span<const double> kappa() const { return kappa_; }
  double logdet() const { return logdet_; }

  void refresh() {
    SymMatrix moment(d_);
    Matrix acc(d_, d_);
    for (std::size_t i = 0; i < m_; ++i) {
      if (u_[i] == 0.0) continue;
      const auto zi = z_.row(i);
      for (std::size_t r = 0; r < d_; ++r)
        for (std::size_t c = r; c < d_; ++c) acc(r, c) += u_[i] * zi[r] * zi[c];
    }
    for (std::size_t r = 0; r < d_; ++r)
      for (std::size_t c = r; c < d_; ++c) moment.set(r, c, acc(r, c));
    const linalg::Cholesky chol(moment);
    logdet_ = chol.logdet();
    minv_ = chol.solve(Matrix::identity(d_));
    for (std::size_t i = 0; i < m_; ++i) kappa_[i] = quad(z_.row(i));
  }

  // u <- (1 - t) u + t e_j; t < 0 is an away step.
  void step(std::size_t j, double t) {
    const auto zj = z_.row(j);
    for (std::size_t r = 0; r < d_; ++r) {
      const auto row = minv_.row(r);
      scratch_v_[r] = std::inner_product(row.begin(), row.end(), zj.begin(), 0.0);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const auto zi = z_.row(i);
      scratch_w_[i] = std::inner_product(zi.begin(), zi.end(), scratch_v_.begin(), 0.0);
    }
    const double gamma = t / (1.0 - t);
    const double denom = 1.0 + gamma * kappa_[j];
    const double coef = gamma / denom;
    const double scale = 1.0 / (1.0 - t);
    for (std::size_t r = 0; r < d_; ++r) {
      for (std::size_t c = 0; c < d_; ++c) {
        minv_(r, c) = (minv_(r, c) - coef * scratch_v_[r] * scratch_v_[c]) * scale;
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      kappa_[i] = (kappa_[i] - coef * scratch_w_[i] * scratch_w_[i]) * scale;
    }
    logdet_ += static_cast<double>(d_) * std::log1p(-t) + std::log(denom);

    for (double& ui : u_) ui *= (1.0 - t);
    u_[j] += t;
    if (u_[j] < 0.0) u_[j] = 0.0;
  }

  void drop(std::size_t j) { u_[j] = 0.0; }

 private:
  double quad(std::span<const double> z) const {
    double s = 0.0;
    for (std::size_t r = 0; r < d_; ++r) {
      const auto row = minv_.row(r);
      s += z[r] * std::inner_product(row.begin(), row.end(), z.begin(), 0.0);
    }
    return s;
  }

  std::size_t m_;
  std::size_t d_;
  Matrix z_;
  std::vector<double> u_;
  Matrix minv_;
  std::vector<double> kappa_;
  double logdet_ = 0.0;
  std::vector<double> scratch_v_;
  std::vector<double> scratch_w_;
};

// log det X of the ellipsoid recovered from weights with moment log det
// 'logdet_m' and largest variance 'kappa_max', after inflation to containment.
double inflated_logdet(double logdet_m, double kappa_max, double n) {
  const double rho_sq = std::max(1.0, (kappa_max - 1.0) / n);
  return 0.5 * (-n * std::log(n) - logdet_m) - 0.5 * n * std::log(rho_sq);
}

Ellipsoid recover(const PointSet& pts, std::span<const double> u, double& inflation) {
  const std::size_t n = pts.dim();
  std::vector<double> centre(n, 0.0);
  Matrix second(n, n);
  for (std::size_t i = 0; i < pts.count(); ++i) {
    if (u[i] == 0.0) continue;
    const auto y = pts.point(i);
    for (std::size_t r = 0; r < n; ++r) {
      centre[r] += u[i] * y[r];
      for (std::size_t c = r; c < n; ++c) second(r, c) += u[i] * y[r] * y[c];
    }
  }
  SymMatrix scatter(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r; c < n; ++c) scatter.set(r, c, second(r, c) - centre[r] * centre[c]);

  auto shape = linalg::inverse_posdef(scatter);
  shape *= 1.0 / static_cast<double>(n);
  Ellipsoid e{linalg::sym_sqrt(shape), {}};
  e.b = e.x * std::span<const double>(centre);

  inflation = 1.0;
  const double rho = e.max_residual(pts);
  if (rho > 1.0) {
    inflation = rho;
    e.x *= 1.0 / rho;
    for (double& v : e.b) v /= rho;
  }
  return e;
}

}  // namespace

PointSet::PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), count_(0), coords_(std::move(coords)) {
  if (dim_ == 0 || coords_.size() % dim_ != 0) {
    throw Error(ErrorCode::InvalidShape, "PointSet: coordinate count is not a multiple of the dimension");
  }
  count_ = coords_.size() / dim_;
  if (count_ < dim_ + 1) {
    throw Error(ErrorCode::InvalidShape, "PointSet: need at least N + 1 = " + std::to_string(dim_ + 1) +
                                             " points, got " + std::to_string(count_));
  }
  if (!std::all_of(coords_.begin(), coords_.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::InvalidInput, "PointSet: non-finite coordinate");
  }

  // Lifted second moment must be nonsingular.
  const std::size_t d = dim_ + 1;
  Matrix gram(d, d);
  std::vector<double> z(d, 1.0);
  for (std::size_t i = 0; i < count_; ++i) {
    const auto y = point(i);
    std::copy(y.begin(), y.end(), z.begin());
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) gram(r, c) += z[r] * z[c];
  }
  const auto eig = linalg::eigh(SymMatrix::symmetrized(gram));
  if (!(eig.eigenvalues.front() > kRankTolerance * eig.eigenvalues.back())) {
    throw Error(ErrorCode::DegeneratePoints, "PointSet: points do not affinely span R^" + std::to_string(dim_));
  }
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::InvalidShape, "PointSet: no points");
  const std::size_t dim = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw Error(ErrorCode::InvalidShape, "PointSet: ragged rows");
    coords.insert(coords.end(), r.begin(), r.end());
  }
  return PointSet(dim, std::move(coords));
}

PointSet PointSet::transformed(const Matrix& u) const {
  if (u.rows() != dim_ || u.cols() != dim_) {
    throw Error(ErrorCode::DimensionMismatch, "PointSet::transformed: matrix is not N x N");
  }
  std::vector<double> out(coords_.size());
  for (std::size_t i = 0; i < count_; ++i) {
    const auto y = point(i);
    for (std::size_t r = 0; r < dim_; ++r) {
      const auto row = u.row(r);
      out[i * dim_ + r] = std::inner_product(row.begin(), row.end(), y.begin(), 0.0);
    }
  }
  return PointSet(dim_, std::move(out));
}

double Ellipsoid::residual(std::span<const double> y) const {
  const auto xy = x * y;
  double s = 0.0;
  for (std::size_t r = 0; r < xy.size(); ++r) {
    const double d = xy[r] - b[r];
    s += d * d;
  }
  return std::sqrt(s);
}

double Ellipsoid::max_residual(const PointSet& pts) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.count(); ++i) worst = std::max(worst, residual(pts.point(i)));
  return worst;
}

std::size_t default_max_iters(const PointSet& pts) { return 500 * pts.count() * pts.dim(); }

SolveReport solve_mvee(const PointSet& pts, double delta, std::size_t max_iters) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::InvalidInput, "solve_mvee: delta must lie in (0, 1]");
  }
  if (max_iters == 0) max_iters = default_max_iters(pts);

  const double n = static_cast<double>(pts.dim());
  LiftedState state(pts);
  const double d = static_cast<double>(state.lifted_dim());
  const std::size_t m = pts.count();

  std::vector<double> best_u(state.weights().begin(), state.weights().end());
  double best_value = -std::numeric_limits<double>::infinity();

  bool converged = false;
  double final_gap = 0.0;
  std::size_t iter = 0;
  std::size_t since_refresh = 0;
  while (true) {
    const auto kappa = state.kappa();
    std::size_t j_plus = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (kappa[i] > kappa[j_plus]) j_plus = i;
    const double k_plus = kappa[j_plus];
    const double gap = k_plus / d - 1.0;

    const double value = inflated_logdet(state.logdet(), k_plus, n);
    if (value > best_value) {
      best_value = value;
      std::copy(state.weights().begin(), state.weights().end(), best_u.begin());
    }

    if (gap <= delta) {
      if (since_refresh > 0) {
        // Confirm against a freshly factorised moment matrix.
        state.refresh();
        since_refresh = 0;
        continue;
      }
      converged = true;
      final_gap = gap;
      break;
    }
    if (iter >= max_iters) {
      final_gap = gap;
      break;
    }

    const auto u = state.weights();
    std::size_t j_minus = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (u[i] > 0.0 && (j_minus == m || kappa[i] < kappa[j_minus])) j_minus = i;
    }
    const double k_minus = kappa[j_minus];

    if (k_plus - d >= d - k_minus || u[j_minus] >= 1.0) {
      const double alpha = (k_plus - d) / (d * (k_plus - 1.0));
      state.step(j_plus, alpha);
    } else {
      const double cap = u[j_minus] / (1.0 - u[j_minus]);
      const double ideal = k_minus > 1.0 ? (d - k_minus) / (d * (k_minus - 1.0)) : cap;
      if (ideal >= cap) {
        state.step(j_minus, -cap);
        state.drop(j_minus);
      } else {
        state.step(j_minus, -ideal);
      }
    }
    ++iter;
    if (++since_refresh >= kRefreshInterval) {
      state.refresh();
      since_refresh = 0;
    }
  }

  double inflation = 1.0;
  auto ellipsoid = recover(pts, best_u, inflation);
  const double logdet_x = linalg::logdet_posdef(ellipsoid.x);
  return SolveReport{std::move(ellipsoid), iter, delta, final_gap, logdet_x, converged, inflation};
}

Gap optimality_gap(const SolveReport& report_f, const SolveReport& report_star) {
  if (report_f.ellipsoid.x.dim() != report_star.ellipsoid.x.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "optimality_gap: reports differ in dimension");
  }
  const double raw = report_star.logdet_x - report_f.logdet_x;
  return raw < 0.0 ? Gap{0.0, true} : Gap{raw, false};
}

double normalized_error(const linalg::SymMatrix& x_f, const linalg::SymMatrix& x_star) {
  if (x_f.dim() != x_star.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "normalized_error: matrices differ in dimension");
  }
  const double scale = linalg::spectral_norm(x_f);
  if (scale == 0.0) throw Error(ErrorCode::ZeroMatrix, "normalized_error: X_f is zero");
  return linalg::frobenius_norm(x_star - x_f) / scale;
}

std::size_t support_count(const Ellipsoid& e, const PointSet& pts, double slack) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < pts.count(); ++i)
    if (e.residual(pts.point(i)) >= 1.0 - slack) ++count;
  return count;
}

}  // namespace maxdet::mvee
