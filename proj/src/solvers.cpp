#include "edrvfl/solvers.hpp"

#include <cmath>

namespace edrvfl::solvers {

namespace detail {

void check_solve_inputs(const Matrix& d, const Matrix& y) {
  if (d.rows() != y.rows()) {
    throw DimensionMismatch("design matrix has " + std::to_string(d.rows()) +
                            " rows but target matrix has " +
                            std::to_string(y.rows()));
  }
  if (d.size() == 0 || y.size() == 0) {
    throw EmptyMatrix("solve requires non-empty design and target matrices");
  }
  if (!all_finite(d) || !all_finite(y)) {
    throw InvalidArgument("solve inputs must be finite");
  }
}

Matrix ridge_solve_spd(const Matrix& gram, const Matrix& rhs, double lambda,
                       double residual_scale) {
  Matrix a = gram;
  a.diagonal().array() += lambda;

  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) {
    throw SingularSystem("regularized Gram matrix could not be factorized");
  }
  Matrix x = ldlt.solve(rhs);
  // One refinement step tightens the residual for ill-conditioned systems.
  Matrix r = rhs - a * x;
  x += ldlt.solve(r);
  r.noalias() = rhs - a * x;

  const double tol = 1e-8 * std::max(1.0, residual_scale);
  if (!x.allFinite() || max_abs(r) > tol) {
    throw SingularSystem(
        "normal equations residual " + std::to_string(max_abs(r)) +
        " exceeds tolerance; system is numerically singular");
  }
  return x;
}

}  // namespace detail

Matrix solve_ridge_primal(const Matrix& d, const Matrix& y, double lambda) {
  detail::check_solve_inputs(d, y);
  if (lambda < 0.0) throw InvalidArgument("lambda must be non-negative");
  const Matrix g = gram(d);
  const Matrix rhs = d.transpose() * y;
  return detail::ridge_solve_spd(g, rhs, lambda, max_abs(rhs));
}

Matrix solve_ridge_dual(const Matrix& d, const Matrix& y, double lambda) {
  detail::check_solve_inputs(d, y);
  if (lambda < 0.0) throw InvalidArgument("lambda must be non-negative");
  const Matrix g = gram_outer(d);
  const Matrix alpha = detail::ridge_solve_spd(g, y, lambda, max_abs(y));
  return d.transpose() * alpha;
}

Matrix solve_ridge_auto(const Matrix& d, const Matrix& y, double lambda) {
  return d.cols() <= d.rows() ? solve_ridge_primal(d, y, lambda)
                              : solve_ridge_dual(d, y, lambda);
}

Matrix solve_weighted_ridge(const Matrix& d, const Matrix& y, double lambda,
                            const SampleWeights& weights) {
  detail::check_solve_inputs(d, y);
  if (lambda < 0.0) throw InvalidArgument("lambda must be non-negative");
  if (weights.size() != d.rows()) {
    throw DimensionMismatch("weight vector length " +
                            std::to_string(weights.size()) +
                            " does not match row count " +
                            std::to_string(d.rows()));
  }
  if ((weights.w.array() < 0.0).any()) {
    throw NegativeWeight("sample weights must be non-negative");
  }

  // Row-scaling by sqrt(w) turns the weighted problem into a plain ridge
  // solve and keeps both Gram forms symmetric (the printed dual form with a
  // one-sided W is equivalent for strictly positive weights but is not).
  const Vector sqrt_w = weights.w.array().sqrt();
  const Matrix ds = sqrt_w.asDiagonal() * d;
  const Matrix ys = sqrt_w.asDiagonal() * y;

  if (d.cols() <= d.rows()) {
    const Matrix g = gram(ds);
    const Matrix rhs = ds.transpose() * ys;
    return detail::ridge_solve_spd(g, rhs, lambda, max_abs(rhs));
  }
  const Matrix g = gram_outer(ds);
  const Matrix alpha = detail::ridge_solve_spd(g, ys, lambda, max_abs(ys));
  return ds.transpose() * alpha;
}

Matrix solve_pseudoinverse(const Matrix& d, const Matrix& y) {
  detail::check_solve_inputs(d, y);
  return d.completeOrthogonalDecomposition().solve(y);
}

Matrix apply_activation(Matrix h, Activation kind) {
  switch (kind) {
    case Activation::Relu:
      h = h.cwiseMax(0.0);
      break;
    case Activation::Sigmoid:
      h = ((-h.array()).exp() + 1.0).inverse().matrix();
      break;
    case Activation::Tanh:
      h = h.array().tanh().matrix();
      break;
  }
  return h;
}

BatchNormStats batch_norm_fit(const Matrix& h, double epsilon) {
  if (h.rows() < 1 || h.cols() < 1) {
    throw EmptyMatrix("batch_norm_fit requires at least one row and column");
  }
  if (!(epsilon > 0.0)) {
    throw InvalidArgument("epsilon must be positive");
  }
  BatchNormStats stats;
  stats.epsilon = epsilon;
  stats.mu = h.colwise().mean();
  const Matrix centered = h.rowwise() - stats.mu.transpose();
  stats.sigma2 = centered.array().square().colwise().sum().transpose() /
                 static_cast<double>(h.rows());
  return stats;
}

Matrix batch_norm_apply(const Matrix& h, const BatchNormStats& stats,
                        const BatchNormParams& params) {
  if (!stats.fitted()) {
    throw StatsNotFitted("batch norm statistics have not been fitted");
  }
  if (h.cols() != stats.mu.size()) {
    throw DimensionMismatch("matrix has " + std::to_string(h.cols()) +
                            " columns but stats were fitted on " +
                            std::to_string(stats.mu.size()));
  }
  const Vector inv_std =
      (stats.sigma2.array() + stats.epsilon).sqrt().inverse();
  Matrix out = h.rowwise() - stats.mu.transpose();
  out = out.array().rowwise() * inv_std.transpose().array();
  out = out * params.gamma;
  out.array() += params.alpha;
  return out;
}

}  // namespace edrvfl::solvers
