#pragma once

#include "edrvfl/errors.hpp"
#include "edrvfl/linalg.hpp"

namespace edrvfl::solvers {

enum class Activation { Relu, Sigmoid, Tanh };

// Per-column statistics frozen at fit time. Population variance (divisor m).
struct BatchNormStats {
  Vector mu;
  Vector sigma2;
  double epsilon = 1e-5;

  bool fitted() const { return mu.size() > 0; }
};

struct BatchNormParams {
  double gamma = 1.0;
  double alpha = 0.0;
};

// Diagonal of the m x m weighting matrix used by the weighted ridge solve.
// Entries are non-negative; the update rule keeps the sum equal to m.
struct SampleWeights {
  Vector w;

  Eigen::Index size() const { return w.size(); }
  static SampleWeights ones(Eigen::Index m) { return {Vector::Ones(m)}; }
};

// beta = (D^T D + lambda I)^-1 D^T Y, solved through an LDLT factorization
// of the regularized Gram matrix plus one refinement step. Throws
// SingularSystem when the residual of the normal equations cannot be driven
// below 1e-8 * max(1, max|D^T Y|).
Matrix solve_ridge_primal(const Matrix& d, const Matrix& y, double lambda);

// beta = D^T (D D^T + lambda I)^-1 Y.
Matrix solve_ridge_dual(const Matrix& d, const Matrix& y, double lambda);

// Primal when columns <= rows, dual otherwise.
Matrix solve_ridge_auto(const Matrix& d, const Matrix& y, double lambda);

// beta = (D^T W D + lambda I)^-1 D^T W Y with W = diag(weights), or the
// equivalent symmetric dual form; dispatched by shape like solve_ridge_auto.
Matrix solve_weighted_ridge(const Matrix& d, const Matrix& y, double lambda,
                            const SampleWeights& weights);

// Minimum-norm least-squares solution beta = D^+ Y.
Matrix solve_pseudoinverse(const Matrix& d, const Matrix& y);

Matrix apply_activation(Matrix h, Activation kind);

BatchNormStats batch_norm_fit(const Matrix& h, double epsilon);

// y = gamma * (x - mu) / sqrt(sigma2 + epsilon) + alpha, per column.
Matrix batch_norm_apply(const Matrix& h, const BatchNormStats& stats,
                        const BatchNormParams& params);

namespace detail {

// Solves (gram + lambda I) X = rhs. All ridge paths funnel through this so
// that callers which cache the Gram matrix get bitwise-identical results.
Matrix ridge_solve_spd(const Matrix& gram, const Matrix& rhs, double lambda,
                       double residual_scale);

void check_solve_inputs(const Matrix& d, const Matrix& y);

}  // namespace detail

}  // namespace edrvfl::solvers
