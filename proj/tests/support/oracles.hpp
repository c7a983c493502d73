// Independent brute-force oracles for the solver contracts. These
// deliberately avoid the library's Gram/LDLT path: products are written as
// plain triple loops and systems are solved with a full-pivot LU.
#pragma once

#include <Eigen/Dense>
#include <random>

namespace oracles {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix naive_mul(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (Eigen::Index t = 0; t < a.cols(); ++t) sum += a(i, t) * b(t, j);
      out(i, j) = sum;
    }
  }
  return out;
}

// beta from the normal equations (D^T D + lambda I) beta = D^T Y.
inline Matrix ridge_normal_equations(const Matrix& d, const Matrix& y,
                                     double lambda) {
  Matrix g = naive_mul(d.transpose(), d);
  g.diagonal().array() += lambda;
  const Matrix rhs = naive_mul(d.transpose(), y);
  return Eigen::FullPivLU<Matrix>(g).solve(rhs);
}

// Stationarity of sum_i w_i ||d_i beta - y_i||^2 + lambda ||beta||^2:
// (sum_i w_i d_i d_i^T + lambda I) beta = sum_i w_i d_i y_i^T.
inline Matrix weighted_ridge_stationarity(const Matrix& d, const Matrix& y,
                                          double lambda, const Vector& w) {
  Matrix g = Matrix::Zero(d.cols(), d.cols());
  Matrix rhs = Matrix::Zero(d.cols(), y.cols());
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index a = 0; a < d.cols(); ++a) {
      for (Eigen::Index b = 0; b < d.cols(); ++b) {
        g(a, b) += w(i) * d(i, a) * d(i, b);
      }
      for (Eigen::Index c = 0; c < y.cols(); ++c) {
        rhs(a, c) += w(i) * d(i, a) * y(i, c);
      }
    }
  }
  g.diagonal().array() += lambda;
  return Eigen::FullPivLU<Matrix>(g).solve(rhs);
}

// Minimum-norm least squares via an explicit SVD expansion.
inline Matrix pinv_solve_svd(const Matrix& d, const Matrix& y) {
  Eigen::JacobiSVD<Matrix> svd(d,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double tol = 1e-12 * s.maxCoeff() *
                     static_cast<double>(std::max(d.rows(), d.cols()));
  Matrix out = Matrix::Zero(d.cols(), y.cols());
  for (Eigen::Index t = 0; t < s.size(); ++t) {
    if (s(t) <= tol) continue;
    out += svd.matrixV().col(t) *
           (svd.matrixU().col(t).transpose() * y) / s(t);
  }
  return out;
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows,
                            Eigen::Index cols, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

inline Matrix random_one_hot(std::mt19937_64& rng, Eigen::Index rows, int k) {
  std::uniform_int_distribution<int> dist(0, k - 1);
  Matrix y = Matrix::Zero(rows, k);
  for (Eigen::Index i = 0; i < rows; ++i) y(i, dist(rng)) = 1.0;
  return y;
}

}  // namespace oracles
