#pragma once

#include <Eigen/Dense>
#include <vector>

namespace edrvfl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using IntVector = Eigen::VectorXi;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

// D^T D via a symmetric rank update (half the flops of a plain product).
inline Matrix gram(const Matrix& d) {
  Matrix g = Matrix::Zero(d.cols(), d.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(d.transpose());
  g.triangularView<Eigen::StrictlyUpper>() =
      g.transpose().triangularView<Eigen::StrictlyUpper>();
  return g;
}

// D D^T
inline Matrix gram_outer(const Matrix& d) {
  Matrix g = Matrix::Zero(d.rows(), d.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(d);
  g.triangularView<Eigen::StrictlyUpper>() =
      g.transpose().triangularView<Eigen::StrictlyUpper>();
  return g;
}

inline Matrix hcat(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Row-wise argmax with ties resolved to the lowest column index.
inline int argmax_row(const Matrix& scores, Eigen::Index row) {
  int best = 0;
  double best_value = scores(row, 0);
  for (int j = 1; j < scores.cols(); ++j) {
    if (scores(row, j) > best_value) {
      best_value = scores(row, j);
      best = j;
    }
  }
  return best;
}

inline IntVector argmax_rows(const Matrix& scores) {
  IntVector labels(scores.rows());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    labels(i) = argmax_row(scores, i);
  }
  return labels;
}

inline Matrix take_rows(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  }
  return out;
}

inline IntVector take(const IntVector& v, const std::vector<int>& idx) {
  IntVector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  }
  return out;
}

}  // namespace edrvfl
