#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "edrvfl/solvers.hpp"
#include "support/oracles.hpp"

using namespace edrvfl;
using namespace edrvfl::solvers;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("primal ridge identity and scalar cases") {
  const Matrix eye = Matrix::Identity(2, 2);
  CHECK(max_abs_diff(solve_ridge_primal(eye, eye, 0.0), eye) < 1e-12);

  Matrix d(2, 1);
  d << 1.0, 2.0;
  Matrix y(2, 1);
  y << 1.0, 2.0;
  const Matrix beta = solve_ridge_primal(d, y, 1.0);
  CHECK(beta.rows() == 1);
  CHECK(beta(0, 0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("primal ridge matches the normal-equation oracle") {
  std::mt19937_64 rng(101);
  const Matrix d = oracles::random_matrix(rng, 20, 5);
  const Matrix y = oracles::random_matrix(rng, 20, 3);
  const Matrix beta = solve_ridge_primal(d, y, 0.1);
  const Matrix expected = oracles::ridge_normal_equations(d, y, 0.1);
  CHECK(max_abs_diff(beta, expected) <= 1e-8);
}

TEST_CASE("primal ridge residual contract") {
  std::mt19937_64 rng(7);
  const Matrix d = oracles::random_matrix(rng, 30, 8);
  const Matrix y = oracles::random_matrix(rng, 30, 2);
  for (double lambda : {0.0, 0.5, 10.0}) {
    const Matrix beta = solve_ridge_primal(d, y, lambda);
    Matrix g = d.transpose() * d;
    g.diagonal().array() += lambda;
    const Matrix rhs = d.transpose() * y;
    const double bound = 1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff());
    CHECK((g * beta - rhs).cwiseAbs().maxCoeff() <= bound);
  }
}

TEST_CASE("dual ridge trivial cases and wide-matrix cross check") {
  const Matrix eye = Matrix::Identity(2, 2);
  CHECK(max_abs_diff(solve_ridge_dual(eye, eye, 0.0), eye) < 1e-12);

  Matrix d(2, 1);
  d << 1.0, 2.0;
  Matrix y(2, 1);
  y << 1.0, 2.0;
  CHECK(solve_ridge_dual(d, y, 1.0)(0, 0) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-12));

  std::mt19937_64 rng(11);
  const Matrix wide = oracles::random_matrix(rng, 5, 20);
  const Matrix targets = oracles::random_matrix(rng, 5, 2);
  CHECK(max_abs_diff(solve_ridge_dual(wide, targets, 0.5),
                     solve_ridge_primal(wide, targets, 0.5)) <= 1e-8);
}

TEST_CASE("auto dispatch: tall goes primal, wide goes dual, square primal") {
  std::mt19937_64 rng(13);
  const Matrix tall = oracles::random_matrix(rng, 10, 3);
  const Matrix y_tall = oracles::random_matrix(rng, 10, 2);
  CHECK(max_abs_diff(solve_ridge_auto(tall, y_tall, 0.3),
                     solve_ridge_primal(tall, y_tall, 0.3)) == 0.0);

  const Matrix wide = oracles::random_matrix(rng, 3, 10);
  const Matrix y_wide = oracles::random_matrix(rng, 3, 2);
  CHECK(max_abs_diff(solve_ridge_auto(wide, y_wide, 0.3),
                     solve_ridge_dual(wide, y_wide, 0.3)) == 0.0);

  const Matrix square = oracles::random_matrix(rng, 5, 5);
  const Matrix y_sq = oracles::random_matrix(rng, 5, 2);
  CHECK(max_abs_diff(solve_ridge_auto(square, y_sq, 0.3),
                     solve_ridge_primal(square, y_sq, 0.3)) == 0.0);
}

TEST_CASE("primal and dual agree on random full-rank instances") {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> dim(1, 50);
  int done = 0;
  while (done < 120) {
    const int m = dim(rng);
    const int f = dim(rng);
    const Matrix d = oracles::random_matrix(rng, m, f);
    const Matrix y = oracles::random_matrix(rng, m, 3);
    const double lambda = std::pow(10.0, -2 + (done % 5));
    const Matrix p = solve_ridge_primal(d, y, lambda);
    const Matrix q = solve_ridge_dual(d, y, lambda);
    CHECK(max_abs_diff(p, q) <=
          1e-8 * (1.0 + p.cwiseAbs().maxCoeff()));
    ++done;
  }
}

TEST_CASE("ridge shrinkage is monotone in lambda") {
  std::mt19937_64 rng(99);
  const Matrix d = oracles::random_matrix(rng, 25, 10);
  const Matrix y = oracles::random_matrix(rng, 25, 4);
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double norm = solve_ridge_primal(d, y, lambda).norm();
    CHECK(norm <= previous + 1e-12);
    previous = norm;
  }
}

TEST_CASE("singular system at lambda zero is reported") {
  Matrix d(2, 2);
  d << 1.0, 1.0, 2.0, 2.0;  // rank 1
  Matrix y(2, 2);
  y << 1.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(solve_ridge_primal(d, y, 0.0), SingularSystem);
  CHECK_NOTHROW(solve_ridge_primal(d, y, 0.5));
}

TEST_CASE("solver input validation") {
  const Matrix d = Matrix::Identity(3, 3);
  const Matrix y = Matrix::Ones(4, 2);
  CHECK_THROWS_AS(solve_ridge_primal(d, y, 1.0), DimensionMismatch);
  CHECK_THROWS_AS(solve_ridge_dual(d, y, 1.0), DimensionMismatch);
  CHECK_THROWS_AS(solve_ridge_primal(d, Matrix::Ones(3, 1), -1.0),
                  InvalidArgument);
  Matrix bad = d;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_ridge_primal(bad, Matrix::Ones(3, 1), 1.0),
                  InvalidArgument);
}

TEST_CASE("weighted ridge: unit weights collapse to the plain solver") {
  std::mt19937_64 rng(21);
  const Matrix d = oracles::random_matrix(rng, 12, 4);
  const Matrix y = oracles::random_matrix(rng, 12, 3);
  const SampleWeights ones = SampleWeights::ones(12);
  CHECK(max_abs_diff(solve_weighted_ridge(d, y, 0.7, ones),
                     solve_ridge_auto(d, y, 0.7)) <= 1e-10);

  const Matrix wide = oracles::random_matrix(rng, 4, 12);
  const Matrix y_wide = oracles::random_matrix(rng, 4, 2);
  CHECK(max_abs_diff(solve_weighted_ridge(wide, y_wide, 0.7,
                                          SampleWeights::ones(4)),
                     solve_ridge_auto(wide, y_wide, 0.7)) <= 1e-10);
}

TEST_CASE("weighted ridge scalar case and oracle") {
  Matrix d(1, 1);
  d << 1.0;
  Matrix y(1, 1);
  y << 2.0;
  SampleWeights w;
  w.w = Vector::Constant(1, 3.0);
  CHECK(solve_weighted_ridge(d, y, 0.0, w)(0, 0) ==
        doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937_64 rng(31);
  const Matrix design = oracles::random_matrix(rng, 30, 4);
  const Matrix targets = oracles::random_matrix(rng, 30, 2);
  std::uniform_real_distribution<double> wdist(1e-6, 3.0);
  SampleWeights weights;
  weights.w.resize(30);
  for (int i = 0; i < 30; ++i) weights.w(i) = wdist(rng);
  const Matrix beta = solve_weighted_ridge(design, targets, 0.4, weights);
  const Matrix expected = oracles::weighted_ridge_stationarity(
      design, targets, 0.4, weights.w);
  CHECK(max_abs_diff(beta, expected) <= 1e-8);
}

TEST_CASE("weighted ridge dual form agrees with primal") {
  std::mt19937_64 rng(41);
  const Matrix wide = oracles::random_matrix(rng, 6, 25);
  const Matrix y = oracles::random_matrix(rng, 6, 2);
  std::uniform_real_distribution<double> wdist(0.1, 2.0);
  SampleWeights weights;
  weights.w.resize(6);
  for (int i = 0; i < 6; ++i) weights.w(i) = wdist(rng);
  // wide input dispatches to the dual path; oracle solves the primal form
  const Matrix beta = solve_weighted_ridge(wide, y, 0.9, weights);
  const Matrix expected =
      oracles::weighted_ridge_stationarity(wide, y, 0.9, weights.w);
  CHECK(max_abs_diff(beta, expected) <= 1e-8);
}

TEST_CASE("weighted ridge rejects bad weights") {
  const Matrix d = Matrix::Identity(3, 3);
  const Matrix y = Matrix::Ones(3, 2);
  SampleWeights w;
  w.w = Vector::Ones(3);
  w.w(1) = -0.5;
  CHECK_THROWS_AS(solve_weighted_ridge(d, y, 1.0, w), NegativeWeight);
  SampleWeights short_w;
  short_w.w = Vector::Ones(2);
  CHECK_THROWS_AS(solve_weighted_ridge(d, y, 1.0, short_w),
                  DimensionMismatch);
}

TEST_CASE("pseudoinverse: identity, exact fit, minimum norm") {
  std::mt19937_64 rng5(5);
  const Matrix eye = Matrix::Identity(3, 3);
  const Matrix y = oracles::random_matrix(rng5, 3, 2);
  CHECK(max_abs_diff(solve_pseudoinverse(eye, y), y) < 1e-12);

  Matrix d(2, 1);
  d << 1.0, 2.0;
  Matrix t(2, 1);
  t << 1.0, 2.0;
  CHECK(solve_pseudoinverse(d, t)(0, 0) ==
        doctest::Approx(1.0).epsilon(1e-12));

  Matrix deficient(2, 2);
  deficient << 1.0, 1.0, 2.0, 2.0;
  Matrix targets(2, 1);
  targets << 1.0, 2.0;
  const Matrix beta = solve_pseudoinverse(deficient, targets);
  const Matrix expected = oracles::pinv_solve_svd(deficient, targets);
  CHECK(max_abs_diff(beta, expected) <= 1e-9);
  // any perturbation along the null space with equal residual has a larger
  // norm than the minimum-norm solution
  Matrix null_dir(2, 1);
  null_dir << 1.0, -1.0;
  for (double t2 : {0.5, -0.5, 2.0}) {
    const Matrix other = beta + t2 * null_dir;
    const double res_beta = (deficient * beta - targets).norm();
    const double res_other = (deficient * other - targets).norm();
    CHECK(res_other == doctest::Approx(res_beta).epsilon(1e-9));
    CHECK(beta.norm() <= other.norm() + 1e-12);
  }
}

TEST_CASE("activations") {
  Matrix h(1, 3);
  h << -1.0, 0.0, 2.0;
  const Matrix relu = apply_activation(h, Activation::Relu);
  CHECK(relu(0, 0) == 0.0);
  CHECK(relu(0, 1) == 0.0);
  CHECK(relu(0, 2) == 2.0);
  // relu is idempotent
  CHECK((apply_activation(relu, Activation::Relu) - relu).norm() == 0.0);

  Matrix zero(1, 1);
  zero << 0.0;
  CHECK(apply_activation(zero, Activation::Sigmoid)(0, 0) ==
        doctest::Approx(0.5));
  CHECK(apply_activation(zero, Activation::Tanh)(0, 0) == 0.0);

  std::mt19937_64 rng(77);
  const Matrix wild = oracles::random_matrix(rng, 8, 8, 50.0);
  const Matrix squashed = apply_activation(wild, Activation::Sigmoid);
  CHECK(squashed.minCoeff() >= 0.0);
  CHECK(squashed.maxCoeff() <= 1.0);
}

TEST_CASE("batch norm fit") {
  Matrix h(3, 1);
  h << 1.0, 2.0, 3.0;
  const BatchNormStats stats = batch_norm_fit(h, 1e-5);
  CHECK(stats.mu(0) == doctest::Approx(2.0));
  CHECK(stats.sigma2(0) == doctest::Approx(2.0 / 3.0));

  Matrix constant(3, 1);
  constant << 5.0, 5.0, 5.0;
  const BatchNormStats cs = batch_norm_fit(constant, 1e-5);
  CHECK(cs.mu(0) == doctest::Approx(5.0));
  CHECK(cs.sigma2(0) == doctest::Approx(0.0));

  Matrix single(1, 1);
  single << 7.0;
  const BatchNormStats ss = batch_norm_fit(single, 1e-5);
  CHECK(ss.mu(0) == doctest::Approx(7.0));
  CHECK(ss.sigma2(0) == doctest::Approx(0.0));

  CHECK_THROWS_AS(batch_norm_fit(Matrix(0, 2), 1e-5), EmptyMatrix);
  CHECK_THROWS_AS(batch_norm_fit(h, 0.0), InvalidArgument);
}

TEST_CASE("batch norm apply") {
  Matrix h(3, 1);
  h << 1.0, 2.0, 3.0;
  BatchNormStats stats = batch_norm_fit(h, 1e-5);
  stats.epsilon = 1e-300;  // effectively zero for the closed-form check
  const Matrix plain = batch_norm_apply(h, stats, {1.0, 0.0});
  CHECK(plain(0, 0) == doctest::Approx(-1.22474).epsilon(1e-4));
  CHECK(plain(1, 0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(plain(2, 0) == doctest::Approx(1.22474).epsilon(1e-4));

  const Matrix scaled = batch_norm_apply(h, stats, {2.0, 1.0});
  CHECK(scaled(0, 0) == doctest::Approx(-1.44949).epsilon(1e-4));
  CHECK(scaled(1, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(scaled(2, 0) == doctest::Approx(3.44949).epsilon(1e-4));

  Matrix constant(3, 1);
  constant << 5.0, 5.0, 5.0;
  const BatchNormStats cs = batch_norm_fit(constant, 1e-5);
  const Matrix shifted = batch_norm_apply(constant, cs, {1.5, 0.25});
  for (int i = 0; i < 3; ++i) CHECK(shifted(i, 0) == doctest::Approx(0.25));

  CHECK_THROWS_AS(batch_norm_apply(Matrix::Ones(3, 2), cs, {1.0, 0.0}),
                  DimensionMismatch);
  CHECK_THROWS_AS(batch_norm_apply(h, BatchNormStats{}, {1.0, 0.0}),
                  StatsNotFitted);
}

TEST_CASE("batch norm self-normalization property") {
  std::mt19937_64 rng(123);
  const Matrix h = oracles::random_matrix(rng, 40, 6, 5.0);
  const double eps = 1e-5;
  const BatchNormStats stats = batch_norm_fit(h, eps);
  const Matrix normalized = batch_norm_apply(h, stats, {1.0, 0.0});
  for (int j = 0; j < 6; ++j) {
    const double mean = normalized.col(j).mean();
    CHECK(std::abs(mean) <= 1e-9);
    const double var =
        (normalized.col(j).array() - mean).square().sum() / 40.0;
    const double expected = stats.sigma2(j) / (stats.sigma2(j) + eps);
    CHECK(std::abs(var - expected) <= 1e-6);
  }
}
