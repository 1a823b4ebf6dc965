#include <Eigen/Dense>
#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "oica/cumulants.hpp"
#include "oica/experiments.hpp"
#include "oica/recovery.hpp"

using namespace oica;

TEST_SUITE_BEGIN("recovery");

namespace {

// min over planted columns of the best |cos| against any recovered column,
// one-to-one via greedy assignment
double min_matched_cos(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& found) {
  REQUIRE(truth.cols() == found.cols());
  const int R = static_cast<int>(truth.cols());
  std::vector<bool> used(R, false);
  double worst = 1.0;
  for (int j = 0; j < R; ++j) {
    int pick = -1;
    double best = -1.0;
    for (int c = 0; c < R; ++c) {
      if (used[c]) continue;
      const double cos = std::abs(truth.col(j).normalized().dot(found.col(c).normalized()));
      if (cos > best) {
        best = cos;
        pick = c;
      }
    }
    used[pick] = true;
    worst = std::min(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("orthogonal diagonal tensor decomposes exactly") {
  Eigen::VectorXd e1(2), e2(2);
  e1 << 1, 0;
  e2 << 0, 1;
  const SymTen4 k4 = 6.0 * outer_fourth(e1) + 6.0 * outer_fourth(e2);
  RecoverConfig cfg;
  cfg.seed = 1;
  const Decomposition dec = decompose_k4(k4, 2, cfg);
  CHECK(min_matched_cos((Eigen::MatrixXd(2, 2) << 1, 0, 0, 1).finished(), dec.vectors) >
        1.0 - 1e-10);
  std::vector<double> lambdas{dec.lambdas[0], dec.lambdas[1]};
  std::sort(lambdas.begin(), lambdas.end());
  CHECK(lambdas[0] == doctest::Approx(6.0));
  CHECK(lambdas[1] == doctest::Approx(6.0));
}

TEST_CASE("first five columns of the 4x6 fixture are recovered") {
  Eigen::MatrixXd A = fixtures::id_4x6();
  for (int j = 0; j < 6; ++j) A.col(j) /= A.col(j).norm();
  const int R = 5;
  SymTen4 k4(4);
  for (int j = 0; j < R; ++j) k4 += outer_fourth(A.col(j));
  RecoverConfig cfg;
  cfg.seed = 3;
  const Decomposition dec = decompose_k4(k4, R, cfg);
  CHECK(min_matched_cos(A.leftCols(R), dec.vectors) >= 0.999);
}

TEST_CASE("generic 6x10 planted decomposition") {
  const MixingMatrix A = generate_mixing(6, 10, 2024);
  SymTen4 k4(6);
  for (int j = 0; j + 1 < 10; ++j) k4 += 6.0 * outer_fourth(A.col(j));
  RecoverConfig cfg;
  cfg.seed = 5;
  const Decomposition dec = decompose_k4(k4, 9, cfg);
  CHECK(min_matched_cos(A.matrix().leftCols(9), dec.vectors) >= 0.999);
}

TEST_CASE("auto rank detection on population input") {
  const MixingMatrix A = generate_mixing(6, 10, 77);
  SymTen4 k4(6);
  for (int j = 0; j + 1 < 10; ++j) k4 += 6.0 * outer_fourth(A.col(j));
  RecoverConfig cfg;
  cfg.seed = 6;
  const Decomposition dec = decompose_k4(k4, 0, cfg, Provenance::population);
  CHECK(dec.diag.subspace_rank == 9);
}

TEST_CASE("scaling equivariance of the decomposition") {
  const MixingMatrix A = generate_mixing(4, 5, 11);
  SymTen4 k4(4);
  for (int j = 0; j + 1 < 5; ++j) k4 += 6.0 * outer_fourth(A.col(j));
  RecoverConfig cfg;
  cfg.seed = 8;
  const double c = 3.25;
  const Decomposition d1 = decompose_k4(k4, 4, cfg);
  const Decomposition d2 = decompose_k4(c * k4, 4, cfg);
  // match columns pairwise and compare coefficients
  for (int r = 0; r < 4; ++r) {
    int pick = -1;
    double best = -1;
    for (int s = 0; s < 4; ++s) {
      const double cos = std::abs(d1.vectors.col(r).dot(d2.vectors.col(s)));
      if (cos > best) {
        best = cos;
        pick = s;
      }
    }
    CHECK(best > 1.0 - 1e-9);
    CHECK(d2.lambdas[pick] == doctest::Approx(c * d1.lambdas[r]).epsilon(1e-8));
  }
}

TEST_CASE("fixed-point validity of accepted vectors") {
  const MixingMatrix A = generate_mixing(5, 7, 31);
  SymTen4 k4(5);
  for (int j = 0; j + 1 < 7; ++j) k4 += 6.0 * outer_fourth(A.col(j));
  RecoverConfig cfg;
  cfg.seed = 9;
  const Decomposition dec = decompose_k4(k4, 6, cfg);
  for (int r = 0; r < dec.diag.column_residuals.size(); ++r) {
    CHECK(dec.diag.column_residuals[r] <= cfg.fixed_point_tol);
    CHECK(dec.diag.column_residuals[r] <= 1e-6);  // population inputs are exact
  }
}

TEST_CASE("gaussian column from the 4x6 fixture") {
  Eigen::MatrixXd A = fixtures::id_4x6();
  for (int j = 0; j < 6; ++j) A.col(j) /= A.col(j).norm();
  SymMat k2(4);
  for (int j = 0; j < 6; ++j) k2 += outer_square(A.col(j));
  RecoverConfig cfg;
  cfg.seed = 12;
  const GaussianColumnResult g = recover_gaussian_column(k2, A.leftCols(5), cfg);
  CHECK(std::abs(g.v.dot(A.col(5))) >= 0.999);
  CHECK(g.objective < 1e-7);
}

TEST_CASE("pure rank-one k2 with no known columns") {
  Eigen::VectorXd w(3);
  w << 1, -2, 0.5;
  const SymMat k2 = outer_square(w);
  RecoverConfig cfg;
  cfg.seed = 13;
  const GaussianColumnResult g = recover_gaussian_column(k2, Eigen::MatrixXd(3, 0), cfg);
  CHECK(std::abs(g.v.dot(w / w.norm())) > 1.0 - 1e-6);
}

TEST_CASE("k2 inside the known span has no gaussian column") {
  Eigen::MatrixXd known(2, 1);
  known << 1, 0;
  SymMat k2(2);
  k2.at(0, 0) = 2.0;
  RecoverConfig cfg;
  cfg.seed = 14;
  CHECK_THROWS_AS(recover_gaussian_column(k2, known, cfg), Error);
}

TEST_CASE("full recovery of the 4x6 fixture from population cumulants") {
  Eigen::MatrixXd A = fixtures::id_4x6();
  for (int j = 0; j < 6; ++j) A.col(j) /= A.col(j).norm();
  const SourceSpec spec = default_sweep_spec(Moments{1.0, 6.0}, 1.0, 6);
  const CumulantPair cp = population_cumulants(A, spec);
  RecoverConfig cfg;
  cfg.seed = 15;
  const RecoveryResult res = recover(cp, 6, cfg);
  const MixingMatrix truth(A);
  const MixingMatrix matched = greedy_match(truth, res.A_hat);
  CHECK(rel_frob_error(truth, matched) <= 0.01);
  CHECK(std::abs(res.A_hat.col(5).dot(A.col(5))) >= 0.999);
  CHECK(res.A_hat.is_normalized(1e-9));
}

TEST_CASE("residual certificate matches stored diagnostics") {
  const MixingMatrix A = generate_mixing(5, 7, 55);
  const SourceSpec spec = default_sweep_spec(Moments{1.0, 6.0}, 1.0, 7);
  const CumulantPair cp = population_cumulants(A.matrix(), spec);
  RecoverConfig cfg;
  cfg.seed = 16;
  const RecoveryResult res = recover(cp, 7, cfg);

  SymTen4 fit4(5);
  for (int r = 0; r < 6; ++r)
    fit4 += res.decomposition.lambdas[r] * outer_fourth(res.decomposition.vectors.col(r));
  const double k4_rel = frobenius_distance(cp.k4, fit4) / frobenius_norm(cp.k4);
  CHECK(std::abs(k4_rel - res.decomposition.diag.fit_residual_rel) < 1e-10);

  SymMat fit2(5);
  for (int j = 0; j < 7; ++j)
    fit2 += res.coefficients[j] * outer_square(res.A_hat.col(j));
  CHECK(std::abs(frobenius_distance(cp.k2, fit2) - res.objective) < 1e-10);
}

TEST_CASE("permutation invariance of recovery error") {
  const int I = 4, J = 6;
  const MixingMatrix A = generate_mixing(I, J, 91);
  const SourceSpec spec = default_sweep_spec(Moments{1.0, 6.0}, 1.0, J);

  Eigen::PermutationMatrix<Eigen::Dynamic> P(I);
  P.setIdentity();
  std::swap(P.indices()[0], P.indices()[2]);
  const Eigen::MatrixXd PA = P * A.matrix();

  RecoverConfig cfg;
  cfg.seed = 17;
  const RecoveryResult r1 = recover(population_cumulants(A.matrix(), spec), J, cfg);
  const RecoveryResult r2 = recover(population_cumulants(PA, spec), J, cfg);
  const double e1 = rel_frob_error(A, greedy_match(A, r1.A_hat));
  const double e2 = rel_frob_error(MixingMatrix(PA), greedy_match(MixingMatrix(PA), r2.A_hat));
  CHECK(std::abs(e1 - e2) < 1e-6);
}

TEST_CASE("decomposition failure carries partial results") {
  // noisy sample cumulants cannot meet an exact fixed-point certificate
  const MixingMatrix A = generate_mixing(3, 4, 5);
  const SourceSpec spec = default_sweep_spec(Exponential{1.0}, 1.0, 4);
  const CumulantPair cp = sample_cumulants(sample_mixture(A.matrix(), spec, 60, 5));
  RecoverConfig cfg;
  cfg.seed = 18;
  cfg.power_starts_per_vector = 5;
  cfg.fixed_point_tol = 1e-13;  // stricter than sampling noise allows
  try {
    decompose_k4(cp.k4, 3, cfg, Provenance::sample);
    FAIL("expected decomposition failure");
  } catch (const DecompositionFailure& e) {
    CHECK(e.partial().vectors.cols() < 3);
  }
}

TEST_SUITE_END();
