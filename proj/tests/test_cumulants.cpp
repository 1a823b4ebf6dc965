#include <Eigen/Dense>
#include <algorithm>

#include "doctest.h"
#include "oica/cumulants.hpp"
#include "oica/errors.hpp"
#include "oica/experiments.hpp"

using namespace oica;

TEST_SUITE_BEGIN("cumulants");

TEST_CASE("source moments") {
  auto [s2e, l4e] = source_moments(Exponential{1.0});
  CHECK(s2e == doctest::Approx(1.0));
  CHECK(l4e == doctest::Approx(6.0));

  auto [s2g, l4g] = source_moments(Gaussian{2.5});
  CHECK(s2g == doctest::Approx(2.5));
  CHECK(l4g == 0.0);

  auto [s2t, l4t] = source_moments(StudentT{5.0});
  CHECK(s2t == doctest::Approx(5.0 / 3.0));
  CHECK(l4t == doctest::Approx(50.0 / 3.0));

  CHECK_THROWS_AS(source_moments(StudentT{4.0}), Error);
}

TEST_CASE("population cumulants of an identity mixing") {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
  SourceSpec spec;
  spec.entries = {Exponential{1.0}, Gaussian{1.0}};
  const CumulantPair cp = population_cumulants(A, spec);
  CHECK(frobenius_distance(cp.k2, SymMat::from_full(Eigen::MatrixXd::Identity(2, 2))) < 1e-14);
  Eigen::VectorXd e1(2);
  e1 << 1, 0;
  CHECK(frobenius_distance(cp.k4, 6.0 * outer_fourth(e1)) < 1e-14);
}

TEST_CASE("zero fourth cumulants give a zero k4") {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
  SourceSpec spec;
  spec.entries = {Moments{1.0, 0.0}, Moments{1.0, 0.0}};
  const CumulantPair cp = population_cumulants(A, spec);
  CHECK(frobenius_norm(cp.k4) == 0.0);
  CHECK(frobenius_distance(cp.k2, SymMat::from_full(Eigen::MatrixXd::Identity(2, 2))) < 1e-14);
}

TEST_CASE("spec length mismatch is rejected") {
  SourceSpec spec;
  spec.entries = {Gaussian{1.0}};
  CHECK_THROWS_AS(population_cumulants(Eigen::MatrixXd::Identity(2, 2), spec), Error);
}

TEST_CASE("two Gaussians violate the model") {
  SourceSpec spec;
  spec.entries = {Gaussian{1.0}, Gaussian{1.0}};
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("sample cumulants of a two-point set") {
  Eigen::MatrixXd X(2, 1);
  X << 0, 2;
  const CumulantPair cp = sample_cumulants(X);
  // oracle: central moments by hand; mean 1, deviations {-1, 1}
  const double s2 = ((-1.0) * (-1.0) + 1.0 * 1.0) / 2.0;
  const double m4 = (1.0 + 1.0) / 2.0;
  CHECK(cp.k2(0, 0) == doctest::Approx(s2));
  CHECK(cp.k4(0, 0, 0, 0) == doctest::Approx(m4 - 3.0 * s2 * s2));
  CHECK(cp.k4(0, 0, 0, 0) == doctest::Approx(-2.0));
  CHECK(cp.provenance == Provenance::sample);
  CHECK(cp.sample_count == 2);
}

TEST_CASE("constant rows are degenerate") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(5, 3) * 4.2;
  const CumulantPair cp = sample_cumulants(X);
  CHECK(frobenius_norm(cp.k2) == 0.0);
  CHECK(frobenius_norm(cp.k4) == 0.0);
}

TEST_CASE("sample errors") {
  Eigen::MatrixXd X(1, 2);
  X << 1, 2;
  CHECK_THROWS_AS(sample_cumulants(X), Error);
  Eigen::MatrixXd Y(3, 1);
  Y << 1, std::numeric_limits<double>::quiet_NaN(), 2;
  CHECK_THROWS_AS(sample_cumulants(Y), Error);
}

TEST_CASE("monte carlo fourth cumulant of exp(1)") {
  Rng rng(123);
  Eigen::MatrixXd X(1000000, 1);
  for (long t = 0; t < X.rows(); ++t) X(t, 0) = rng.exponential(1.0);
  const CumulantPair cp = sample_cumulants(X);
  CHECK(std::abs(cp.k4(0, 0, 0, 0) - 6.0) < 0.3);
  CHECK(std::abs(cp.k2(0, 0) - 1.0) < 0.05);
}

TEST_CASE("multilinearity under diagonal rescaling") {
  Rng rng(77);
  const int I = 3, J = 3;
  Eigen::MatrixXd A(I, J);
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j) A(i, j) = rng.normal();
  SourceSpec spec;
  spec.entries = {Moments{1.0, 6.0}, Moments{2.0, -1.5}, Gaussian{0.7}};
  Eigen::VectorXd d(J);
  d << 0.5, -2.0, 3.0;

  const CumulantPair lhs = population_cumulants(A * d.asDiagonal(), spec);
  SourceSpec scaled;
  scaled.entries = {Moments{1.0 * d[0] * d[0], 6.0 * std::pow(d[0], 4)},
                    Moments{2.0 * d[1] * d[1], -1.5 * std::pow(d[1], 4)},
                    Gaussian{0.7 * d[2] * d[2]}};
  const CumulantPair rhs = population_cumulants(A, scaled);
  CHECK(frobenius_distance(lhs.k2, rhs.k2) < 1e-10);
  CHECK(frobenius_distance(lhs.k4, rhs.k4) < 1e-10);
}

TEST_CASE("sample cumulants approach population cumulants") {
  const int I = 2;
  Eigen::MatrixXd A(I, I);
  A << 1, 0.3, 0, 1;
  SourceSpec spec;
  spec.entries = {Exponential{1.0}, Gaussian{1.0}};
  const CumulantPair pop = population_cumulants(A, spec);

  auto median_dist = [&](long n) {
    std::vector<double> d;
    for (int seed = 0; seed < 20; ++seed) {
      const Eigen::MatrixXd X = sample_mixture(A, spec, n, 1000 + seed);
      const CumulantPair cp = sample_cumulants(X);
      d.push_back(frobenius_distance(cp.k2, pop.k2) + frobenius_distance(cp.k4, pop.k4));
    }
    std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
    return d[d.size() / 2];
  };
  CHECK(median_dist(100000) < median_dist(1000));
}

TEST_CASE("jointly permuted coordinates permute the cumulants") {
  Rng rng(5);
  const int I = 3;
  Eigen::MatrixXd X(500, I);
  for (long t = 0; t < X.rows(); ++t)
    for (int i = 0; i < I; ++i) X(t, i) = rng.normal() + 0.2 * rng.exponential(1.0);
  const int perm[3] = {2, 0, 1};
  Eigen::MatrixXd Y(X.rows(), I);
  for (int i = 0; i < I; ++i) Y.col(perm[i]) = X.col(i);

  const CumulantPair cx = sample_cumulants(X), cy = sample_cumulants(Y);
  for_each_pair(I, [&](int i, int j, int) {
    CHECK(cy.k2(perm[i], perm[j]) == doctest::Approx(cx.k2(i, j)));
  });
  for_each_quad(I, [&](int i, int j, int k, int l, long long) {
    CHECK(cy.k4(perm[i], perm[j], perm[k], perm[l]) == doctest::Approx(cx.k4(i, j, k, l)));
  });
}

TEST_SUITE_END();
