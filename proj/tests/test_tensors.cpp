#include <Eigen/Dense>

#include "doctest.h"
#include "oica/rng.hpp"
#include "oica/tensors.hpp"

using namespace oica;

TEST_SUITE_BEGIN("tensors");

TEST_CASE("packed round trip is the identity") {
  Rng rng(7);
  for (int I : {1, 2, 3, 5, 7}) {
    Eigen::MatrixXd G(I, I);
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < I; ++j) G(i, j) = rng.normal();
    Eigen::MatrixXd S = 0.5 * (G + G.transpose());
    const SymMat M = SymMat::from_full(S);
    CHECK(M.data().size() == pair_count(I));
    CHECK((M.full() - S).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("outer_power d=2 on (1,2)") {
  Eigen::VectorXd v(2);
  v << 1, 2;
  const auto M = outer_square(v);
  CHECK(M(0, 0) == 1);
  CHECK(M(0, 1) == 2);
  CHECK(M(1, 1) == 4);
}

TEST_CASE("outer_power d=4 on a basis vector") {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(3);
  v[0] = 1;
  const auto T = outer_fourth(v);
  for_each_quad(3, [&](int i, int j, int k, int l, long long idx) {
    const double expect = (i == 0 && j == 0 && k == 0 && l == 0) ? 1.0 : 0.0;
    CHECK(T.data()[idx] == expect);
  });
}

TEST_CASE("outer_power d=4 on the all-ones vector") {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(2);
  const auto T = outer_fourth(v);
  int mult_sum = 0;
  for_each_quad(2, [&](int i, int j, int k, int l, long long idx) {
    CHECK(T.data()[idx] == 1.0);
    mult_sum += quad_multiplicity(i, j, k, l);
  });
  CHECK(mult_sum == 16);  // all 2^4 index tuples
}

TEST_CASE("outer_power rejects unsupported orders") {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(outer_power(v, 3), Error);
  CHECK(outer_power(v, 2).order == 2);
  CHECK(outer_power(v, 4).order == 4);
}

TEST_CASE("flatten of basis tensors") {
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(2);
  e1[0] = 1;
  const FlatMat F1 = flatten(outer_fourth(e1));
  CHECK(F1.F.rows() == 3);
  CHECK(F1.F(0, 0) == doctest::Approx(1.0));
  CHECK(F1.F.cwiseAbs().sum() == doctest::Approx(1.0));

  Eigen::VectorXd e2 = Eigen::VectorXd::Zero(2);
  e2[1] = 1;
  const FlatMat Fd = flatten(outer_fourth(e1) + outer_fourth(e2));
  Eigen::VectorXd diag = Fd.F.diagonal();
  CHECK(diag[0] == doctest::Approx(1.0));
  CHECK(diag[1] == doctest::Approx(0.0));
  CHECK(diag[2] == doctest::Approx(1.0));
  CHECK((Fd.F - Eigen::MatrixXd(diag.asDiagonal())).norm() == doctest::Approx(0.0));
}

TEST_CASE("flatten satisfies the quadratic-form identity") {
  Rng rng(11);
  for (int I : {2, 3, 4}) {
    SymTen4 T(I);
    for (long long t = 0; t < T.data().size(); ++t) T.data()[t] = rng.normal();
    const FlatMat F = flatten(T);
    for (int rep = 0; rep < 5; ++rep) {
      const Eigen::VectorXd x = rng.normal_vec(I);
      const Eigen::VectorXd y = rng.normal_vec(I);
      // independent oracle: direct 4-fold summation over all index tuples
      double direct = 0.0;
      for (int i = 0; i < I; ++i)
        for (int j = 0; j < I; ++j)
          for (int k = 0; k < I; ++k)
            for (int l = 0; l < I; ++l) direct += T(i, j, k, l) * x[i] * x[j] * y[k] * y[l];
      const double via_flat = outer_square(x).packed_weighted().transpose() * F.F *
                              outer_square(y).packed_weighted();
      CHECK(via_flat == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("frobenius distance examples") {
  SymMat Z(2);
  SymMat M(2);
  M.at(0, 0) = 1;
  CHECK(frobenius_distance(M, M) == 0.0);
  CHECK(frobenius_distance(M, Z) == doctest::Approx(1.0));
  SymMat O(2);
  O.at(0, 1) = 1;  // off-diagonal entries count twice
  CHECK(frobenius_distance(O, Z) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(frobenius_distance(SymMat(2), SymMat(3)), Error);
}

TEST_CASE("packed inner product matches the full-matrix sum") {
  Rng rng(3);
  const int I = 4;
  Eigen::MatrixXd G1(I, I), G2(I, I);
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < I; ++j) {
      G1(i, j) = rng.normal();
      G2(i, j) = rng.normal();
    }
  const Eigen::MatrixXd S1 = 0.5 * (G1 + G1.transpose());
  const Eigen::MatrixXd S2 = 0.5 * (G2 + G2.transpose());
  const double full = (S1.array() * S2.array()).sum();
  CHECK(frobenius_dot(SymMat::from_full(S1), SymMat::from_full(S2)) ==
        doctest::Approx(full).epsilon(1e-12));
}

TEST_CASE("outer powers scale as c^2 and c^4") {
  Rng rng(5);
  const Eigen::VectorXd v = rng.normal_vec(4);
  const double c = -1.7;
  const SymMat M1 = outer_square((c * v).eval());
  const SymMat M2 = c * c * outer_square(v);
  CHECK((M1.data() - M2.data()).cwiseAbs().maxCoeff() < 1e-12);
  const SymTen4 T1 = outer_fourth((c * v).eval());
  const SymTen4 T2 = (c * c * c * c) * outer_fourth(v);
  CHECK((T1.data() - T2.data()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("permutation equivariance of packed storage") {
  Rng rng(9);
  for (int I : {3, 4, 6}) {
    const Eigen::VectorXd v = rng.normal_vec(I);
    std::vector<int> perm(I);
    for (int i = 0; i < I; ++i) perm[i] = i;
    for (int i = I - 1; i > 0; --i) std::swap(perm[i], perm[rng.bits() % (i + 1)]);
    Eigen::VectorXd pv(I);
    for (int i = 0; i < I; ++i) pv[perm[i]] = v[i];

    const SymMat M = outer_square(v), PM = outer_square(pv);
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < I; ++j) CHECK(PM(perm[i], perm[j]) == doctest::Approx(M(i, j)));

    const SymTen4 T = outer_fourth(v), PT = outer_fourth(pv);
    for_each_quad(I, [&](int i, int j, int k, int l, long long) {
      CHECK(PT(perm[i], perm[j], perm[k], perm[l]) == doctest::Approx(T(i, j, k, l)));
    });
  }
}

TEST_CASE("flatten is linear") {
  Rng rng(13);
  const int I = 3;
  SymTen4 T1(I), T2(I);
  for (long long t = 0; t < T1.data().size(); ++t) {
    T1.data()[t] = rng.normal();
    T2.data()[t] = rng.normal();
  }
  const double a = 0.3, b = -2.1;
  const FlatMat lhs = flatten(a * T1 + b * T2);
  const Eigen::MatrixXd rhs = a * flatten(T1).F + b * flatten(T2).F;
  CHECK((lhs.F - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_SUITE_END();
