#pragma once

#include <Eigen/Core>

// Shared fixture matrices used across the test suites.
namespace fixtures {

// 4x6 identifiable matrix whose columns include e1..e4, (1,1,1,0), (0,1,1,1).
inline Eigen::MatrixXd id_4x6() {
  Eigen::MatrixXd A(4, 6);
  A << 1, 0, 0, 0, 1, 0,  //
      0, 1, 0, 0, 1, 1,   //
      0, 0, 1, 0, 1, 1,   //
      0, 0, 0, 1, 0, 1;
  return A;
}

// 2x3 non-identifiable matrix; (1,2) squares into the column-square span.
inline Eigen::MatrixXd nonid_2x3() {
  Eigen::MatrixXd A(2, 3);
  A << 1, 0, 1,  //
      0, 1, 1;
  return A;
}

// 4x8 identifiable matrix beyond the generic threshold.
inline Eigen::MatrixXd id_4x8() {
  Eigen::MatrixXd A(4, 8);
  A << 0, 3, 1, -27417.0 / 160871.0, 1, 0, 0, 0,  //
      1, 9, 11, 282663.0 / 36181.0, 0, 1, 0, 0,   //
      2, 14, 13, 17, 0, 0, 1, 0,                  //
      3, 1, -89735.0 / 6339.0, 19, 0, 0, 0, 1;
  return A;
}

// 5x9 matrix (A_1 | I_5) whose Khatri-Rao square drops rank.
inline Eigen::MatrixXd kr_deficient_5x9() {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(5, 9);
  A.block(0, 0, 4, 4) = id_4x8().leftCols(4);
  A.block(0, 4, 5, 5) = Eigen::MatrixXd::Identity(5, 5);
  return A;
}

// The four linear relations cutting out the squared-column span of id_4x6,
// written over z_ij in row-major pair order
// (z11 z12 z13 z14 z22 z23 z24 z33 z34 z44).
inline Eigen::MatrixXd relations_4x6_rowmajor() {
  Eigen::MatrixXd R(4, 10);
  R << 0, 1, 0, 0, 0, -1, 1, 0, 0, 0,  //
      0, 0, 1, 0, 0, -1, 1, 0, 0, 0,   //
      0, 1, 0, 0, 0, -1, 0, 0, 1, 0,   //
      0, 0, 0, 1, 0, 0, 0, 0, 0, 0;
  return R;
}

}  // namespace fixtures
