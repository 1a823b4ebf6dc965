#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "oica/errors.hpp"
#include "oica/packing.hpp"

namespace oica {

// A system of quadratic forms f_k(x) = sum_{i<=j} lambda_ij x_i x_j over nvars
// variables. Inhomogeneous systems carry one extra homogenizing coordinate,
// fixed to 1 at evaluation, which holds the linear and constant parts.
struct QuadricSystem {
  int nvars = 0;
  bool homogeneous = true;
  std::vector<Eigen::VectorXd> forms;  // packed coefficients over ncoords()

  int ncoords() const { return nvars + (homogeneous ? 0 : 1); }
};

// Residual vector (f_1(x), ..., f_k(x)).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> evaluate(
    const QuadricSystem& sys, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  require(static_cast<int>(x.size()) == sys.nvars, errc::dimension_mismatch,
          "point dimension does not match the system");
  const int nc = sys.ncoords();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z(nc);
  z.head(sys.nvars) = x;
  if (!sys.homogeneous) z[nc - 1] = Scalar(1);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(sys.forms.size());
  for (size_t f = 0; f < sys.forms.size(); ++f) {
    Scalar acc(0);
    for_each_pair(nc, [&](int i, int j, int idx) { acc += sys.forms[f][idx] * z[i] * z[j]; });
    out[static_cast<int>(f)] = acc;
  }
  return out;
}

// Orthonormal basis of the orthogonal complement of span{packed(a_j a_j^T)}
// in R^{C(I+1,2)}; empty when the squares span everything.
std::vector<Eigen::VectorXd> linear_relations(const Eigen::MatrixXd& A);

// One homogeneous quadric per linear relation, obtained by substituting
// z_ij -> x_i x_j. Every column of A is a projective zero of every quadric.
QuadricSystem quadric_system(const Eigen::MatrixXd& A);

struct TrackedStep {
  char branch = 'B';  // 'B' base, 'D' doubling, 'C' circle (2r - 2)
  int real_before = 0;
  int real_after = 0;
};

// A dehomogenized system of I-1 quadrics in I-1 variables together with its
// full solution set, carried analytically through the construction.
struct TrackedSystem {
  QuadricSystem system;                      // inhomogeneous, nvars = I - 1
  std::vector<Eigen::VectorXcd> solutions;   // 2^{I-1} points
  int real_count = 0;
  std::vector<TrackedStep> trace;
};

// Builds a system with exactly 2^{I-1} distinct solutions of which ell are
// real, ell even. Deterministic for fixed (I, ell).
TrackedSystem build_real_count_system(int I, int ell);

}  // namespace oica
