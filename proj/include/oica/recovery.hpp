#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "oica/cumulants.hpp"
#include "oica/optimize.hpp"
#include "oica/tensors.hpp"

namespace oica {

// Real I x J matrix of mixing columns. Recovery outputs are canonical: unit
// Euclidean columns with the largest-magnitude entry positive.
class MixingMatrix {
 public:
  MixingMatrix() = default;
  explicit MixingMatrix(Eigen::MatrixXd A) : A_(std::move(A)) {}

  int rows() const { return static_cast<int>(A_.rows()); }
  int cols() const { return static_cast<int>(A_.cols()); }
  Eigen::VectorXd col(int j) const { return A_.col(j); }
  const Eigen::MatrixXd& matrix() const { return A_; }
  Eigen::MatrixXd& matrix() { return A_; }

  MixingMatrix normalized() const;
  bool is_normalized(double eps = 1e-12) const;
  // max over pairs of |cos angle| < 1 - tol
  bool no_collinear_pair(double tol = 1e-9) const;

 private:
  Eigen::MatrixXd A_;
};

// Unit vector with canonical sign (largest-magnitude entry positive).
Eigen::VectorXd canonical_unit(const Eigen::VectorXd& v);

struct RecoverConfig {
  // subspace power iteration
  int power_starts_per_vector = 50;
  int power_max_iters = 1000;
  double power_tol = 1e-12;
  // accept a candidate when ||Proj_U packed(xx^T)|| >= 1 - fixed_point_tol;
  // the default does not reject (residuals are still reported), matching the
  // behavior of the reference decomposition on noisy inputs
  double fixed_point_tol = 1.0;
  double dedup_cos = 0.99;
  // rank detection: population threshold tau = rank_rel_tau * max|eigenvalue|;
  // sample inputs use the largest relative gap among the top C(I,2)+1 values
  double rank_rel_tau = 1e-6;
  double rank_gap_warn_ratio = 10.0;
  // step-2 residual gate: objective > abs + rel * ||k2|| is an error
  double residual_abs_tol = 1e-8;
  double residual_rel_tol = 0.5;
  std::uint64_t seed = 0;
  // step-2 minimizer; max_iters <= 0 resolves to 1000 * (I + J)
  MinimizeConfig minimize;
};

struct DecompositionDiagnostics {
  Eigen::VectorXd column_residuals;  // 1 - ||Proj_U packed(vv^T)|| per column
  int subspace_rank = 0;
  bool rank_ambiguous = false;      // auto-rank eigenvalue gap ratio below threshold
  bool outside_uniqueness = false;  // requested rank exceeds C(I,2)
  double fit_residual_rel = 0.0;    // ||k4 - sum lambda v^x4|| / ||k4||
  int starts_used = 0;
};

struct Decomposition {
  Eigen::MatrixXd vectors;  // I x R, unit columns, canonical signs
  Eigen::VectorXd lambdas;
  DecompositionDiagnostics diag;
};

// Step 1: rank-one elements of the flattening's dominant eigenspace by
// projected power iteration; coefficients by least squares.
// rank <= 0 requests automatic rank detection.
Decomposition decompose_k4(const SymTen4& k4, int rank, const RecoverConfig& cfg,
                           Provenance provenance = Provenance::population);

// Raised when fewer than the requested number of directions is found; carries
// whatever was recovered.
class DecompositionFailure : public Error {
 public:
  DecompositionFailure(const std::string& what, Decomposition partial)
      : Error(errc::decomposition_failure, what), partial_(std::move(partial)) {}
  const Decomposition& partial() const { return partial_; }

 private:
  Decomposition partial_;
};

struct GaussianColumnResult {
  Eigen::VectorXd v;  // unit, canonical sign
  Eigen::VectorXd l;  // coefficients, length known+1
  double objective = 0.0;
};

// Step 2: minimize ||k2 - sum_j l_j a_j^{x2} - l_J v^{x2}|| over (v, l) with v
// normalized inside the objective; multi-restart Powell.
GaussianColumnResult recover_gaussian_column(const SymMat& k2, const Eigen::MatrixXd& known,
                                             const RecoverConfig& cfg);

struct RecoveryResult {
  MixingMatrix A_hat;            // I x J, Gaussian column last
  Eigen::VectorXd coefficients;  // length J
  double objective = 0.0;        // step-2 residual, recomputed on return
  Decomposition decomposition;
};

// Algorithm: decompose k4 (R = J - 1), then search the rank-one completion of
// k2's span. num_sources <= 0 uses the detected rank R and sets J = R + 1.
RecoveryResult recover(const CumulantPair& cp, int num_sources, const RecoverConfig& cfg);

}  // namespace oica
