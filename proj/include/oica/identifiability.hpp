#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "oica/cumulants.hpp"
#include "oica/optimize.hpp"
#include "oica/tensors.hpp"

namespace oica {

enum class VerdictKind {
  GenericIdentifiable,
  GenericNonIdentifiable,
  GenericAmbiguous,
  WitnessFound,
  NoWitnessFound,
  CollinearColumns,
};

const char* verdict_name(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::NoWitnessFound;
  Eigen::VectorXd witness;       // WitnessFound: unit vector b
  Eigen::VectorXd coefficients;  // WitnessFound: b^{x2} = sum_j coeff_j a_j^{x2}
  double residual = std::numeric_limits<double>::quiet_NaN();        // probe objective at b
  double coeff_residual = std::numeric_limits<double>::quiet_NaN();  // least-squares fit residual
  double best_residual = std::numeric_limits<double>::quiet_NaN();   // NoWitnessFound
  int starts = 0;
  std::pair<int, int> collinear_pair{-1, -1};
};

// Generic-matrix classification by (I, J) alone.
Verdict classify_generic(int I, long J);

// Pairs (i, j), i < j, with |cos angle| > 1 - tol. Zero columns never pair.
std::vector<std::pair<int, int>> collinear_pairs(const Eigen::MatrixXd& A, double tol = 1e-9);

// Numerical column rank of the C(I+1,2) x J matrix of packed squared columns.
int khatri_rao_rank(const Eigen::MatrixXd& A);

struct KernelReport {
  Eigen::MatrixXd C;             // 2x2 minors, rows = row pairs, cols = column pairs
  Eigen::MatrixXd D;             // symmetric Khatri-Rao square of C, row-pair-wise
  int kernel_dim = 0;            // numerical kernel of D
  Eigen::MatrixXd kernel_basis;  // C(J,2) x kernel_dim, orthonormal
};

// The rank-one membership test: sum_j lambda_j a_j^{x2} is rank <= 1 iff
// D(A) (lambda_i lambda_j)_{i<j} = 0.
KernelReport kernel_report(const Eigen::MatrixXd& A);

// Pairwise products (lambda_i lambda_j)_{i<j} in column-pair packed order.
Eigen::VectorXd pair_products(const Eigen::VectorXd& lambda);

struct ProbeConfig {
  int starts = 200;
  double witness_tol = 1e-8;
  double collinear_cos = 0.99;
  double column_start_noise = 0.1;
  std::uint64_t seed = 0;
  MinimizeConfig minimize;
};

// Numeric search for b with b^{x2} in span{a_j^{x2}} and b not collinear to
// any column. NoWitnessFound is evidence, not proof; the verdict reports the
// best residual and the start count so budgets can be raised.
Verdict rank_one_probe(const Eigen::MatrixXd& A, const ProbeConfig& cfg = {});

// Constructive non-identifiability witness: two source models whose mixtures
// are equidistributed. Requires packed(bb^T) = sum_{j<J} lambda_j packed(a_j a_j^T)
// + packed(a_J a_J^T), i.e. the coefficient of the last column normalized to 1.
struct WitnessModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;            // (a_1 ... a_{J-1} b)
  Eigen::VectorXd gauss_var_s;  // variance of the Gaussian bump added to s_j (j < J)
  Eigen::VectorXd gauss_var_r;  // same for r_j

  // Draws of the source vectors; the non-Gaussian base y_j is a centered
  // exponential(1). Rows are observations.
  Eigen::MatrixXd draw_sources_s(long n, std::uint64_t seed) const;
  Eigen::MatrixXd draw_sources_r(long n, std::uint64_t seed) const;

  SymMat population_k2_s() const;  // of A * s
  SymMat population_k2_r() const;  // of B * r; equals population_k2_s by construction
};

WitnessModel witness_distributions(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                   const Eigen::VectorXd& lambda);

// Exact count of monomials of degree 2*ell expressible as products of ell
// off-diagonal factors x_i x_j (i < j): degree sequences of loopless
// multigraphs with ell edges on I labeled vertices.
long long projected_veronese_count(int I, int ell);

}  // namespace oica
