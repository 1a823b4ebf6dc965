#include "oica/identifiability.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "oica/errors.hpp"
#include "oica/recovery.hpp"
#include "oica/rng.hpp"

namespace oica {

const char* verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::GenericIdentifiable:
      return "identifiable";
    case VerdictKind::GenericNonIdentifiable:
      return "non-identifiable";
    case VerdictKind::GenericAmbiguous:
      return "ambiguous";
    case VerdictKind::WitnessFound:
      return "witness_found";
    case VerdictKind::NoWitnessFound:
      return "no_witness_found";
    case VerdictKind::CollinearColumns:
      return "collinear_columns";
  }
  return "unknown";
}

Verdict classify_generic(int I, long J) {
  require(I >= 2, errc::invalid_data, "classification needs I >= 2");
  require(J >= 1, errc::invalid_data, "classification needs J >= 1");
  Verdict v;
  const long thresh = binom(I, 2);
  if (J <= thresh || (I == 2 && J == 2) || (I == 3 && J == 4)) {
    v.kind = VerdictKind::GenericIdentifiable;
  } else if (J == thresh + 1 && I >= 4 && (I % 4 == 2 || I % 4 == 3)) {
    v.kind = VerdictKind::GenericAmbiguous;
  } else {
    v.kind = VerdictKind::GenericNonIdentifiable;
  }
  return v;
}

std::vector<std::pair<int, int>> collinear_pairs(const Eigen::MatrixXd& A, double tol) {
  std::vector<std::pair<int, int>> out;
  const int J = static_cast<int>(A.cols());
  for (int i = 0; i < J; ++i)
    for (int j = i + 1; j < J; ++j) {
      const double ni = A.col(i).norm(), nj = A.col(j).norm();
      if (ni == 0 || nj == 0) continue;
      if (std::abs(A.col(i).dot(A.col(j))) / (ni * nj) > 1.0 - tol) out.emplace_back(i, j);
    }
  return out;
}

namespace {

Eigen::MatrixXd khatri_rao_square(const Eigen::MatrixXd& A) {
  const int I = static_cast<int>(A.rows());
  const int J = static_cast<int>(A.cols());
  Eigen::MatrixXd K(pair_count(I), J);
  for (int j = 0; j < J; ++j) K.col(j) = outer_square(A.col(j)).data();
  return K;
}

int numerical_rank(const Eigen::MatrixXd& M, double rel = 1e-10) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0) return 0;
  int r = 0;
  while (r < sv.size() && sv[r] > rel * sv[0]) ++r;
  return r;
}

}  // namespace

int khatri_rao_rank(const Eigen::MatrixXd& A) { return numerical_rank(khatri_rao_square(A)); }

Eigen::VectorXd pair_products(const Eigen::VectorXd& lambda) {
  const int J = static_cast<int>(lambda.size());
  Eigen::VectorXd mu(binom(J, 2));
  int idx = 0;
  for (int j = 0; j < J; ++j)
    for (int i = 0; i < j; ++i) mu[idx++] = lambda[i] * lambda[j];
  return mu;
}

KernelReport kernel_report(const Eigen::MatrixXd& A) {
  const int I = static_cast<int>(A.rows());
  const int J = static_cast<int>(A.cols());
  require(J >= 2, errc::invalid_data, "kernel report needs at least two columns");
  const int n = static_cast<int>(binom(I, 2));
  const int cols = static_cast<int>(binom(J, 2));

  KernelReport rep;
  rep.C.resize(n, cols);
  int col = 0;
  for (int j = 0; j < J; ++j)
    for (int i = 0; i < j; ++i) {
      int row = 0;
      for (int kp = 0; kp < I; ++kp)
        for (int k = 0; k < kp; ++k)
          rep.C(row++, col) = A(k, i) * A(kp, j) - A(kp, i) * A(k, j);
      ++col;
    }

  // D = C (.) C taken row-pair-wise: rows indexed by pairs (r <= r') of rows of C
  rep.D.resize(binom(n + 1, 2), cols);
  for (int c = 0; c < cols; ++c) {
    int row = 0;
    for (int rp = 0; rp < n; ++rp)
      for (int r = 0; r <= rp; ++r) rep.D(row++, c) = rep.C(r, c) * rep.C(rp, c);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rep.D, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  int rank = 0;
  while (rank < sv.size() && smax > 0 && sv[rank] > 1e-10 * smax) ++rank;
  rep.kernel_dim = cols - rank;
  rep.kernel_basis = svd.matrixV().rightCols(rep.kernel_dim);
  return rep;
}

namespace {

// Orthonormal basis (weighted packed coordinates) of span{packed(a_j a_j^T)}.
Eigen::MatrixXd squares_span_basis(const Eigen::MatrixXd& A) {
  const int I = static_cast<int>(A.rows());
  const int J = static_cast<int>(A.cols());
  Eigen::MatrixXd P(pair_count(I), J);
  for (int j = 0; j < J; ++j) P.col(j) = outer_square(A.col(j)).packed_weighted();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv[0] > 0 && sv[rank] > 1e-10 * sv[0]) ++rank;
  return svd.matrixU().leftCols(rank);
}

}  // namespace

Verdict rank_one_probe(const Eigen::MatrixXd& A, const ProbeConfig& cfg) {
  const int I = static_cast<int>(A.rows());
  const int J = static_cast<int>(A.cols());

  const auto coll = collinear_pairs(A, 1e-9);
  if (!coll.empty()) {
    Verdict v;
    v.kind = VerdictKind::CollinearColumns;
    v.collinear_pair = coll.front();
    return v;
  }

  Eigen::MatrixXd cols_unit(I, J);
  for (int j = 0; j < J; ++j) cols_unit.col(j) = A.col(j) / A.col(j).norm();

  const Eigen::MatrixXd Q = squares_span_basis(A);
  auto residual_of = [&](const Eigen::VectorXd& b) {
    const double nb2 = b.squaredNorm();
    if (!(nb2 > 1e-150)) return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd p = outer_square(b).packed_weighted();
    return (p - Q * (Q.transpose() * p)).norm() / nb2;
  };
  auto max_col_cos = [&](const Eigen::VectorXd& b) {
    const double nb = b.norm();
    double c = 0.0;
    for (int j = 0; j < J; ++j) c = std::max(c, std::abs(b.dot(cols_unit.col(j))) / nb);
    return c;
  };
  // Columns are excluded from the search by construction: a hinge penalty
  // starting just inside the collinearity threshold keeps minimizers clearly
  // on the admissible side, so residuals are reported for genuine witness
  // candidates only.
  const double hinge = std::max(0.5, cfg.collinear_cos - 0.005);
  auto objective = [&](const Eigen::VectorXd& b) {
    const double g = residual_of(b);
    if (!std::isfinite(g)) return g;
    double pen = 0.0;
    for (int j = 0; j < J; ++j) {
      const double c = std::abs(b.dot(cols_unit.col(j))) / b.norm();
      if (c > hinge) {
        const double t = (c - hinge) / (1.0 - hinge);
        pen += 100.0 * t * t;
      }
    }
    return g * g + pen;  // squared residual keeps line searches parabolic
  };

  MinimizeConfig mcfg = cfg.minimize;
  if (mcfg.max_iters <= 0) mcfg.max_iters = 1000 * I;
  Rng rng(derive_seed({cfg.seed, 0x1d3au}));

  Verdict v;
  v.starts = cfg.starts;
  double best_ok = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_b;
  for (int s = 0; s < cfg.starts; ++s) {
    // column directions first (witnesses near columns are the hard case),
    // then uniform sphere starts
    Eigen::VectorXd b0;
    if (s < J) {
      b0 = (cols_unit.col(s) + cfg.column_start_noise * rng.normal_vec(I)).normalized();
    } else {
      b0 = rng.sphere(I);
    }
    MinimizeResult res;
    try {
      res = powell_minimize(objective, b0, mcfg);
    } catch (const Error&) {
      continue;
    }
    if (!res.x.allFinite() || res.x.norm() < 1e-150) continue;
    const Eigen::VectorXd b = canonical_unit(res.x);
    if (max_col_cos(b) > cfg.collinear_cos) continue;
    const double g = residual_of(b);
    if (g < best_ok) {
      best_ok = g;
      best_b = b;
    }
  }

  if (best_b.size() > 0 && best_ok <= cfg.witness_tol) {
    v.kind = VerdictKind::WitnessFound;
    v.witness = best_b;
    v.residual = best_ok;
    // coefficients by least squares in weighted packed coordinates
    Eigen::MatrixXd P(pair_count(I), J);
    for (int j = 0; j < J; ++j) P.col(j) = outer_square(A.col(j)).packed_weighted();
    const Eigen::VectorXd target = outer_square(best_b).packed_weighted();
    v.coefficients = P.colPivHouseholderQr().solve(target);
    v.coeff_residual = (P * v.coefficients - target).norm();
  } else {
    v.kind = VerdictKind::NoWitnessFound;
    v.best_residual = best_ok;
  }
  return v;
}

Eigen::MatrixXd WitnessModel::draw_sources_s(long n, std::uint64_t seed) const {
  const int J = static_cast<int>(A.cols());
  Rng rng(derive_seed({seed, 0xa51u}));
  Eigen::MatrixXd S(n, J);
  for (long t = 0; t < n; ++t) {
    for (int j = 0; j + 1 < J; ++j) {
      double x = rng.exponential(1.0) - 1.0;
      if (gauss_var_s[j] > 0) x += std::sqrt(gauss_var_s[j]) * rng.normal();
      S(t, j) = x;
    }
    S(t, J - 1) = rng.normal();
  }
  return S;
}

Eigen::MatrixXd WitnessModel::draw_sources_r(long n, std::uint64_t seed) const {
  const int J = static_cast<int>(B.cols());
  Rng rng(derive_seed({seed, 0xb52u}));
  Eigen::MatrixXd R(n, J);
  for (long t = 0; t < n; ++t) {
    for (int j = 0; j + 1 < J; ++j) {
      double x = rng.exponential(1.0) - 1.0;
      if (gauss_var_r[j] > 0) x += std::sqrt(gauss_var_r[j]) * rng.normal();
      R(t, j) = x;
    }
    R(t, J - 1) = rng.normal();
  }
  return R;
}

SymMat WitnessModel::population_k2_s() const {
  const int I = static_cast<int>(A.rows());
  const int J = static_cast<int>(A.cols());
  SymMat k2(I);
  for (int j = 0; j + 1 < J; ++j)
    k2 += (1.0 + gauss_var_s[j]) * outer_square(A.col(j));
  k2 += outer_square(A.col(J - 1));
  return k2;
}

SymMat WitnessModel::population_k2_r() const {
  const int I = static_cast<int>(B.rows());
  const int J = static_cast<int>(B.cols());
  SymMat k2(I);
  for (int j = 0; j + 1 < J; ++j)
    k2 += (1.0 + gauss_var_r[j]) * outer_square(B.col(j));
  k2 += outer_square(B.col(J - 1));
  return k2;
}

WitnessModel witness_distributions(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                   const Eigen::VectorXd& lambda) {
  const int I = static_cast<int>(A.rows());
  const int J = static_cast<int>(A.cols());
  require(b.size() == I, errc::dimension_mismatch, "witness dimension mismatch");
  require(lambda.size() == J, errc::invalid_witness, "expected one coefficient per column");

  for (int j = 0; j < J; ++j) {
    const double c = std::abs(b.dot(A.col(j))) / (b.norm() * A.col(j).norm());
    require(c <= 0.99, errc::degenerate_witness, "witness is collinear to a mixing column");
  }
  require(std::abs(lambda[J - 1] - 1.0) <= 1e-8, errc::invalid_witness,
          "the coefficient of the last column must be normalized to 1");

  SymMat lhs = outer_square(b);
  SymMat rhs(I);
  for (int j = 0; j + 1 < J; ++j) rhs += lambda[j] * outer_square(A.col(j));
  rhs += outer_square(A.col(J - 1));
  require(frobenius_distance(lhs, rhs) <= 1e-8 * std::max(1.0, frobenius_norm(lhs)),
          errc::invalid_witness, "b^{x2} does not match the claimed combination of squares");

  WitnessModel model;
  model.A = A;
  model.B = A;
  model.B.col(J - 1) = b;
  model.gauss_var_s = Eigen::VectorXd::Zero(J - 1);
  model.gauss_var_r = Eigen::VectorXd::Zero(J - 1);
  for (int j = 0; j + 1 < J; ++j) {
    if (lambda[j] >= 0)
      model.gauss_var_s[j] = lambda[j];  // s_j = y_j + z_j, r_j = y_j
    else
      model.gauss_var_r[j] = -lambda[j];  // roles swap for negative coefficients
  }
  return model;
}

long long projected_veronese_count(int I, int ell) {
  require(I >= 2, errc::invalid_data, "projected Veronese needs I >= 2");
  require(ell >= 1, errc::invalid_data, "degree parameter must be >= 1");
  require(static_cast<long long>(I) * ell <= 4096, errc::size_limit,
          "I * ell exceeds the enumeration budget");

  // Degree sequences of loopless multigraphs with ell edges: compositions of
  // 2*ell into I parts, each part at most ell. Counted by dynamic programming
  // over parts.
  const int total = 2 * ell;
  std::vector<long long> ways(total + 1, 0);
  ways[0] = 1;
  for (int part = 0; part < I; ++part) {
    std::vector<long long> next(total + 1, 0);
    for (int s = 0; s <= total; ++s) {
      if (ways[s] == 0) continue;
      for (int a = 0; a <= ell && s + a <= total; ++a) next[s + a] += ways[s];
    }
    ways.swap(next);
  }
  return ways[total];
}

}  // namespace oica
