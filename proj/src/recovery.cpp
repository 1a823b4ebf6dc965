#include "oica/recovery.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "oica/errors.hpp"
#include "oica/rng.hpp"

namespace oica {

Eigen::VectorXd canonical_unit(const Eigen::VectorXd& v) {
  const double n = v.norm();
  require(n > 0, errc::invalid_data, "cannot normalize the zero vector");
  Eigen::VectorXd u = v / n;
  int imax = 0;
  u.cwiseAbs().maxCoeff(&imax);
  if (u[imax] < 0) u = -u;
  return u;
}

MixingMatrix MixingMatrix::normalized() const {
  Eigen::MatrixXd B = A_;
  for (int j = 0; j < cols(); ++j) B.col(j) = canonical_unit(B.col(j));
  return MixingMatrix(std::move(B));
}

bool MixingMatrix::is_normalized(double eps) const {
  for (int j = 0; j < cols(); ++j) {
    if (std::abs(A_.col(j).norm() - 1.0) > eps) return false;
    int imax = 0;
    A_.col(j).cwiseAbs().maxCoeff(&imax);
    if (A_(imax, j) < 0) return false;
  }
  return true;
}

bool MixingMatrix::no_collinear_pair(double tol) const {
  for (int i = 0; i < cols(); ++i)
    for (int j = i + 1; j < cols(); ++j) {
      const double ni = A_.col(i).norm(), nj = A_.col(j).norm();
      if (ni == 0 || nj == 0) continue;
      if (std::abs(A_.col(i).dot(A_.col(j))) / (ni * nj) >= 1.0 - tol) return false;
    }
  return true;
}

namespace {

// Detected rank of the flattening spectrum. Population inputs threshold on
// |eigenvalue|; sample inputs pick the largest relative gap among the top
// C(I,2)+1 values.
int detect_rank(const Eigen::VectorXd& abs_evals_desc, int I, const RecoverConfig& cfg,
                Provenance provenance, bool* ambiguous) {
  const int m = static_cast<int>(abs_evals_desc.size());
  *ambiguous = false;
  if (!(abs_evals_desc[0] > 0)) return 0;  // zero tensor
  if (provenance == Provenance::population) {
    const double tau = cfg.rank_rel_tau * abs_evals_desc[0];
    int r = 0;
    while (r < m && abs_evals_desc[r] > tau) ++r;
    return std::max(r, 1);
  }
  const int top = std::min<int>(static_cast<int>(binom(I, 2)) + 1, m - 1);
  int best = 1;
  double best_ratio = 0.0;
  for (int r = 1; r <= top; ++r) {
    const double lo = std::max(abs_evals_desc[r], 1e-300);
    const double ratio = abs_evals_desc[r - 1] / lo;
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = r;
    }
  }
  if (best_ratio < cfg.rank_gap_warn_ratio) *ambiguous = true;
  return best;
}

struct Candidate {
  Eigen::VectorXd v;
  double proj = 0.0;
  bool converged = false;
};

}  // namespace

Decomposition decompose_k4(const SymTen4& k4, int rank, const RecoverConfig& cfg,
                           Provenance provenance) {
  const int I = k4.dim();
  const int m = pair_count(I);

  const FlatMat flat = flatten(k4);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(flat.F);
  require(eig.info() == Eigen::Success, errc::decomposition_failure, "eigendecomposition failed");

  // order eigenpairs by |eigenvalue| descending
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(eig.eigenvalues()[a]) > std::abs(eig.eigenvalues()[b]);
  });
  Eigen::VectorXd abs_desc(m);
  for (int i = 0; i < m; ++i) abs_desc[i] = std::abs(eig.eigenvalues()[order[i]]);

  Decomposition out;
  int R = rank;
  if (R <= 0) {
    bool ambiguous = false;
    R = detect_rank(abs_desc, I, cfg, provenance, &ambiguous);
    out.diag.rank_ambiguous = ambiguous;
  }
  require(R <= m, errc::decomposition_failure, "requested rank exceeds the flattening dimension");
  out.diag.outside_uniqueness = R > binom(I, 2);
  out.diag.subspace_rank = R;

  Eigen::MatrixXd Q(m, R);
  for (int r = 0; r < R; ++r) Q.col(r) = eig.eigenvectors().col(order[r]);

  // Projected power iteration: x <- normalize(unpack(Proj_U packed(xx^T)) x).
  Rng rng(derive_seed({cfg.seed, 0x5bd1u}));
  const int budget = cfg.power_starts_per_vector * R;
  std::vector<Candidate> accepted;
  std::vector<Candidate> pool;
  int starts_used = 0;

  Eigen::VectorXd p(m), q(m);
  Eigen::VectorXd coeff(R), y(I);
  Eigen::MatrixXd M(I, I);
  auto pack_square = [&](const Eigen::VectorXd& x) {
    for_each_pair(I, [&](int i, int j, int idx) {
      p[idx] = (i == j ? 1.0 : kSqrt2) * x[i] * x[j];
    });
  };
  auto proj_norm = [&](const Eigen::VectorXd& x) {
    pack_square(x);
    coeff.noalias() = Q.transpose() * p;
    return coeff.norm();
  };
  auto try_insert = [&](std::vector<Candidate>& list, const Candidate& c, size_t cap) {
    for (auto& a : list) {
      if (std::abs(a.v.dot(c.v)) > cfg.dedup_cos) {
        if (c.proj > a.proj) a = c;  // keep the better representative
        return;
      }
    }
    if (list.size() < cap) list.push_back(c);
  };

  for (int s = 0; s < budget && static_cast<int>(accepted.size()) < R; ++s) {
    ++starts_used;
    Eigen::VectorXd x = rng.sphere(I);
    bool converged = false;
    for (int it = 0; it < cfg.power_max_iters; ++it) {
      pack_square(x);
      coeff.noalias() = Q.transpose() * p;
      q.noalias() = Q * coeff;
      for_each_pair(I, [&](int i, int j, int idx) {
        const double v = (i == j) ? q[idx] : q[idx] / kSqrt2;
        M(i, j) = v;
        M(j, i) = v;
      });
      y.noalias() = M * x;
      const double ny = y.norm();
      if (!(ny > 1e-300)) break;
      y /= ny;
      if (y.dot(x) < 0) y = -y;  // iteration is sign-invariant
      const double step = (y - x).norm();
      x = y;
      if (step < cfg.power_tol) {
        converged = true;
        break;
      }
    }
    Candidate c{canonical_unit(x), proj_norm(x), converged};
    const double accept_bar = std::max(1.0 - cfg.fixed_point_tol, 1.0 - 1e-6);
    if (converged && c.proj >= accept_bar) {
      try_insert(accepted, c, R);
    } else {
      try_insert(pool, c, 4 * static_cast<size_t>(R) + 8);
    }
  }

  // Fill any shortfall from the remaining candidates, best projection first.
  if (static_cast<int>(accepted.size()) < R) {
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
      if (a.converged != b.converged) return a.converged;
      return a.proj > b.proj;
    });
    for (const auto& c : pool) {
      if (static_cast<int>(accepted.size()) >= R) break;
      if (c.proj < 1.0 - cfg.fixed_point_tol) continue;
      bool dup = false;
      for (const auto& a : accepted)
        if (std::abs(a.v.dot(c.v)) > cfg.dedup_cos) {
          dup = true;
          break;
        }
      if (!dup) accepted.push_back(c);
    }
  }

  // Deflated completion: when multi-start keeps refinding the same attractors
  // (noisy inputs concentrate them), extract the remaining directions from the
  // part of U orthogonal to the accepted squares.
  while (static_cast<int>(accepted.size()) < R) {
    const int k = static_cast<int>(accepted.size());
    Eigen::MatrixXd C(R, k);
    for (int a = 0; a < k; ++a) {
      pack_square(accepted[a].v);
      C.col(a) = Q.transpose() * p;
    }
    Eigen::MatrixXd Qdef;
    if (k == 0) {
      Qdef = Q;
    } else {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullU);
      int rk = 0;
      while (rk < svd.singularValues().size() && svd.singularValues()[rk] > 1e-12) ++rk;
      if (rk >= R) break;  // accepted squares already exhaust U
      Qdef = Q * svd.matrixU().rightCols(R - rk);
    }

    Candidate best;
    double best_def = -1.0;
    for (int s = 0; s < 2 * R; ++s) {
      ++starts_used;
      Eigen::VectorXd x = rng.sphere(I);
      for (int it = 0; it < cfg.power_max_iters; ++it) {
        pack_square(x);
        const Eigen::VectorXd cdef = Qdef.transpose() * p;
        q.noalias() = Qdef * cdef;
        for_each_pair(I, [&](int i, int j, int idx) {
          const double v = (i == j) ? q[idx] : q[idx] / kSqrt2;
          M(i, j) = v;
          M(j, i) = v;
        });
        y.noalias() = M * x;
        const double ny = y.norm();
        if (!(ny > 1e-300)) break;
        y /= ny;
        if (y.dot(x) < 0) y = -y;
        const double step = (y - x).norm();
        x = y;
        if (step < cfg.power_tol) break;
      }
      pack_square(x);
      const double def_content = (Qdef.transpose() * p).norm();
      const double full_proj = (Q.transpose() * p).norm();
      if (full_proj < 1.0 - cfg.fixed_point_tol) continue;
      bool dup = false;
      for (const auto& a : accepted)
        if (std::abs(a.v.dot(x)) > cfg.dedup_cos) dup = true;
      if (dup) continue;
      if (def_content > best_def) {
        best_def = def_content;
        best = Candidate{canonical_unit(x), full_proj, false};
      }
    }
    if (best_def < 0) break;  // no admissible direction left
    accepted.push_back(best);
  }

  out.diag.starts_used = starts_used;
  const int found = static_cast<int>(accepted.size());
  out.vectors.resize(I, found);
  out.diag.column_residuals.resize(found);
  for (int r = 0; r < found; ++r) {
    out.vectors.col(r) = accepted[r].v;
    out.diag.column_residuals[r] = 1.0 - accepted[r].proj;
  }

  // lambda by least squares on the Gram system <v_r^x4, v_s^x4> = (v_r.v_s)^4
  if (found > 0) {
    Eigen::MatrixXd G(found, found);
    Eigen::VectorXd rhs(found);
    for (int r = 0; r < found; ++r) {
      for (int s = 0; s < found; ++s) {
        const double c = out.vectors.col(r).dot(out.vectors.col(s));
        G(r, s) = c * c * c * c;
      }
      rhs[r] = k4.apply(out.vectors.col(r));
    }
    out.lambdas = G.ldlt().solve(rhs);
    SymTen4 fit(I);
    for (int r = 0; r < found; ++r) fit += out.lambdas[r] * outer_fourth(out.vectors.col(r));
    const double nk4 = frobenius_norm(k4);
    out.diag.fit_residual_rel = nk4 > 0 ? frobenius_distance(k4, fit) / nk4 : 0.0;
  }

  if (found < R)
    throw DecompositionFailure("found " + std::to_string(found) + " of " + std::to_string(R) +
                                   " rank-one directions within the start budget",
                               out);
  return out;
}

GaussianColumnResult recover_gaussian_column(const SymMat& k2, const Eigen::MatrixXd& known,
                                             const RecoverConfig& cfg) {
  const int I = k2.dim();
  const int K = static_cast<int>(known.cols());
  const int J = K + 1;
  require(known.rows() == I || K == 0, errc::dimension_mismatch,
          "known columns do not match the cumulant dimension");
  require(MixingMatrix(known).no_collinear_pair(1e-9), errc::invalid_data,
          "known columns contain a collinear pair");

  const int m = pair_count(I);
  Eigen::MatrixXd P(m, K);
  for (int j = 0; j < K; ++j) P.col(j) = outer_square(known.col(j)).packed_weighted();
  const Eigen::VectorXd target = k2.packed_weighted();
  const double nk2 = target.norm();

  // parameters: v in R^I (normalized inside), l in R^J
  auto residual_norm = [&, vn = Eigen::VectorXd(I),
                        resid = Eigen::VectorXd(m)](const Eigen::VectorXd& theta) mutable {
    const double nv = theta.head(I).norm();
    if (!(nv > 1e-150)) return std::numeric_limits<double>::infinity();
    vn = theta.head(I) / nv;
    resid = target;
    if (K > 0) resid.noalias() -= P * theta.segment(I, K);
    const double lJ = theta[I + J - 1];
    for_each_pair(I, [&](int i, int j, int idx) {
      resid[idx] -= lJ * (i == j ? 1.0 : kSqrt2) * vn[i] * vn[j];
    });
    return resid.norm();
  };
  // the squared residual shares the minimizers and keeps the line searches
  // parabolic near zero-residual optima
  auto objective = [&](const Eigen::VectorXd& theta) {
    const double r = residual_norm(theta);
    return std::isfinite(r) ? r * r : r;
  };

  MinimizeConfig mcfg = cfg.minimize;
  if (mcfg.max_iters <= 0) mcfg.max_iters = 1000 * (I + J);
  mcfg.seed = derive_seed({cfg.seed, 0x9e37u});

  // Spectral warm start: the projection residual of k2 against the known
  // squares is (up to noise) a multiple of the missing column's square, so its
  // dominant eigenvector seeds the first restart. Random restarts collapse
  // onto a flat degenerate manifold (v on a known column, arbitrary weight
  // split) often enough that a structured start is needed for reliability.
  Eigen::VectorXd theta0(I + J);
  {
    Eigen::VectorXd r0 = target;
    if (K > 0) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(P);
      Eigen::MatrixXd Qthin = qr.householderQ() * Eigen::MatrixXd::Identity(m, K);
      r0 -= Qthin * (Qthin.transpose() * r0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(SymMat::from_packed_weighted(I, r0).full());
    int imax = 0;
    eig.eigenvalues().cwiseAbs().maxCoeff(&imax);
    const Eigen::VectorXd v0 = eig.eigenvectors().col(imax);
    Eigen::MatrixXd Pv(m, K + 1);
    Pv.leftCols(K) = P;
    Pv.col(K) = outer_square(v0).packed_weighted();
    theta0.head(I) = v0;
    theta0.tail(J) = Pv.colPivHouseholderQr().solve(target);
  }
  auto sampler = [&, calls = 0](Rng& rng) mutable {
    if (calls++ == 0) return theta0;
    Eigen::VectorXd theta(I + J);
    theta.head(I) = rng.sphere(I);
    theta.tail(J) = rng.normal_vec(J);
    return theta;
  };

  // the post-condition (new direction with a real coefficient) drives the
  // selection: restarts that merely split weight onto a known column lose to
  // any admissible minimizer
  auto admissible = [&](const MinimizeResult& r) {
    const double nv = r.x.head(I).norm();
    if (!(nv > 1e-150)) return false;
    const Eigen::VectorXd l = r.x.tail(J);
    if (std::abs(l[J - 1]) < 1e-8 * l.norm()) return false;
    for (int j = 0; j < K; ++j)
      if (std::abs(r.x.head(I).dot(known.col(j))) / (nv * known.col(j).norm()) > 0.99) return false;
    return true;
  };
  const MinimizeResult best = best_of_restarts(objective, sampler, mcfg, admissible);

  const double resid = residual_norm(best.x);
  require(resid <= cfg.residual_abs_tol + cfg.residual_rel_tol * nk2, errc::residual_too_large,
          "k2 is inconsistent with the recovered span");
  if (!admissible(best))
    fail(errc::gaussian_column_undetected,
         "k2 lies in the span of the known columns; no new direction found");

  GaussianColumnResult out;
  out.v = canonical_unit(best.x.head(I));  // l_J already multiplies the normalized square
  out.l = best.x.tail(J);
  out.objective = resid;
  return out;
}

RecoveryResult recover(const CumulantPair& cp, int num_sources, const RecoverConfig& cfg) {
  const int I = cp.dim();
  const int rank = num_sources > 0 ? num_sources - 1 : 0;
  Decomposition dec;
  if (num_sources == 1) {
    dec.vectors.resize(I, 0);  // only the Gaussian column remains
  } else {
    dec = decompose_k4(cp.k4, rank, cfg, cp.provenance);
  }
  const int R = static_cast<int>(dec.vectors.cols());
  const int J = R + 1;

  GaussianColumnResult g = recover_gaussian_column(cp.k2, dec.vectors, cfg);

  Eigen::MatrixXd A(I, J);
  A.leftCols(R) = dec.vectors;
  A.col(J - 1) = g.v;

  RecoveryResult out;
  out.A_hat = MixingMatrix(A);
  out.coefficients = g.l;
  out.decomposition = std::move(dec);

  SymMat fit(I);
  for (int j = 0; j < J; ++j) fit += g.l[j] * outer_square(A.col(j));
  out.objective = frobenius_distance(cp.k2, fit);
  return out;
}

}  // namespace oica
