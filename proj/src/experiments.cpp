#include "oica/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <thread>

#include "oica/errors.hpp"
#include "oica/rng.hpp"

namespace oica {

MixingMatrix generate_mixing(int I, int J, std::uint64_t seed) {
  Rng rng(derive_seed({seed, 0x6e4du}));
  for (;;) {
    Eigen::MatrixXd A(I, J);
    for (int j = 0; j < J; ++j) A.col(j) = canonical_unit(rng.normal_vec(I));
    MixingMatrix M(std::move(A));
    if (M.no_collinear_pair(1e-9)) return M;
  }
}

Eigen::MatrixXd sample_mixture(const Eigen::MatrixXd& A, const SourceSpec& spec, long n,
                               std::uint64_t seed) {
  const int J = static_cast<int>(A.cols());
  require(spec.size() == J, errc::spec_mismatch, "source spec length must equal column count");
  spec.validate(false);
  for (const auto& e : spec.entries)
    require(is_sampleable(e), errc::model_violation,
            "moments descriptors cannot be sampled; use a concrete distribution");

  Rng rng(derive_seed({seed, 0x5a3cu}));
  Eigen::MatrixXd X(n, A.rows());
  Eigen::VectorXd s(J);
  for (long t = 0; t < n; ++t) {
    for (int j = 0; j < J; ++j) s[j] = sample_source(spec.entries[j], rng);
    X.row(t) = (A * s).transpose();
  }
  return X;
}

MixingMatrix greedy_match(const MixingMatrix& A_true, const MixingMatrix& A_hat) {
  require(A_true.rows() == A_hat.rows() && A_true.cols() == A_hat.cols(),
          errc::dimension_mismatch, "matrices must have the same shape");
  const int J = A_true.cols();
  const Eigen::MatrixXd& T = A_true.matrix();
  const Eigen::MatrixXd& H = A_hat.matrix();

  Eigen::MatrixXd out(A_true.rows(), J);
  std::vector<bool> used(J, false);
  for (int j = 0; j + 1 < J; ++j) {
    int pick = -1;
    double best = -1.0;
    double best_cos = 0.0;
    for (int c = 0; c + 1 < J; ++c) {
      if (used[c]) continue;
      const double denom = T.col(j).norm() * H.col(c).norm();
      const double cos = denom > 0 ? T.col(j).dot(H.col(c)) / denom : 0.0;
      if (std::abs(cos) > best) {  // ties keep the lowest index
        best = std::abs(cos);
        best_cos = cos;
        pick = c;
      }
    }
    used[pick] = true;
    out.col(j) = (best_cos < 0 ? -1.0 : 1.0) * H.col(pick);
  }
  const double last_cos = T.col(J - 1).dot(H.col(J - 1));
  out.col(J - 1) = (last_cos < 0 ? -1.0 : 1.0) * H.col(J - 1);
  return MixingMatrix(std::move(out));
}

double rel_frob_error(const MixingMatrix& A_true, const MixingMatrix& A_matched) {
  require(A_true.rows() == A_matched.rows() && A_true.cols() == A_matched.cols(),
          errc::dimension_mismatch, "matrices must have the same shape");
  const double ss = (A_true.matrix() - A_matched.matrix()).squaredNorm();
  return std::sqrt(ss / A_true.cols());
}

SourceSpec default_sweep_spec(const SourceDesc& non_gaussian, double gaussian_variance, int J) {
  SourceSpec spec;
  spec.entries.assign(J - 1, non_gaussian);
  spec.entries.push_back(Gaussian{gaussian_variance});
  return spec;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("OICA_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

SweepRow run_trial(const SweepConfig& cfg, int J, int trial) {
  SweepRow row;
  row.I = cfg.I;
  row.J = J;
  row.trial = trial;
  row.n = cfg.mode == CumulantMode::sample ? cfg.n : -1;
  row.seed_used = derive_seed({cfg.seed, static_cast<std::uint64_t>(J),
                               static_cast<std::uint64_t>(trial)});
  try {
    const MixingMatrix A = generate_mixing(cfg.I, J, derive_seed({row.seed_used, 1}));
    const SourceSpec spec = default_sweep_spec(cfg.non_gaussian, cfg.gaussian_variance, J);

    CumulantPair cp;
    if (cfg.mode == CumulantMode::population) {
      cp = population_cumulants(A.matrix(), spec);
    } else {
      const Eigen::MatrixXd X = sample_mixture(A.matrix(), spec, cfg.n,
                                               derive_seed({row.seed_used, 2}));
      cp = sample_cumulants(X);
    }

    RecoverConfig rc = cfg.recover;
    rc.seed = derive_seed({row.seed_used, 3});
    const RecoveryResult res = recover(cp, J, rc);
    const MixingMatrix matched = greedy_match(A, res.A_hat);
    row.error = rel_frob_error(A, matched);
    row.objective = res.objective;
  } catch (const Error& e) {
    row.error = std::numeric_limits<double>::quiet_NaN();
    row.objective = std::numeric_limits<double>::quiet_NaN();
    row.reason = std::string(errc_name(e.code())) + ": " + e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  require(cfg.trials >= 1, errc::invalid_data, "trials must be >= 1");
  for (int J : cfg.J_range) require(J >= 2, errc::invalid_data, "J values must be >= 2");

  struct Task {
    int J;
    int trial;
  };
  std::vector<Task> tasks;
  tasks.reserve(cfg.J_range.size() * cfg.trials);
  for (int J : cfg.J_range)
    for (int t = 0; t < cfg.trials; ++t) tasks.push_back({J, t});

  std::vector<SweepRow> rows(tasks.size());
  const int nthreads = std::min<int>(resolve_threads(cfg.threads), static_cast<int>(tasks.size()));
  if (nthreads <= 1) {
    for (size_t i = 0; i < tasks.size(); ++i) rows[i] = run_trial(cfg, tasks[i].J, tasks[i].trial);
  } else {
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
      for (;;) {
        const size_t i = cursor.fetch_add(1);
        if (i >= tasks.size()) break;
        rows[i] = run_trial(cfg, tasks[i].J, tasks[i].trial);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;  // already ordered by (J, trial)
}

}  // namespace oica
