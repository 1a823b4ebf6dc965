#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "oica/cumulants.hpp"
#include "oica/recovery.hpp"

namespace oica {

// Random unit-column mixing matrix with canonical signs; redrawn whenever a
// collinear pair appears.
MixingMatrix generate_mixing(int I, int J, std::uint64_t seed);

// Rows are independent draws of A * s.
Eigen::MatrixXd sample_mixture(const Eigen::MatrixXd& A, const SourceSpec& spec, long n,
                               std::uint64_t seed);

// Greedy column matching: positions 1..J-1 pick the unused estimate column of
// largest |cosine| (ties to the lowest index) and absorb signs; the Gaussian
// column stays last and is only sign-aligned.
MixingMatrix greedy_match(const MixingMatrix& A_true, const MixingMatrix& A_hat);

// sqrt(sum_ij (a_ij - a'_ij)^2 / J)
double rel_frob_error(const MixingMatrix& A_true, const MixingMatrix& A_matched);

enum class CumulantMode { population, sample };

struct SweepConfig {
  int I = 6;
  std::vector<int> J_range;
  int trials = 100;
  CumulantMode mode = CumulantMode::population;
  long n = 0;  // sample mode only
  SourceDesc non_gaussian = Moments{1.0, 6.0};
  double gaussian_variance = 1.0;
  std::uint64_t seed = 0;
  RecoverConfig recover;
  int threads = 0;  // 0: use OICA_THREADS or hardware concurrency
};

struct SweepRow {
  int I = 0;
  int J = 0;
  int trial = 0;
  long n = -1;  // -1 means population cumulants
  double error = 0.0;
  double objective = 0.0;
  std::uint64_t seed_used = 0;
  std::string reason;  // set on failure; error and objective become NaN
};

// Per (J, trial): derive a trial seed, generate A, build cumulants, recover,
// match, and score. Failures become NaN rows; rows are ordered by (J, trial)
// and are a pure function of the config.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

// Source spec with J-1 copies of the template and a trailing Gaussian.
SourceSpec default_sweep_spec(const SourceDesc& non_gaussian, double gaussian_variance, int J);

int resolve_threads(int requested);

}  // namespace oica
