#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace oica {

struct MinimizeConfig {
  // <= 0 means 1000 * dimension, matching the usual derivative-free default.
  int max_iters = 0;
  double ftol = 1e-10;
  double xtol = 1e-10;
  int restarts = 10;
  std::uint64_t seed = 0;
  // Optional trace of accepted line-search objective values (test hook).
  std::vector<double>* trace = nullptr;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double f = std::numeric_limits<double>::quiet_NaN();
  int iters_used = 0;
  bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;
using StartSampler = std::function<Eigen::VectorXd(class Rng&)>;

// Powell's conjugate-direction minimization with Brent line searches,
// periodic direction resets, and rejection of non-finite steps.
MinimizeResult powell_minimize(const Objective& f, const Eigen::VectorXd& x0,
                               const MinimizeConfig& cfg);

// Runs cfg.restarts independent minimizations from sampled starts and returns
// the best by (objective, restart index). Deterministic given cfg.seed.
// An optional acceptance predicate restricts the selection; when no run is
// accepted the best overall is returned (callers re-test acceptance). The
// best rejected result is reported through best_rejected when requested.
MinimizeResult best_of_restarts(const Objective& f, const StartSampler& sampler,
                                const MinimizeConfig& cfg,
                                const std::function<bool(const MinimizeResult&)>& accept = {},
                                MinimizeResult* best_rejected = nullptr);

}  // namespace oica
