#pragma once

#include <Eigen/Core>
#include <optional>
#include <variant>
#include <vector>

#include "oica/rng.hpp"
#include "oica/tensors.hpp"

namespace oica {

struct Exponential {
  double rate = 1.0;
};
struct StudentT {
  double dof = 5.0;  // fourth moment requires dof > 4
};
struct Gaussian {
  double variance = 1.0;
};
// Population-only descriptor: variance and fourth cumulant given directly.
struct Moments {
  double variance = 1.0;
  double fourth_cumulant = 6.0;
};

using SourceDesc = std::variant<Exponential, StudentT, Gaussian, Moments>;

// (variance, fourth cumulant) of a descriptor.
std::pair<double, double> source_moments(const SourceDesc& d);

bool is_gaussian(const SourceDesc& d);
bool is_sampleable(const SourceDesc& d);

// A centered draw of the source (Gaussian and StudentT are symmetric already;
// Exponential is shifted by its mean so samples match the population moments).
double sample_source(const SourceDesc& d, Rng& rng);

struct SourceSpec {
  std::vector<SourceDesc> entries;

  int size() const { return static_cast<int>(entries.size()); }
  std::optional<int> gaussian_index() const;

  // Model checks: at most one Gaussian entry; throws model_violation otherwise.
  // When `strict`, additionally requires nonzero fourth cumulants for the
  // non-Gaussian entries.
  void validate(bool strict = false) const;
};

enum class Provenance { population, sample };

struct CumulantPair {
  SymMat k2;
  SymTen4 k4;
  Provenance provenance = Provenance::population;
  long sample_count = 0;

  int dim() const { return k2.dim(); }
};

// k2 = sum_j sigma_j a_j^{x2};  k4 = sum over non-Gaussian j of lambda_j a_j^{x4}.
CumulantPair population_cumulants(const Eigen::MatrixXd& A, const SourceSpec& spec);

// Plug-in (divide by n) estimators; k4_{ijkl} = m4_{ijkl} - (s_ij s_kl + s_ik s_jl + s_il s_jk)
// with central sample moments. Rows of X are observations.
CumulantPair sample_cumulants(const Eigen::Ref<const Eigen::MatrixXd>& X);

}  // namespace oica
