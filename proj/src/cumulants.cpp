#include "oica/cumulants.hpp"

#include <cmath>

#include "oica/errors.hpp"

namespace oica {

std::pair<double, double> source_moments(const SourceDesc& d) {
  return std::visit(
      [](const auto& v) -> std::pair<double, double> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          require(v.rate > 0, errc::invalid_data, "exponential rate must be positive");
          const double s2 = 1.0 / (v.rate * v.rate);
          return {s2, 6.0 * s2 * s2};  // cumulants of exp(rate) are (n-1)!/rate^n
        } else if constexpr (std::is_same_v<T, StudentT>) {
          require(v.dof > 4, errc::undefined_fourth_moment,
                  "student t needs dof > 4 for a finite fourth cumulant");
          const double s2 = v.dof / (v.dof - 2.0);
          const double excess = 6.0 / (v.dof - 4.0);
          return {s2, excess * s2 * s2};
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          require(v.variance > 0, errc::invalid_data, "gaussian variance must be positive");
          return {v.variance, 0.0};
        } else {
          require(v.variance > 0, errc::invalid_data, "variance must be positive");
          return {v.variance, v.fourth_cumulant};
        }
      },
      d);
}

bool is_gaussian(const SourceDesc& d) { return std::holds_alternative<Gaussian>(d); }

bool is_sampleable(const SourceDesc& d) { return !std::holds_alternative<Moments>(d); }

double sample_source(const SourceDesc& d, Rng& rng) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Exponential>) {
          return rng.exponential(v.rate);  // cumulant estimators center internally
        } else if constexpr (std::is_same_v<T, StudentT>) {
          require(v.dof > 4, errc::undefined_fourth_moment,
                  "student t needs dof > 4 for a finite fourth cumulant");
          return rng.student_t(v.dof);
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return std::sqrt(v.variance) * rng.normal();
        } else {
          fail(errc::model_violation, "moments descriptor has no sampling distribution");
        }
      },
      d);
}

std::optional<int> SourceSpec::gaussian_index() const {
  for (int j = 0; j < size(); ++j)
    if (is_gaussian(entries[j])) return j;
  return std::nullopt;
}

void SourceSpec::validate(bool strict) const {
  int gauss = 0;
  for (const auto& e : entries)
    if (is_gaussian(e)) ++gauss;
  require(gauss <= 1, errc::model_violation, "at most one Gaussian source is allowed");
  if (strict) {
    for (const auto& e : entries) {
      if (is_gaussian(e)) continue;
      require(source_moments(e).second != 0.0, errc::model_violation,
              "non-Gaussian sources need a nonzero fourth cumulant");
    }
  }
}

CumulantPair population_cumulants(const Eigen::MatrixXd& A, const SourceSpec& spec) {
  const int I = static_cast<int>(A.rows());
  const int J = static_cast<int>(A.cols());
  require(spec.size() == J, errc::spec_mismatch, "source spec length must equal column count");
  spec.validate(false);

  CumulantPair out{SymMat(I), SymTen4(I), Provenance::population, 0};
  for (int j = 0; j < J; ++j) {
    const auto [s2, l4] = source_moments(spec.entries[j]);
    const Eigen::VectorXd a = A.col(j);
    out.k2 += s2 * outer_square(a);
    if (!is_gaussian(spec.entries[j]) && l4 != 0.0) out.k4 += l4 * outer_fourth(a);
  }
  return out;
}

CumulantPair sample_cumulants(const Eigen::Ref<const Eigen::MatrixXd>& X) {
  const long n = X.rows();
  const int I = static_cast<int>(X.cols());
  require(n >= 2, errc::insufficient_data, "sample cumulants need at least 2 observations");
  require(X.allFinite(), errc::invalid_data, "data contains non-finite entries");

  const Eigen::RowVectorXd mean = X.colwise().mean();
  const int m = pair_count(I);
  const long long q = quad_count(I);

  Eigen::VectorXd s = Eigen::VectorXd::Zero(m);   // packed plug-in covariance
  Eigen::VectorXd m4 = Eigen::VectorXd::Zero(q);  // packed central fourth moments

  // Fixed block size keeps the summation order (and thus the result) stable.
  constexpr long kBlock = 8192;
  Eigen::MatrixXd pairprod(kBlock, m);
  for (long start = 0; start < n; start += kBlock) {
    const long rows = std::min(kBlock, n - start);
    const Eigen::MatrixXd Y = X.middleRows(start, rows).rowwise() - mean;
    for_each_pair(I, [&](int i, int j, int idx) {
      pairprod.col(idx).head(rows) = Y.col(i).cwiseProduct(Y.col(j));
    });
    for_each_pair(I, [&](int, int, int idx) { s[idx] += pairprod.col(idx).head(rows).sum(); });
    for_each_quad(I, [&](int i, int j, int k, int l, long long idx) {
      m4[idx] +=
          pairprod.col(pair_index(i, j)).head(rows).dot(pairprod.col(pair_index(k, l)).head(rows));
    });
  }
  s /= static_cast<double>(n);
  m4 /= static_cast<double>(n);

  CumulantPair out{SymMat(I, s), SymTen4(I), Provenance::sample, n};
  const SymMat& k2 = out.k2;
  for_each_quad(I, [&](int i, int j, int k, int l, long long idx) {
    out.k4.data()[idx] =
        m4[idx] - (k2(i, j) * k2(k, l) + k2(i, k) * k2(j, l) + k2(i, l) * k2(j, k));
  });
  return out;
}

}  // namespace oica
