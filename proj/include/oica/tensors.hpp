#pragma once

#include <Eigen/Core>
#include <cmath>

#include "oica/errors.hpp"
#include "oica/packing.hpp"

namespace oica {

inline constexpr double kSqrt2 = 1.4142135623730951;

// Symmetric I x I matrix in packed upper-triangular storage, entries M_ij for
// i <= j, in colexicographic order. Immutable use after construction is the
// intended pattern; values are cheap to copy.
template <typename Scalar>
class SymMatT {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  SymMatT() = default;
  explicit SymMatT(int dim) : dim_(dim), data_(Vec::Zero(pair_count(dim))) {}
  SymMatT(int dim, Vec data) : dim_(dim), data_(std::move(data)) {
    require(data_.size() == pair_count(dim_), errc::dimension_mismatch,
            "packed length does not match dimension");
  }

  static SymMatT from_full(const Eigen::Ref<const Mat>& M) {
    SymMatT out(static_cast<int>(M.rows()));
    for_each_pair(out.dim_, [&](int i, int j, int idx) { out.data_[idx] = M(i, j); });
    return out;
  }

  int dim() const { return dim_; }
  const Vec& data() const { return data_; }
  Vec& data() { return data_; }

  Scalar operator()(int i, int j) const {
    if (i > j) std::swap(i, j);
    return data_[pair_index(i, j)];
  }
  Scalar& at(int i, int j) {
    if (i > j) std::swap(i, j);
    return data_[pair_index(i, j)];
  }

  Mat full() const {
    Mat M(dim_, dim_);
    for_each_pair(dim_, [&](int i, int j, int idx) { M(i, j) = M(j, i) = data_[idx]; });
    return M;
  }

  // Isometric coordinates: off-diagonal entries scaled by sqrt(2), so Euclidean
  // norms of packed vectors equal Frobenius norms of the matrices.
  Vec packed_weighted() const {
    Vec w(data_.size());
    for_each_pair(dim_, [&](int i, int j, int idx) {
      w[idx] = (i == j) ? data_[idx] : Scalar(kSqrt2) * data_[idx];
    });
    return w;
  }

  static SymMatT from_packed_weighted(int dim, const Vec& w) {
    SymMatT out(dim);
    for_each_pair(dim, [&](int i, int j, int idx) {
      out.data_[idx] = (i == j) ? w[idx] : w[idx] / Scalar(kSqrt2);
    });
    return out;
  }

  SymMatT& operator+=(const SymMatT& o) {
    require(dim_ == o.dim_, errc::dimension_mismatch, "SymMat dims differ");
    data_ += o.data_;
    return *this;
  }
  SymMatT& operator-=(const SymMatT& o) {
    require(dim_ == o.dim_, errc::dimension_mismatch, "SymMat dims differ");
    data_ -= o.data_;
    return *this;
  }
  SymMatT& operator*=(Scalar c) {
    data_ *= c;
    return *this;
  }
  friend SymMatT operator+(SymMatT a, const SymMatT& b) { return a += b; }
  friend SymMatT operator-(SymMatT a, const SymMatT& b) { return a -= b; }
  friend SymMatT operator*(Scalar c, SymMatT a) { return a *= c; }

 private:
  int dim_ = 0;
  Vec data_;
};

// Symmetric order-4 tensor of format I x I x I x I, packed over sorted
// multi-indices i <= j <= k <= l. Each stored entry carries its multinomial
// multiplicity for inner products.
template <typename Scalar>
class SymTen4T {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SymTen4T() = default;
  explicit SymTen4T(int dim) : dim_(dim), data_(Vec::Zero(quad_count(dim))) {}
  SymTen4T(int dim, Vec data) : dim_(dim), data_(std::move(data)) {
    require(data_.size() == quad_count(dim_), errc::dimension_mismatch,
            "packed length does not match dimension");
  }

  int dim() const { return dim_; }
  const Vec& data() const { return data_; }
  Vec& data() { return data_; }

  Scalar operator()(int a, int b, int c, int d) const {
    auto s = sorted4(a, b, c, d);
    return data_[quad_index(s[0], s[1], s[2], s[3])];
  }
  Scalar& at(int a, int b, int c, int d) {
    auto s = sorted4(a, b, c, d);
    return data_[quad_index(s[0], s[1], s[2], s[3])];
  }

  // T(v,v,v,v) = sum over all I^4 tuples, computed on packed entries with
  // multinomial weights.
  Scalar apply(const Eigen::Ref<const Vec>& v) const {
    Scalar acc = 0;
    for_each_quad(dim_, [&](int i, int j, int k, int l, long long idx) {
      acc += Scalar(quad_multiplicity(i, j, k, l)) * data_[idx] * v[i] * v[j] * v[k] * v[l];
    });
    return acc;
  }

  SymTen4T& operator+=(const SymTen4T& o) {
    require(dim_ == o.dim_, errc::dimension_mismatch, "SymTen4 dims differ");
    data_ += o.data_;
    return *this;
  }
  SymTen4T& operator-=(const SymTen4T& o) {
    require(dim_ == o.dim_, errc::dimension_mismatch, "SymTen4 dims differ");
    data_ -= o.data_;
    return *this;
  }
  SymTen4T& operator*=(Scalar c) {
    data_ *= c;
    return *this;
  }
  friend SymTen4T operator+(SymTen4T a, const SymTen4T& b) { return a += b; }
  friend SymTen4T operator-(SymTen4T a, const SymTen4T& b) { return a -= b; }
  friend SymTen4T operator*(Scalar c, SymTen4T a) { return a *= c; }

 private:
  int dim_ = 0;
  Vec data_;
};

using SymMat = SymMatT<double>;
using SymTen4 = SymTen4T<double>;

// Order-(2,2) flattening of a SymTen4 in weighted packed coordinates; the
// quadratic-form identity packed_w(xx^T)^T F packed_w(yy^T) = T(x,x,y,y) is
// exact by choice of weights.
struct FlatMat {
  int dim = 0;  // tensor dimension I; F is m x m with m = I(I+1)/2
  Eigen::MatrixXd F;
};

template <typename Derived>
SymMatT<typename Derived::Scalar> outer_square(const Eigen::MatrixBase<Derived>& v) {
  SymMatT<typename Derived::Scalar> out(static_cast<int>(v.size()));
  for_each_pair(out.dim(), [&](int i, int j, int idx) { out.data()[idx] = v[i] * v[j]; });
  return out;
}

template <typename Derived>
SymTen4T<typename Derived::Scalar> outer_fourth(const Eigen::MatrixBase<Derived>& v) {
  SymTen4T<typename Derived::Scalar> out(static_cast<int>(v.size()));
  for_each_quad(out.dim(), [&](int i, int j, int k, int l, long long idx) {
    out.data()[idx] = v[i] * v[j] * v[k] * v[l];
  });
  return out;
}

struct OuterPower {
  // exactly one of the two is populated, per the requested order
  SymMat mat;
  SymTen4 ten;
  int order = 0;
};

inline OuterPower outer_power(const Eigen::VectorXd& v, int d) {
  require(v.size() >= 1, errc::invalid_data, "outer_power needs a nonempty vector");
  if (d == 2) return {outer_square(v), {}, 2};
  if (d == 4) return {{}, outer_fourth(v), 4};
  fail(errc::unsupported_order, "outer_power supports d in {2,4}");
}

// Frobenius inner product on packed storage (off-diagonal entries weighted x2).
inline double frobenius_dot(const SymMat& M, const SymMat& N) {
  require(M.dim() == N.dim(), errc::dimension_mismatch, "SymMat dims differ");
  double acc = 0;
  for_each_pair(M.dim(), [&](int i, int j, int idx) {
    acc += (i == j ? 1.0 : 2.0) * M.data()[idx] * N.data()[idx];
  });
  return acc;
}

inline double frobenius_norm(const SymMat& M) { return std::sqrt(frobenius_dot(M, M)); }

inline double frobenius_distance(const SymMat& M, const SymMat& N) {
  require(M.dim() == N.dim(), errc::dimension_mismatch, "SymMat dims differ");
  return frobenius_norm(M - N);
}

inline double frobenius_dot(const SymTen4& S, const SymTen4& T) {
  require(S.dim() == T.dim(), errc::dimension_mismatch, "SymTen4 dims differ");
  double acc = 0;
  for_each_quad(S.dim(), [&](int i, int j, int k, int l, long long idx) {
    acc += quad_multiplicity(i, j, k, l) * S.data()[idx] * T.data()[idx];
  });
  return acc;
}

inline double frobenius_norm(const SymTen4& T) { return std::sqrt(frobenius_dot(T, T)); }

inline double frobenius_distance(const SymTen4& S, const SymTen4& T) {
  require(S.dim() == T.dim(), errc::dimension_mismatch, "SymTen4 dims differ");
  return frobenius_norm(S - T);
}

inline FlatMat flatten(const SymTen4& T) {
  const int I = T.dim();
  const int m = pair_count(I);
  FlatMat out{I, Eigen::MatrixXd(m, m)};
  for_each_pair(I, [&](int i, int j, int row) {
    const double wr = (i == j) ? 1.0 : kSqrt2;
    for_each_pair(I, [&](int k, int l, int col) {
      const double wc = (k == l) ? 1.0 : kSqrt2;
      out.F(row, col) = wr * wc * T(i, j, k, l);
    });
  });
  return out;
}

}  // namespace oica
