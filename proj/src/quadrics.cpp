#include "oica/quadrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "oica/rng.hpp"
#include "oica/tensors.hpp"

namespace oica {

std::vector<Eigen::VectorXd> linear_relations(const Eigen::MatrixXd& A) {
  const int I = static_cast<int>(A.rows());
  const int J = static_cast<int>(A.cols());
  const int m = pair_count(I);
  Eigen::MatrixXd K(m, J);
  for (int j = 0; j < J; ++j) K.col(j) = outer_square(A.col(j)).data();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv[0] > 0 && sv[rank] > 1e-10 * sv[0]) ++rank;

  std::vector<Eigen::VectorXd> rels;
  rels.reserve(m - rank);
  for (int c = rank; c < m; ++c) rels.push_back(svd.matrixU().col(c));
  return rels;
}

QuadricSystem quadric_system(const Eigen::MatrixXd& A) {
  QuadricSystem sys;
  sys.nvars = static_cast<int>(A.rows());
  sys.homogeneous = true;
  sys.forms = linear_relations(A);
  return sys;
}

namespace {

Eigen::MatrixXd unpack_form(const Eigen::VectorXd& packed, int nc) {
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(nc, nc);
  for_each_pair(nc, [&](int i, int j, int idx) {
    if (i == j)
      F(i, i) = packed[idx];
    else
      F(i, j) = F(j, i) = 0.5 * packed[idx];
  });
  return F;
}

Eigen::VectorXd pack_form(const Eigen::MatrixXd& F) {
  const int nc = static_cast<int>(F.rows());
  Eigen::VectorXd out(pair_count(nc));
  for_each_pair(nc, [&](int i, int j, int idx) { out[idx] = (i == j) ? F(i, i) : 2.0 * F(i, j); });
  return out;
}

// x = T y on homogeneous coordinates (x, h); forms map F -> T^T F T and the
// tracked solutions map through the inverse.
void transform_forms(std::vector<Eigen::VectorXd>& forms, const Eigen::MatrixXd& T) {
  const int nc = static_cast<int>(T.rows());
  for (auto& f : forms) f = pack_form(T.transpose() * unpack_form(f, nc) * T);
}

// rotation y = Q x (solutions rotate forward)
void apply_rotation(QuadricSystem& sys, std::vector<Eigen::VectorXcd>& sols,
                    const Eigen::MatrixXd& Q) {
  const int nc = sys.ncoords();
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(nc, nc);
  T.topLeftCorner(sys.nvars, sys.nvars) = Q.transpose();
  transform_forms(sys.forms, T);
  for (auto& s : sols) s = Q * s;
}

// shift y = x + c e1 (solutions translate forward)
void apply_shift(QuadricSystem& sys, std::vector<Eigen::VectorXcd>& sols, double c) {
  const int nc = sys.ncoords();
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(nc, nc);
  T(0, nc - 1) = -c;
  transform_forms(sys.forms, T);
  for (auto& s : sols) s[0] += c;
}

Eigen::MatrixXd random_rotation(int n, Rng& rng) {
  if (n == 1) return Eigen::MatrixXd::Ones(1, 1);
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (R(i, i) < 0) Q.col(i) = -Q.col(i);
  return Q;
}

Eigen::VectorXd widen_form(const Eigen::VectorXd& packed, int old_nc) {
  // old coordinate order x_1..x_k, h; new order x_1..x_k, x_{k+1}, h
  const int new_nc = old_nc + 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(pair_count(new_nc));
  auto remap = [&](int i) { return i == old_nc - 1 ? new_nc - 1 : i; };
  for_each_pair(old_nc, [&](int i, int j, int idx) {
    int ni = remap(i), nj = remap(j);
    if (ni > nj) std::swap(ni, nj);
    out[pair_index(ni, nj)] = packed[idx];
  });
  return out;
}

bool is_real_point(const Eigen::VectorXcd& z) {
  for (int i = 0; i < z.size(); ++i)
    if (std::abs(z[i].imag()) > 1e-8) return false;
  return true;
}

}  // namespace

TrackedSystem build_real_count_system(int I, int ell) {
  require(I >= 2, errc::invalid_data, "need I >= 2");
  const long long total = 1LL << (I - 1);
  require(ell >= 0 && ell <= total, errc::invalid_count, "real count must lie in [0, 2^(I-1)]");
  require(ell % 2 == 0, errc::invalid_count, "real count must be even");

  // Plan the per-level real counts backwards: r -> 2r (doubling) when the
  // parent count is 0 mod 4, else r -> 2r - 2 (circle quadric).
  const int levels = I - 1;
  std::vector<int> target(levels + 1, 0);
  target[levels] = ell;
  for (int k = levels; k > 1; --k) {
    if (target[k] % 4 == 0)
      target[k - 1] = target[k] / 2;
    else
      target[k - 1] = (target[k] + 2) / 2;
  }

  Rng rng(derive_seed({0x9a0d0ull + static_cast<std::uint64_t>(I), static_cast<std::uint64_t>(ell)}));

  TrackedSystem ts;
  ts.system.nvars = 1;
  ts.system.homogeneous = false;

  {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(pair_count(2));  // coords (x1, h)
    f[pair_index(0, 0)] = 1.0;
    const bool real_pair = target[1] == 2;
    f[pair_index(1, 1)] = real_pair ? -1.0 : 1.0;  // x^2 - 1 or x^2 + 1
    ts.system.forms.push_back(f);
    Eigen::VectorXcd s1(1), s2(1);
    if (real_pair) {
      s1[0] = 1.0;
      s2[0] = -1.0;
      ts.real_count = 2;
    } else {
      s1[0] = std::complex<double>(0, 1);
      s2[0] = std::complex<double>(0, -1);
      ts.real_count = 0;
    }
    ts.solutions = {s1, s2};
    ts.trace.push_back({'B', 0, ts.real_count});
  }

  for (int k = 1; k < levels; ++k) {
    const int nv = ts.system.nvars;
    const bool doubling = target[k + 1] == 2 * target[k];

    if (!doubling) {
      // Separate the real roots along x1: rotate (when possible) for distinct
      // values, then shift so every real x1 is positive.
      if (nv >= 2) {
        Eigen::MatrixXd bestQ;
        double best_gap = -1.0;
        for (int attempt = 0; attempt < 64; ++attempt) {
          const Eigen::MatrixXd Q = random_rotation(nv, rng);
          std::vector<double> xs;
          for (const auto& sol : ts.solutions)
            if (is_real_point(sol)) xs.push_back((Q * sol.real())[0]);
          std::sort(xs.begin(), xs.end(), std::greater<>());
          double min_gap = std::numeric_limits<double>::infinity();
          for (size_t t = 0; t + 1 < xs.size(); ++t) min_gap = std::min(min_gap, xs[t] - xs[t + 1]);
          if (xs.size() >= 2 && min_gap > 1e-6 && xs[0] - xs[1] > best_gap) {
            best_gap = xs[0] - xs[1];
            bestQ = Q;
          }
        }
        require(best_gap > 0, errc::invalid_count, "could not separate real roots");
        apply_rotation(ts.system, ts.solutions, bestQ);
      }
      double xmin = std::numeric_limits<double>::infinity();
      for (const auto& sol : ts.solutions)
        if (is_real_point(sol)) xmin = std::min(xmin, sol[0].real());
      apply_shift(ts.system, ts.solutions, 1.0 - xmin);
    }

    const int nc = ts.system.ncoords();
    for (auto& f : ts.system.forms) f = widen_form(f, nc);
    const int new_nv = nv + 1;
    const int new_nc = new_nv + 1;
    ts.system.nvars = new_nv;

    std::vector<Eigen::VectorXcd> next;
    next.reserve(ts.solutions.size() * 2);
    const int before = ts.real_count;

    if (doubling) {
      // (x1 - alpha)^2 - x_new^2 with alpha beyond every |x1|
      double amax = 0.0;
      for (const auto& sol : ts.solutions) amax = std::max(amax, std::abs(sol[0]));
      const double alpha = amax + 1.0;
      Eigen::VectorXd f = Eigen::VectorXd::Zero(pair_count(new_nc));
      f[pair_index(0, 0)] = 1.0;
      f[pair_index(0, new_nc - 1)] = -2.0 * alpha;
      f[pair_index(new_nc - 1, new_nc - 1)] = alpha * alpha;
      f[pair_index(new_nv - 1, new_nv - 1)] = -1.0;
      ts.system.forms.push_back(f);

      int real_after = 0;
      for (const auto& sol : ts.solutions) {
        for (int sign : {+1, -1}) {
          Eigen::VectorXcd ext(new_nv);
          ext.head(nv) = sol;
          ext[new_nv - 1] = double(sign) * (sol[0] - alpha);
          if (is_real_point(ext)) ++real_after;
          next.push_back(std::move(ext));
        }
      }
      ts.solutions = std::move(next);
      ts.real_count = real_after;
      ts.trace.push_back({'D', before, real_after});
    } else {
      // -beta^2 + x1^2 + x_new^2 with beta between the two largest real x1
      std::vector<double> xs;
      for (const auto& sol : ts.solutions)
        if (is_real_point(sol)) xs.push_back(sol[0].real());
      std::sort(xs.begin(), xs.end(), std::greater<>());
      require(xs.size() >= 2, errc::invalid_count, "circle branch needs two real roots");
      double beta = 0.5 * (xs[0] + xs[1]);
      for (double frac : {0.5, 0.375, 0.625, 0.25, 0.75, 0.4375, 0.5625}) {
        beta = xs[1] + frac * (xs[0] - xs[1]);
        bool clear = true;
        for (const auto& sol : ts.solutions)
          if (std::abs(std::abs(sol[0]) - beta) < 1e-9) clear = false;
        if (clear) break;
      }

      Eigen::VectorXd f = Eigen::VectorXd::Zero(pair_count(new_nc));
      f[pair_index(0, 0)] = 1.0;
      f[pair_index(new_nv - 1, new_nv - 1)] = 1.0;
      f[pair_index(new_nc - 1, new_nc - 1)] = -beta * beta;
      ts.system.forms.push_back(f);

      int real_after = 0;
      for (const auto& sol : ts.solutions) {
        const std::complex<double> w =
            std::sqrt(std::complex<double>(beta * beta, 0) - sol[0] * sol[0]);
        for (int sign : {+1, -1}) {
          Eigen::VectorXcd ext(new_nv);
          ext.head(nv) = sol;
          ext[new_nv - 1] = double(sign) * w;
          if (is_real_point(ext)) ++real_after;
          next.push_back(std::move(ext));
        }
      }
      ts.solutions = std::move(next);
      ts.real_count = real_after;
      ts.trace.push_back({'C', before, real_after});
    }
  }

  return ts;
}

}  // namespace oica
