#include "oica/optimize.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "oica/errors.hpp"
#include "oica/rng.hpp"

namespace oica {

namespace {

constexpr double kGolden = 1.618033988749895;
constexpr double kTiny = 1e-25;

struct LineFn {
  const Objective& f;
  const Eigen::VectorXd& x;
  const Eigen::VectorXd& u;
  bool* saw_nonfinite;
  Eigen::VectorXd* scratch;

  double operator()(double t) const {
    *scratch = x;
    scratch->noalias() += t * u;
    const double v = f(*scratch);
    if (!std::isfinite(v)) {
      *saw_nonfinite = true;
      return std::numeric_limits<double>::infinity();
    }
    return v;
  }
};

// Bracket a minimum of phi starting from (0, step); downhill golden expansion
// with parabolic probes, bounded by glimit.
bool bracket(const LineFn& phi, double f0, double& a, double& b, double& c, double& fa, double& fb,
             double& fc) {
  a = 0.0;
  fa = f0;
  b = 1.0;
  fb = phi(b);
  if (fb > fa) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  c = b + kGolden * (b - a);
  fc = phi(c);
  int guard = 0;
  while (fb > fc) {
    if (++guard > 200) return false;
    const double r = (b - a) * (fb - fc);
    const double q = (b - c) * (fb - fa);
    const double denom = 2.0 * std::copysign(std::max(std::abs(q - r), kTiny), q - r);
    double u = b - ((b - c) * q - (b - a) * r) / denom;
    const double ulim = b + 100.0 * (c - b);
    double fu;
    if ((b - u) * (u - c) > 0.0) {
      fu = phi(u);
      if (fu < fc) {
        a = b;
        fa = fb;
        b = u;
        fb = fu;
        break;
      }
      if (fu > fb) {
        c = u;
        fc = fu;
        break;
      }
      u = c + kGolden * (c - b);
      fu = phi(u);
    } else if ((c - u) * (u - ulim) > 0.0) {
      fu = phi(u);
      if (fu < fc) {
        b = c;
        c = u;
        u = c + kGolden * (c - b);
        fb = fc;
        fc = fu;
        fu = phi(u);
      }
    } else if ((u - ulim) * (ulim - c) >= 0.0) {
      u = ulim;
      fu = phi(u);
    } else {
      u = c + kGolden * (c - b);
      fu = phi(u);
    }
    a = b;
    b = c;
    c = u;
    fa = fb;
    fb = fc;
    fc = fu;
  }
  return fb <= fa && fb <= fc;
}

// Brent's method on a bracketed minimum.
std::pair<double, double> brent(const LineFn& phi, double ax, double bx, double cx, double fbx,
                                double tol) {
  constexpr double kCGold = 0.3819660112501051;
  constexpr double kZeps = 1e-18;
  double a = std::min(ax, cx), b = std::max(ax, cx);
  double x = bx, w = bx, v = bx;
  double fx = fbx, fw = fbx, fv = fbx;
  double d = 0.0, e = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = tol * std::abs(x) + kZeps;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    if (std::abs(e) > tol1) {
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (b - x)) {
        e = (x >= xm) ? a - x : b - x;
        d = kCGold * e;
      } else {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
      }
    } else {
      e = (x >= xm) ? a - x : b - x;
      d = kCGold * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
    const double fu = phi(u);
    if (fu <= fx) {
      if (u >= x)
        a = x;
      else
        b = x;
      v = w;
      w = x;
      x = u;
      fv = fw;
      fw = fx;
      fx = fu;
    } else {
      if (u < x)
        a = u;
      else
        b = u;
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return {x, fx};
}

// Minimize along direction u from x; returns the accepted step and value.
std::pair<double, double> line_minimize(const Objective& f, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& u, double fx,
                                        bool* saw_nonfinite, Eigen::VectorXd* scratch) {
  LineFn phi{f, x, u, saw_nonfinite, scratch};
  double a, b, c, fa, fb, fc;
  if (!bracket(phi, fx, a, b, c, fa, fb, fc)) return {0.0, fx};
  auto [t, ft] = brent(phi, a, b, c, fb, 1e-8);
  if (!(ft < fx)) return {0.0, fx};
  return {t, ft};
}

}  // namespace

MinimizeResult powell_minimize(const Objective& f, const Eigen::VectorXd& x0,
                               const MinimizeConfig& cfg) {
  const int n = static_cast<int>(x0.size());
  const int max_iters = cfg.max_iters > 0 ? cfg.max_iters : 1000 * n;

  Eigen::VectorXd x = x0;
  double fx = f(x);
  require(std::isfinite(fx), errc::invalid_start, "objective is non-finite at the start point");

  Eigen::MatrixXd U = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd scratch(n);
  int since_reset = 0;
  MinimizeResult res;
  res.iters_used = 0;

  for (int iter = 1; iter <= max_iters; ++iter) {
    res.iters_used = iter;
    const double f_begin = fx;
    const Eigen::VectorXd x_begin = x;
    bool saw_nonfinite = false;

    int ibig = 0;
    double del = 0.0;
    for (int i = 0; i < n; ++i) {
      auto [t, ft] = line_minimize(f, x, U.col(i), fx, &saw_nonfinite, &scratch);
      if (fx - ft > del) {
        del = fx - ft;
        ibig = i;
      }
      x += t * U.col(i);
      fx = ft;
      if (cfg.trace) cfg.trace->push_back(fx);
    }

    const bool fsmall = 2.0 * (f_begin - fx) <= cfg.ftol * (std::abs(f_begin) + std::abs(fx)) + kTiny;
    const bool xsmall = (x - x_begin).norm() <= cfg.xtol * (1.0 + x.norm());
    if (fsmall || xsmall) {
      res.converged = true;
      break;
    }

    if (saw_nonfinite) {
      // step into a non-finite region was rejected by the line search; start
      // over with coordinate directions
      U.setIdentity();
      since_reset = 0;
      continue;
    }

    // Powell's extrapolation test for replacing a direction.
    const Eigen::VectorXd xe = 2.0 * x - x_begin;
    const double fe = f(xe);
    if (std::isfinite(fe) && fe < f_begin) {
      const double t = 2.0 * (f_begin - 2.0 * fx + fe) * (f_begin - fx - del) * (f_begin - fx - del) -
                       del * (f_begin - fe) * (f_begin - fe);
      if (t < 0.0) {
        Eigen::VectorXd unew = x - x_begin;
        const double un = unew.norm();
        if (un > 0.0) {
          unew /= un;
          auto [t2, ft2] = line_minimize(f, x, unew, fx, &saw_nonfinite, &scratch);
          x += t2 * unew;
          fx = ft2;
          if (cfg.trace) cfg.trace->push_back(fx);
          U.col(ibig) = U.col(n - 1);
          U.col(n - 1) = unew;
          if (std::abs(U.determinant()) < 1e-12) {
            U.setIdentity();
            since_reset = 0;
          }
        }
      }
    }

    if (++since_reset >= n * n) {
      U.setIdentity();
      since_reset = 0;
    }
  }

  res.x = std::move(x);
  res.f = f(res.x);  // re-evaluated on return
  return res;
}

MinimizeResult best_of_restarts(const Objective& f, const StartSampler& sampler,
                                const MinimizeConfig& cfg,
                                const std::function<bool(const MinimizeResult&)>& accept,
                                MinimizeResult* best_rejected) {
  require(cfg.restarts >= 1, errc::invalid_data, "restarts must be positive");
  Rng rng(cfg.seed);
  MinimizeResult best_ok, best_any;
  bool have_ok = false, have_any = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    const Eigen::VectorXd x0 = sampler(rng);
    MinimizeResult res;
    try {
      res = powell_minimize(f, x0, cfg);
    } catch (const Error& e) {
      if (e.code() != errc::invalid_start) throw;
      continue;
    }
    const bool ok = !accept || accept(res);
    if (ok && (!have_ok || res.f < best_ok.f)) {
      best_ok = res;
      have_ok = true;
    }
    if (!ok && (!have_any || res.f < best_any.f)) {
      best_any = res;
      have_any = true;
    }
  }
  if (best_rejected && have_any) *best_rejected = best_any;
  if (have_ok) return best_ok;
  if (have_any) return best_any;
  fail(errc::invalid_start, "all restarts started at non-finite objective values");
}

}  // namespace oica
