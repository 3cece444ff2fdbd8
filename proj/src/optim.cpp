#include "qimp/optim.hpp"

#include <cmath>
#include <limits>

namespace qimp {

namespace {

struct Eval {
  double f;
  double df;  // directional derivative along the search direction
};

// Cubic interpolation minimizer for the zoom step; falls back to bisection.
double interp_step(double a, double fa, double da, double b, double fb, double db) {
  double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  double disc = d1 * d1 - da * db;
  if (disc >= 0.0) {
    double d2 = std::sqrt(disc) * (b > a ? 1.0 : -1.0);
    double t = b - (b - a) * ((db + d2 - d1) / (db - da + 2.0 * d2));
    double lo = std::min(a, b), hi = std::max(a, b);
    double margin = 0.1 * (hi - lo);
    if (std::isfinite(t) && t > lo + margin && t < hi - margin) return t;
  }
  return 0.5 * (a + b);
}

}  // namespace

BfgsResult bfgs_minimize(const ObjectiveFn& fg, Vec x0, const BfgsOptions& opt) {
  const int n = int(x0.size());
  BfgsResult res;
  res.x = std::move(x0);
  Vec g(n);
  res.f = fg(res.x, &g);
  res.evaluations = 1;
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  if (n == 0) {
    res.converged = true;
    return res;
  }

  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    if (g.cwiseAbs().maxCoeff() <= opt.gtol) {
      res.converged = true;
      return res;
    }
    Vec p = -(H * g);
    double d0 = g.dot(p);
    if (d0 >= 0.0) {  // numerical loss of descent: reset metric
      H.setIdentity();
      p = -g;
      d0 = g.dot(p);
      if (d0 >= 0.0) break;
    }

    // strong Wolfe line search (bracket + zoom)
    const double f0 = res.f;
    auto phi = [&](double alpha, Vec& gout) -> Eval {
      Vec xt = res.x + alpha * p;
      double f = fg(xt, &gout);
      ++res.evaluations;
      return {f, gout.dot(p)};
    };
    double a_prev = 0.0, f_prev = f0, d_prev = d0;
    double alpha = 1.0;
    double a_lo = -1.0, a_hi = -1.0, f_lo = 0.0, d_lo = 0.0, f_hi = 0.0, d_hi = 0.0;
    Vec gt(n);
    bool bracketed = false, found = false;
    double a_final = 0.0, f_final = f0;
    Vec g_final = g;
    for (int it = 0; it < 30; ++it) {
      Eval e = phi(alpha, gt);
      if (e.f > f0 + opt.c1 * alpha * d0 || (it > 0 && e.f >= f_prev)) {
        a_lo = a_prev; f_lo = f_prev; d_lo = d_prev;
        a_hi = alpha; f_hi = e.f; d_hi = e.df;
        bracketed = true;
        break;
      }
      if (std::abs(e.df) <= -opt.c2 * d0) {
        found = true;
        a_final = alpha; f_final = e.f; g_final = gt;
        break;
      }
      if (e.df >= 0.0) {
        a_lo = alpha; f_lo = e.f; d_lo = e.df;
        a_hi = a_prev; f_hi = f_prev; d_hi = d_prev;
        bracketed = true;
        break;
      }
      a_prev = alpha; f_prev = e.f; d_prev = e.df;
      alpha *= 2.0;
      if (alpha > 1e8) break;
    }
    if (bracketed && !found) {
      for (int it = 0; it < 40; ++it) {
        double aj = interp_step(a_lo, f_lo, d_lo, a_hi, f_hi, d_hi);
        Eval e = phi(aj, gt);
        if (e.f > f0 + opt.c1 * aj * d0 || e.f >= f_lo) {
          a_hi = aj; f_hi = e.f; d_hi = e.df;
        } else {
          if (std::abs(e.df) <= -opt.c2 * d0) {
            found = true;
            a_final = aj; f_final = e.f; g_final = gt;
            break;
          }
          if (e.df * (a_hi - a_lo) >= 0.0) {
            a_hi = a_lo; f_hi = f_lo; d_hi = d_lo;
          }
          a_lo = aj; f_lo = e.f; d_lo = e.df;
        }
        if (std::abs(a_hi - a_lo) < 1e-14 * std::max(1.0, std::abs(a_lo))) {
          found = f_lo < f0;
          a_final = a_lo; f_final = f_lo;
          if (found) {
            Vec xt = res.x + a_lo * p;
            f_final = fg(xt, &g_final);
            ++res.evaluations;
          }
          break;
        }
      }
    }
    if (!found) {
      if (f_final < f0 - 1e-16) {
        // accept the best point seen even without curvature certification
      } else {
        return res;  // no progress
      }
    }

    Vec s = a_final * p;
    Vec x_new = res.x + s;
    Vec y = g_final - g;
    res.x = x_new;
    res.f = f_final;
    double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (res.iterations == 0) H *= sy / y.dot(y);
      double rho = 1.0 / sy;
      Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      Eigen::MatrixXd V = I - rho * s * y.transpose();
      H = V * H * V.transpose() + rho * s * s.transpose();
    }
    g = g_final;
  }
  res.converged = g.cwiseAbs().maxCoeff() <= opt.gtol;
  return res;
}

Vec finite_difference_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                               double h) {
  Vec g(x.size());
  Vec xt = x;
  for (int j = 0; j < x.size(); ++j) {
    xt[j] = x[j] + h;
    double fp = f(xt);
    xt[j] = x[j] - h;
    double fm = f(xt);
    xt[j] = x[j];
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double parameter_shift_gradient(const std::function<double(const Vec&)>& energy, const Vec& theta,
                                int j) {
  Vec t = theta;
  t[j] = theta[j] + M_PI / 4.0;
  double ep = energy(t);
  t[j] = theta[j] - M_PI / 4.0;
  double em = energy(t);
  return ep - em;
}

std::array<double, kSmoMeshPoints> smo_mesh() {
  std::array<double, kSmoMeshPoints> m{};
  for (int k = 0; k < kSmoMeshPoints; ++k) m[k] = -M_PI / 2.0 + k * M_PI / kSmoMeshPoints;
  return m;
}

SmoFit smo_fit(const std::array<double, kSmoMeshPoints>& e) {
  // uniform full-period mesh in 2t: discrete orthogonality gives the LSQ fit
  auto mesh = smo_mesh();
  double A = 0.0, B = 0.0, C = 0.0;
  for (int k = 0; k < kSmoMeshPoints; ++k) {
    A += e[k] * std::cos(2.0 * mesh[k]);
    B += e[k] * std::sin(2.0 * mesh[k]);
    C += e[k];
  }
  A *= 2.0 / kSmoMeshPoints;
  B *= 2.0 / kSmoMeshPoints;
  C /= kSmoMeshPoints;
  SmoFit fit;
  fit.a = std::hypot(A, B);
  fit.b = std::atan2(B, A);
  fit.c = C;
  return fit;
}

double smo_choose(const SmoFit& fit, double theta_current, double degenerate_tol) {
  if (std::abs(fit.a) <= degenerate_tol) return theta_current;
  double t = fit.a < 0.0 ? fit.b / 2.0 : (fit.b + M_PI) / 2.0;
  while (t > M_PI / 2.0) t -= M_PI;
  while (t <= -M_PI / 2.0) t += M_PI;
  return t;
}

Vec smo_sweep(const std::function<double(const Vec&)>& energy, Vec theta) {
  auto mesh = smo_mesh();
  for (int j = 0; j < theta.size(); ++j) {
    std::array<double, kSmoMeshPoints> e{};
    Vec t = theta;
    for (int k = 0; k < kSmoMeshPoints; ++k) {
      t[j] = mesh[k];
      e[k] = energy(t);
    }
    theta[j] = smo_choose(smo_fit(e), theta[j]);
  }
  return theta;
}

Vec adadelta_run(const std::function<Vec(const Vec&)>& grad, Vec theta, const AdadeltaOptions& opt) {
  const int n = int(theta.size());
  Vec s = Vec::Zero(n);        // gradient-square accumulator
  Vec dacc = Vec::Zero(n);     // squared-update accumulator
  for (int t = 0; t < opt.steps; ++t) {
    Vec g = grad(theta);
    s = opt.rho * s + (1.0 - opt.rho) * g.cwiseProduct(g);
    Vec w = ((dacc.array() + opt.eps).sqrt() / (s.array() + opt.eps).sqrt()).matrix();
    Vec upd = w.cwiseProduct(g);
    theta -= upd;
    dacc = opt.rho * dacc + (1.0 - opt.rho) * upd.cwiseProduct(upd);
  }
  return theta;
}

}  // namespace qimp
