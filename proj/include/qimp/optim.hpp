#pragma once
#include <Eigen/Dense>
#include <array>
#include <functional>

namespace qimp {

using Vec = Eigen::VectorXd;

// Objective with optional analytic gradient: returns f(x); fills *grad when
// grad is non-null.
using ObjectiveFn = std::function<double(const Vec&, Vec*)>;

struct BfgsOptions {
  double gtol = 1e-8;   // max-norm of gradient
  int max_iter = 4000;
  double c1 = 1e-4;     // strong Wolfe sufficient decrease
  double c2 = 0.9;      // strong Wolfe curvature
};

struct BfgsResult {
  Vec x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

BfgsResult bfgs_minimize(const ObjectiveFn& fg, Vec x0, const BfgsOptions& opt = {});

// Central-difference gradient for objectives without an analytic one.
Vec finite_difference_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                               double h = 1e-6);

// Exact derivative for period-pi sinusoidal landscapes (single Pauli-rotation
// parameters): E(theta + pi/4) - E(theta - pi/4).
double parameter_shift_gradient(const std::function<double(const Vec&)>& energy, const Vec& theta,
                                int j);

// Sequential single-parameter minimization on sinusoidal landscapes.
// Mesh: 8 uniform points t_k = -pi/2 + k*pi/8.
inline constexpr int kSmoMeshPoints = 8;
std::array<double, kSmoMeshPoints> smo_mesh();

struct SmoFit {
  double a = 0.0, b = 0.0, c = 0.0;  // a cos(2t - b) + c
};
// Least-squares sinusoid fit through the 8 mesh energies.
SmoFit smo_fit(const std::array<double, kSmoMeshPoints>& energies);
// Minimizer of the fit; a fit with |a| <= degenerate_tol leaves the angle
// unchanged. Result is wrapped to (-pi/2, pi/2].
double smo_choose(const SmoFit& fit, double theta_current, double degenerate_tol = 1e-12);

// One full sweep: visit every parameter in order, replace it by the sinusoid
// minimizer of the mesh energies. energy_at evaluates the full parameter
// vector. Returns the updated parameters.
Vec smo_sweep(const std::function<double(const Vec&)>& energy, Vec theta);

struct AdadeltaOptions {
  int steps = 250;
  double rho = 0.9;
  double eps = 1e-8;
};

// Gradient-only optimizer with per-parameter adaptive step; accumulators start
// at zero. grad(theta) returns the gradient estimate used for the update.
Vec adadelta_run(const std::function<Vec(const Vec&)>& grad, Vec theta0,
                 const AdadeltaOptions& opt = {});

}  // namespace qimp
