#include "qfluct/gap.hpp"

#include <cmath>

#include "qfluct/errors.hpp"

namespace qfluct {

namespace {

void check_inputs(double epsilon, double t_c, double beta) {
  if (!std::isfinite(epsilon) || !std::isfinite(t_c) || !std::isfinite(beta))
    throw ParameterError("gap inputs must be finite");
  if (t_c <= 0.0) throw ParameterError("t_c must be positive");
  if (beta <= 0.0) throw ParameterError("beta must be positive");
  if (epsilon < 0.0) throw ParameterError("epsilon must be non-negative");
}

// f(x) = a x - tanh x on x = beta omega, a = 1/(beta T_c). For a < 1 it has a
// single positive root in (0, 1/a], f < 0 to its left and f > 0 to its right.
struct Root {
  double x = 0.0;
  int iterations = 0;
  bool converged = false;
};

Root tanh_root(double a, double tolerance, int max_iterations) {
  auto f = [a](double x) { return a * x - std::tanh(x); };
  double lo = 0.0, hi = 1.0 / a;
  double x = hi;
  Root r;
  for (int it = 1; it <= max_iterations; ++it) {
    r.iterations = it;
    const double fx = f(x);
    // f(x) is exactly the residual beta_c omega - tanh(beta omega).
    if (std::abs(fx) <= 0.25 * tolerance) {
      r.x = x;
      r.converged = true;
      return r;
    }
    if (fx < 0.0)
      lo = x;
    else
      hi = x;
    const double th = std::tanh(x);
    const double df = a - (1.0 - th * th);
    double next = df != 0.0 ? x - fx / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-17 * hi) {
      r.x = x;
      r.converged = std::abs(fx) <= tolerance;
      return r;
    }
    x = next;
  }
  r.x = x;
  r.converged = std::abs(f(x)) <= tolerance;
  return r;
}

}  // namespace

GapSolution solve_gap(double epsilon, double t_c, double beta, const GapOptions& options) {
  check_inputs(epsilon, t_c, beta);
  const double beta_c = 1.0 / t_c;
  GapSolution sol;
  sol.phase = options.phase;
  sol.normal_branch_residual = beta_c * epsilon - std::tanh(beta * epsilon);

  const double a = beta_c / beta;  // = 1/(beta T_c)
  double omega_star = 0.0;
  if (a < 1.0) {
    const Root r = tanh_root(a, options.tolerance, options.max_iterations);
    sol.iterations = r.iterations;
    omega_star = r.x / beta;
    if (!r.converged) {
      sol.converged = false;
      sol.omega = omega_star;
      sol.residual = beta_c * omega_star - std::tanh(beta * omega_star);
      return sol;
    }
  }
  if (omega_star > epsilon) {
    sol.omega = omega_star;
    sol.delta = std::sqrt(omega_star * omega_star - epsilon * epsilon) / (2.0 * t_c);
  } else {
    sol.omega = epsilon;
    sol.delta = 0.0;
  }
  sol.c = sol.delta;
  sol.residual = beta_c * sol.omega - std::tanh(beta * sol.omega);
  sol.converged = true;
  return sol;
}

double rescaled_gap(const GapSolution& sol, double t_c) { return 4.0 * t_c * sol.delta; }

double josephson_energy(double lambda, double delta_l, double delta_r) {
  return 2.0 * lambda * delta_l * delta_r;
}

double josephson_energy_closed_form(double lambda, double t_c, double beta, double bold_delta) {
  return 0.25 * lambda / t_c * bold_delta * std::tanh(0.5 * beta * bold_delta);
}

std::vector<CriticalCurvePoint> critical_current_curve(double lambda, double epsilon, double t_c,
                                                       const std::vector<double>& betas,
                                                       const GapOptions& options) {
  std::vector<CriticalCurvePoint> out;
  out.reserve(betas.size());
  for (double beta : betas) {
    CriticalCurvePoint p;
    p.beta = beta;
    p.temperature = 1.0 / beta;
    p.solution = solve_gap(epsilon, t_c, beta, options);
    p.delta = p.solution.delta;
    p.bold_delta = rescaled_gap(p.solution, t_c);
    p.e_j = josephson_energy(lambda, p.delta, p.delta);
    out.push_back(p);
  }
  return out;
}

SpinExpectations meanfield_spin_expectations(const GapSolution& sol, double epsilon, double t_c,
                                             double beta, double phi) {
  check_inputs(epsilon, t_c, beta);
  const double transverse = 2.0 * t_c * sol.delta;
  const double h = std::hypot(transverse, epsilon);
  SpinExpectations e;
  if (h == 0.0) return e;
  const double th = std::tanh(beta * h);
  e.sigma_plus = std::polar(th * 0.5 * transverse / h, phi);
  e.sigma_z = th * epsilon / h;
  return e;
}

}  // namespace qfluct
