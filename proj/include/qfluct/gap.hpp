#pragma once

// Mean-field consistency condition beta_c * omega = tanh(beta * omega) with
// omega = sqrt(eps^2 + 4 T_c^2 Delta^2), and the Josephson quantities derived
// from its solution.

#include <complex>
#include <vector>

namespace qfluct {

struct GapOptions {
  double tolerance = 1e-12;  // on |beta_c omega - tanh(beta omega)|
  int max_iterations = 200;
  double phase = 0.0;        // carried into GapSolution::phase
};

struct GapSolution {
  double delta = 0.0;
  double omega = 0.0;
  double c = 0.0;  // normalization of the fluctuation operators; equals delta
  double phase = 0.0;
  bool converged = false;
  double residual = 0.0;                // beta_c omega - tanh(beta omega) at the returned omega
  double normal_branch_residual = 0.0;  // same expression at omega = eps
  int iterations = 0;
  bool superconducting() const { return delta > 0.0; }
};

/// Throws ParameterError for non-finite input, t_c <= 0, beta <= 0 or eps < 0.
GapSolution solve_gap(double epsilon, double t_c, double beta, const GapOptions& options = {});

/// 4 T_c Delta.
double rescaled_gap(const GapSolution& sol, double t_c);

/// E_J = 2 lambda Delta_L Delta_R.
double josephson_energy(double lambda, double delta_l, double delta_r);

/// (lambda beta_c / 4) * bold_delta * tanh(beta bold_delta / 2); equals
/// 2 lambda Delta^2 for identical layers at eps = 0.
double josephson_energy_closed_form(double lambda, double t_c, double beta, double bold_delta);

struct CriticalCurvePoint {
  double temperature = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double bold_delta = 0.0;
  double e_j = 0.0;
  GapSolution solution;
};

/// Identical layers. Points appear in the order of betas.
std::vector<CriticalCurvePoint> critical_current_curve(double lambda, double epsilon, double t_c,
                                                       const std::vector<double>& betas,
                                                       const GapOptions& options = {});

struct SpinExpectations {
  std::complex<double> sigma_plus;
  double sigma_z = 0.0;
};

/// Single-spin Gibbs state in the field (2 T_c Delta cos phi, 2 T_c Delta sin phi, eps),
/// with sigma_+ = (sigma_x + i sigma_y)/2.
SpinExpectations meanfield_spin_expectations(const GapSolution& sol, double epsilon, double t_c,
                                             double beta, double phi);

}  // namespace qfluct
