#pragma once

// Heisenberg algebra on the circle in a truncated charge basis |n>,
// n in {-n_max + q0, ..., n_max + q0}.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qfluct/chain.hpp"

namespace qfluct {

/// h = e_c (p - n_g)^2 + e_j cos(phi). e_j is signed.
struct CircuitParams {
  double e_c = 1.0;
  double e_j = 0.0;
  double n_g = 0.0;
  /// Extra linear term bias * p; the junction's relative coordinate uses it
  /// for unequal chemical potentials. Zero for an isolated charge qubit.
  double bias = 0.0;

  void validate() const;
};

struct ChargeBasisTruncation {
  int n_max = 16;
  double charge_offset = 0.0;  // q0, 0 or 1/2

  void validate() const;
  int dimension() const { return 2 * n_max + 1; }
  double charge(int index) const { return -n_max + charge_offset + index; }
  /// Index of the grid point nearest to charge, or -1 when outside the grid.
  int index_of(double charge) const;
  ChargeBasisTruncation doubled() const { return {2 * n_max, charge_offset}; }
};

using CircleOperator = Eigen::MatrixXcd;

struct CircleState {
  ChargeBasisTruncation trunc;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
  bool normalized(double tol = 1e-12) const { return std::abs(norm() - 1.0) <= tol; }
  /// Basis vector |n>.
  static CircleState basis(const ChargeBasisTruncation& trunc, double charge);
};

CircleOperator build_momentum(const ChargeBasisTruncation& trunc);

/// e^{ik phi}: |n> -> |n + k>, amplitudes pushed past the boundary dropped.
CircleOperator build_weyl(const ChargeBasisTruncation& trunc, int k);

/// e^{i alpha p}.
CircleOperator build_phase_exponential(const ChargeBasisTruncation& trunc, double alpha);

CircleOperator build_hamiltonian(const CircuitParams& params, const ChargeBasisTruncation& trunc);

/// The Hamiltonian as a chain: diagonal charging part, hopping e_j / 2.
Chain circle_chain(const CircuitParams& params, const ChargeBasisTruncation& trunc);

struct Spectrum {
  std::vector<double> energies;  // ascending, the k lowest
  bool converged = true;         // doubling n_max moved them by < rel_tol relative
  double max_shift = 0.0;
};

/// Throws ParameterError if k exceeds the dimension.
Spectrum spectrum(const CircuitParams& params, const ChargeBasisTruncation& trunc, int k, double rel_tol = 1e-10);

/// e^{-ith}.
CircleOperator circle_propagator(const CircuitParams& params, const ChargeBasisTruncation& trunc, double t);

CircleState evolve(const CircuitParams& params, const CircleState& state, double t);

struct CircleDyson {
  CircleOperator d;          // D_K(t)
  CircleOperator d_times_u0; // D_K(t) U0(t)
  double bound = 0.0;        // (|e_j| t)^{K+1} / (K+1)!
  bool converged = true;
};

CircleDyson dyson_circle(const CircuitParams& params, const ChargeBasisTruncation& trunc, double t, int order,
                         const DysonOptions& options = {});

/// e_j <sin phi> with sin phi = (e^{i phi} - e^{-i phi}) / 2i.
double josephson_current(const CircuitParams& params, const CircleState& state);

/// c_n proportional to exp(-width^2 n^2) e^{-i n phi_bar}, which gives
/// <e^{i phi}> ~ e^{i phi_bar} e^{-width^2 / 2}. Throws ParameterError for
/// width <= 0 and ResolutionError when the packet does not fit the grid
/// (width * n_max < 6).
CircleState phase_peaked_state(const ChargeBasisTruncation& trunc, double phi_bar, double width);

/// <psi| A |psi>.
std::complex<double> expectation(const CircleOperator& op, const CircleState& state);

}  // namespace qfluct
