#pragma once

// Brute-force reference implementations on the full 2^N spin space and its
// GNS doubling. Only for small N; used by tests and the selftest command.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qfluct/correlators.hpp"
#include "qfluct/junction.hpp"
#include "qfluct/sectors.hpp"

namespace qfluct::oracle {

struct SpinOperators {
  Eigen::MatrixXcd sx, sy, sz, sp, sm;
};

/// Collective spin operators (Pauli/2 summed over sites) on 2^N.
SpinOperators spin_operators(int n_spins);

/// -2 eps S_z - (2 T_c / N) S_+ S_-.
Eigen::MatrixXd bcs_hamiltonian(const ModelParams& params, int n_spins);

/// Ascending eigenvalues of bcs_hamiltonian.
Eigen::VectorXd dense_spectrum(const ModelParams& params, int n_spins);

/// Ascending list of eta(s, s_z), each repeated d(s) times, from the table.
Eigen::VectorXd sector_spectrum(const ModelParams& params, int n_spins);

/// d(s) for s = N/2, N/2 - 1, ... from the eigenvalue counts of the dense
/// Casimir S^2.
std::vector<long> casimir_multiplicities(int n_spins);

double operator_norm(const Eigen::MatrixXcd& a);

/// Single layer GNS space realized as 2^N x 2^N matrices Psi with the
/// cyclic vector Psi = sqrt(rho); left operators multiply from the left,
/// commutant operators from the right.
class DenseGns {
 public:
  DenseGns(const ModelParams& params, int n_spins, double c);

  std::complex<double> correlation(const FluctuationWord& word) const;
  std::complex<double> evolution_element(int n, int m, double t) const;
  std::complex<double> w_expectation(int m, double t) const;
  /// ||e^{-itH} S_+ e^{itH} - S_+ W(t)|| with W(t) = e^{-it(-2 eps + 4 T_c S_z / N)}.
  double w_identity_residual(double t) const;
  double pair_expectation() const;  // <S_+ S_->/N^2

 private:
  Eigen::MatrixXcd excite(int m) const;  // (E_±)^{|m|} Psi
  ModelParams params_;
  int n_spins_;
  double c_;
  SpinOperators ops_;
  Eigen::MatrixXd h_;
  Eigen::MatrixXd rho_;
  Eigen::MatrixXcd psi_;
};

/// Two layers on the four-factor space (L, L', R, R'), dimension 2^{4N}.
class DenseJunction {
 public:
  DenseJunction(const JunctionParams& params, int n_spins, double delta_l, double delta_r);

  std::complex<double> element(ChargePair in, ChargePair out, double t) const;
  const Eigen::MatrixXd& hamiltonian() const { return h_; }
  /// p_L + p_R on the full space.
  const Eigen::MatrixXd& total_charge() const { return total_; }

 private:
  Eigen::VectorXcd state(ChargePair q) const;
  int n_spins_;
  double c_l_, c_r_;
  Eigen::MatrixXd h_, total_;
  Eigen::MatrixXd sp_l_, sm_l_, sp_r_, sm_r_;
  Eigen::VectorXd omega_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;
};

}  // namespace qfluct::oracle
