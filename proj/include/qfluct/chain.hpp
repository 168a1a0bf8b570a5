#pragma once

// Real symmetric tridiagonal Hamiltonians H = H0 + H1 with H0 the diagonal
// and H1 the nearest-neighbour hopping, their exact propagators, and the
// truncated Dyson series in H1. Shared by the circle model and the junction
// sub-chains.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qfluct {

struct Chain {
  Eigen::VectorXd diagonal;
  Eigen::VectorXd hopping;  // hopping[i] couples i and i + 1

  int size() const { return static_cast<int>(diagonal.size()); }
  Eigen::MatrixXd matrix() const;
  /// Gershgorin bound on ||H1||.
  double hopping_norm_bound() const;
};

/// e^{-itH}, via the symmetric eigendecomposition. Throws NumericalError on
/// eigensolver failure.
Eigen::MatrixXcd chain_propagator(const Chain& chain, double t);

enum class SimplexMethod { kGaussLegendre, kExact };

struct SimplexResult {
  std::complex<double> value;
  bool converged = true;
  int nodes = 0;  // Gauss-Legendre nodes used; 0 for the exact route
};

/// Integral of prod_j e^{-i omega_j t_j} over t >= t_1 >= ... >= t_k >= 0.
/// Gauss-Legendre doubles its node count from 16 until consecutive results
/// agree within rel_tol * t^k / k!.
SimplexResult ordered_simplex_integral(const std::vector<double>& omegas, double t,
                                       SimplexMethod method = SimplexMethod::kGaussLegendre,
                                       double rel_tol = 1e-10, int max_nodes = 1024);

struct DysonOptions {
  SimplexMethod method = SimplexMethod::kGaussLegendre;
  double tolerance = 1e-10;
  int max_nodes = 1024;
};

struct DysonElement {
  std::complex<double> value;
  bool converged = true;
  int max_nodes = 0;
};

/// Element [out, in] of D_K(t) = sum_{k<=K} of the time-ordered terms
/// approximating U(t) U0(t)^dagger.
DysonElement chain_dyson_element(const Chain& chain, int in, int out, double t, int order,
                                 const DysonOptions& options = {});

struct DysonMatrix {
  Eigen::MatrixXcd d;  // D_K(t)
  bool converged = true;
  int max_nodes = 0;
};

DysonMatrix chain_dyson(const Chain& chain, double t, int order, const DysonOptions& options = {});

/// (h t)^{K+1} / (K+1)!.
double dyson_remainder_bound(double h1_norm, double t, int order);

}  // namespace qfluct
