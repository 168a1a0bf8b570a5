#include "qfluct/circle.hpp"

#include <cmath>
#include <string>

#include "qfluct/errors.hpp"

namespace qfluct {

namespace {
using cd = std::complex<double>;
}

void CircuitParams::validate() const {
  if (!std::isfinite(e_c) || !std::isfinite(e_j) || !std::isfinite(n_g) || !std::isfinite(bias))
    throw ParameterError("circuit parameters must be finite");
  if (e_c <= 0.0) throw ParameterError("e_c must be positive");
}

void ChargeBasisTruncation::validate() const {
  if (n_max < 2) throw ParameterError("n_max must be >= 2");
  if (charge_offset != 0.0 && charge_offset != 0.5) throw ParameterError("charge_offset must be 0 or 1/2");
}

int ChargeBasisTruncation::index_of(double q) const {
  const double idx = q + n_max - charge_offset;
  const long r = std::lround(idx);
  if (std::abs(idx - r) > 1e-9 || r < 0 || r >= dimension()) return -1;
  return static_cast<int>(r);
}

CircleState CircleState::basis(const ChargeBasisTruncation& trunc, double q) {
  trunc.validate();
  const int i = trunc.index_of(q);
  if (i < 0) throw ResolutionError("charge " + std::to_string(q) + " is not on the truncated grid");
  CircleState s{trunc, Eigen::VectorXcd::Zero(trunc.dimension())};
  s.amplitudes[i] = 1.0;
  return s;
}

CircleOperator build_momentum(const ChargeBasisTruncation& trunc) {
  trunc.validate();
  const int d = trunc.dimension();
  CircleOperator p = CircleOperator::Zero(d, d);
  for (int i = 0; i < d; ++i) p(i, i) = trunc.charge(i);
  return p;
}

CircleOperator build_weyl(const ChargeBasisTruncation& trunc, int k) {
  trunc.validate();
  const int d = trunc.dimension();
  if (std::abs(k) > 2 * trunc.n_max) throw ParameterError("|k| exceeds 2 n_max");
  CircleOperator w = CircleOperator::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const int j = i + k;
    if (j >= 0 && j < d) w(j, i) = 1.0;
  }
  return w;
}

CircleOperator build_phase_exponential(const ChargeBasisTruncation& trunc, double alpha) {
  trunc.validate();
  const int d = trunc.dimension();
  CircleOperator u = CircleOperator::Zero(d, d);
  for (int i = 0; i < d; ++i) u(i, i) = std::polar(1.0, alpha * trunc.charge(i));
  return u;
}

Chain circle_chain(const CircuitParams& params, const ChargeBasisTruncation& trunc) {
  params.validate();
  trunc.validate();
  const int d = trunc.dimension();
  Chain c;
  c.diagonal.resize(d);
  c.hopping = Eigen::VectorXd::Constant(d - 1, 0.5 * params.e_j);
  for (int i = 0; i < d; ++i) {
    const double q = trunc.charge(i) - params.n_g;
    c.diagonal[i] = params.e_c * q * q + params.bias * trunc.charge(i);
  }
  return c;
}

CircleOperator build_hamiltonian(const CircuitParams& params, const ChargeBasisTruncation& trunc) {
  return circle_chain(params, trunc).matrix().cast<cd>();
}

namespace {

Eigen::VectorXd chain_eigenvalues(const Chain& c) {
  if (c.size() == 1) return c.diagonal;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(c.diagonal, c.hopping, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("circle eigensolver failed");
  return es.eigenvalues();
}

}  // namespace

Spectrum spectrum(const CircuitParams& params, const ChargeBasisTruncation& trunc, int k, double rel_tol) {
  const Chain c = circle_chain(params, trunc);
  if (k < 1 || k > c.size()) throw ParameterError("requested level count outside [1, dimension]");
  const Eigen::VectorXd e = chain_eigenvalues(c);
  const Eigen::VectorXd e2 = chain_eigenvalues(circle_chain(params, trunc.doubled()));
  Spectrum s;
  for (int i = 0; i < k; ++i) {
    s.energies.push_back(e[i]);
    const double scale = std::max(std::abs(e[i]), params.e_c);
    const double shift = std::abs(e[i] - e2[i]) / scale;
    s.max_shift = std::max(s.max_shift, shift);
  }
  s.converged = s.max_shift < rel_tol;
  return s;
}

CircleOperator circle_propagator(const CircuitParams& params, const ChargeBasisTruncation& trunc, double t) {
  return chain_propagator(circle_chain(params, trunc), t);
}

CircleState evolve(const CircuitParams& params, const CircleState& state, double t) {
  if (state.amplitudes.size() != state.trunc.dimension()) throw ParameterError("state does not match its truncation");
  CircleState out{state.trunc, circle_propagator(params, state.trunc, t) * state.amplitudes};
  return out;
}

CircleDyson dyson_circle(const CircuitParams& params, const ChargeBasisTruncation& trunc, double t, int order,
                         const DysonOptions& options) {
  const Chain c = circle_chain(params, trunc);
  const DysonMatrix dm = chain_dyson(c, t, order, options);
  CircleDyson res;
  res.d = dm.d;
  Eigen::VectorXcd u0(c.size());
  for (int i = 0; i < c.size(); ++i) u0[i] = std::polar(1.0, -t * c.diagonal[i]);
  res.d_times_u0 = dm.d * u0.asDiagonal();
  res.bound = dyson_remainder_bound(std::abs(params.e_j), t, order);
  res.converged = dm.converged;
  return res;
}

std::complex<double> expectation(const CircleOperator& op, const CircleState& state) {
  return state.amplitudes.dot(op * state.amplitudes);
}

double josephson_current(const CircuitParams& params, const CircleState& state) {
  const Eigen::VectorXcd& c = state.amplitudes;
  // <e^{i phi}> = sum_n conj(c_{n+1}) c_n.
  cd up = 0.0;
  for (int i = 0; i + 1 < c.size(); ++i) up += std::conj(c[i + 1]) * c[i];
  const cd sin_phi = (up - std::conj(up)) / cd(0.0, 2.0);
  return params.e_j * sin_phi.real();
}

CircleState phase_peaked_state(const ChargeBasisTruncation& trunc, double phi_bar, double width) {
  trunc.validate();
  if (!(width > 0.0) || !std::isfinite(width)) throw ParameterError("width must be positive");
  if (!std::isfinite(phi_bar)) throw ParameterError("phi_bar must be finite");
  if (width * trunc.n_max < 6.0)
    throw ResolutionError("phase packet of width " + std::to_string(width) + " needs n_max >= " +
                          std::to_string(static_cast<int>(std::ceil(6.0 / width))));
  const int d = trunc.dimension();
  CircleState s{trunc, Eigen::VectorXcd(d)};
  for (int i = 0; i < d; ++i) {
    const double n = trunc.charge(i);
    s.amplitudes[i] = std::polar(std::exp(-width * width * n * n), -n * phi_bar);
  }
  s.amplitudes /= s.amplitudes.norm();
  return s;
}

}  // namespace qfluct
