#include "qfluct/oracle/dense.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "qfluct/errors.hpp"

namespace qfluct::oracle {

namespace {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

MatrixXd eye(Eigen::Index n) { return MatrixXd::Identity(n, n); }

MatrixXd real_part(const MatrixXcd& a) { return a.real(); }

// Function of a real symmetric matrix through its eigendecomposition.
template <class F>
MatrixXcd sym_function(const MatrixXd& a, F&& f) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
  Eigen::VectorXcd d(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) d[i] = f(es.eigenvalues()[i]);
  const MatrixXcd v = es.eigenvectors().cast<cd>();
  return v * d.asDiagonal() * v.adjoint();
}

MatrixXcd diag_phase(const MatrixXcd& sz, double angle) {
  Eigen::VectorXcd d(sz.rows());
  for (Eigen::Index i = 0; i < sz.rows(); ++i) d[i] = std::polar(1.0, angle * sz(i, i).real());
  return d.asDiagonal();
}

}  // namespace

SpinOperators spin_operators(int n_spins) {
  if (n_spins < 1 || n_spins > 12) throw std::invalid_argument("dense oracle supports 1 <= N <= 12");
  MatrixXcd px(2, 2), py(2, 2), pz(2, 2);
  px << 0, 0.5, 0.5, 0;
  py << 0, cd(0, -0.5), cd(0, 0.5), 0;
  pz << 0.5, 0, 0, -0.5;
  const Eigen::Index dim = Eigen::Index(1) << n_spins;
  SpinOperators ops;
  ops.sx = ops.sy = ops.sz = MatrixXcd::Zero(dim, dim);
  for (int site = 0; site < n_spins; ++site) {
    const MatrixXcd left = MatrixXcd::Identity(Eigen::Index(1) << site, Eigen::Index(1) << site);
    const MatrixXcd right = MatrixXcd::Identity(Eigen::Index(1) << (n_spins - site - 1), Eigen::Index(1) << (n_spins - site - 1));
    ops.sx += kron(kron(left, px), right);
    ops.sy += kron(kron(left, py), right);
    ops.sz += kron(kron(left, pz), right);
  }
  ops.sp = ops.sx + cd(0, 1) * ops.sy;
  ops.sm = ops.sx - cd(0, 1) * ops.sy;
  return ops;
}

MatrixXd bcs_hamiltonian(const ModelParams& params, int n_spins) {
  const SpinOperators ops = spin_operators(n_spins);
  const MatrixXcd h = -2.0 * params.epsilon * ops.sz - (2.0 * params.t_c / n_spins) * ops.sp * ops.sm;
  return real_part(h);
}

Eigen::VectorXd dense_spectrum(const ModelParams& params, int n_spins) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(bcs_hamiltonian(params, n_spins), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Eigen::VectorXd sector_spectrum(const ModelParams& params, int n_spins) {
  std::vector<double> e;
  for (int s = n_spins / 2; s >= 0; --s) {
    const std::uint64_t d = multiplicity(n_spins, s);
    for (int sz = -s; sz <= s; ++sz)
      for (std::uint64_t k = 0; k < d; ++k)
        e.push_back(sector_energy(params, SectorLabel{n_spins, s, sz}));
  }
  std::sort(e.begin(), e.end());
  return Eigen::Map<Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size()));
}

std::vector<long> casimir_multiplicities(int n_spins) {
  const SpinOperators ops = spin_operators(n_spins);
  const MatrixXcd s2 = ops.sx * ops.sx + ops.sy * ops.sy + ops.sz * ops.sz;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(s2, Eigen::EigenvaluesOnly);
  std::map<int, long> counts;  // keyed by twice s
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()[i];
    const double s = 0.5 * (std::sqrt(1.0 + 4.0 * ev) - 1.0);
    counts[static_cast<int>(std::lround(2.0 * s))]++;
  }
  std::vector<long> d;
  for (int twice = n_spins; twice >= 0; twice -= 2) d.push_back(counts[twice] / (twice + 1));
  return d;
}

double operator_norm(const MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  const MatrixXcd g = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

DenseGns::DenseGns(const ModelParams& params, int n_spins, double c)
    : params_(params), n_spins_(n_spins), c_(c), ops_(spin_operators(n_spins)), h_(bcs_hamiltonian(params, n_spins)) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(h_);
  const double e0 = es.eigenvalues().minCoeff();
  Eigen::VectorXd w(h_.rows());
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = std::exp(-params.beta * (es.eigenvalues()[i] - e0));
  w /= w.sum();
  rho_ = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
  psi_ = (es.eigenvectors() * w.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose()).cast<cd>();
}

MatrixXcd DenseGns::excite(int m) const {
  const double scale = c_ * n_spins_;
  MatrixXcd x = psi_;
  for (int k = 0; k < std::abs(m); ++k) x = (m > 0 ? ops_.sp : ops_.sm) * x / scale;
  return x;
}

std::complex<double> DenseGns::correlation(const FluctuationWord& word) const {
  const double scale = c_ * n_spins_;
  MatrixXcd x = psi_;
  for (auto it = word.factors.rbegin(); it != word.factors.rend(); ++it) {
    for (int k = 0; k < it->m; ++k) x = ops_.sp * x / scale;
    for (int k = 0; k < it->n; ++k) x = ops_.sm * x / scale;
    // e^{i alpha p} with p = S_z (left) - S_z (commutant).
    x = diag_phase(ops_.sz, it->alpha) * x * diag_phase(ops_.sz, -it->alpha);
  }
  return (psi_.conjugate().cwiseProduct(x)).sum();
}

std::complex<double> DenseGns::evolution_element(int n, int m, double t) const {
  const MatrixXcd u = sym_function(h_, [t](double e) { return std::polar(1.0, -t * e); });
  MatrixXcd x = u * excite(m) * u.adjoint();
  const double chem = 2.0 * params_.mu * t;
  x = diag_phase(ops_.sz, -chem) * x * diag_phase(ops_.sz, chem);
  return (excite(n).conjugate().cwiseProduct(x)).sum();
}

std::complex<double> DenseGns::w_expectation(int m, double t) const {
  const MatrixXcd k = -2.0 * params_.epsilon * MatrixXcd::Identity(h_.rows(), h_.cols()) +
                      (4.0 * params_.t_c / n_spins_) * ops_.sz;
  const MatrixXcd wm = sym_function(k.real(), [t, m](double e) { return std::polar(1.0, -t * m * e); });
  return (rho_.cast<cd>() * wm).trace();
}

double DenseGns::w_identity_residual(double t) const {
  const MatrixXcd u = sym_function(h_, [t](double e) { return std::polar(1.0, -t * e); });
  const MatrixXcd k = -2.0 * params_.epsilon * MatrixXcd::Identity(h_.rows(), h_.cols()) +
                      (4.0 * params_.t_c / n_spins_) * ops_.sz;
  const MatrixXcd w = sym_function(k.real(), [t](double e) { return std::polar(1.0, -t * e); });
  return operator_norm(u * ops_.sp * u.adjoint() - ops_.sp * w);
}

double DenseGns::pair_expectation() const {
  const double n = n_spins_;
  return (rho_.cast<cd>() * ops_.sp * ops_.sm).trace().real() / (n * n);
}

DenseJunction::DenseJunction(const JunctionParams& params, int n_spins, double delta_l, double delta_r)
    : n_spins_(n_spins), c_l_(delta_l), c_r_(delta_r) {
  if (n_spins > 2) throw std::invalid_argument("dense junction oracle supports N <= 2");
  const SpinOperators ops = spin_operators(n_spins);
  const MatrixXd sz = ops.sz.real(), sp = ops.sp.real(), sm = ops.sm.real();
  const Eigen::Index d = sz.rows();
  const MatrixXd i1 = eye(d), i2 = eye(d * d);
  const ModelParams pl = params.left_layer(), pr = params.right_layer();
  const MatrixXd hl = bcs_hamiltonian(pl, n_spins), hr = bcs_hamiltonian(pr, n_spins);
  // Factor order (L, L', R, R'); X on L' is the commutant action Psi X^T.
  auto on_l = [&](const MatrixXd& a) { return kron(kron(a, i1), i2); };
  auto on_lp = [&](const MatrixXd& a) { return kron(kron(i1, a), i2); };
  auto on_r = [&](const MatrixXd& a) { return kron(i2, kron(a, i1)); };
  auto on_rp = [&](const MatrixXd& a) { return kron(i2, kron(i1, a)); };
  const MatrixXd p_l = on_l(sz) - on_lp(sz), p_r = on_r(sz) - on_rp(sz);
  const MatrixXd id = eye(d * d * d * d);
  const MatrixXd rel = 0.5 * (p_l - p_r) - params.n_g * id;
  sp_l_ = on_l(sp);
  sm_l_ = on_l(sm);
  sp_r_ = on_r(sp);
  sm_r_ = on_r(sm);
  const double nn = double(n_spins) * n_spins;
  h_ = on_l(hl) - on_lp(hl) + on_r(hr) - on_rp(hr) + params.e_c * rel * rel +
       (params.lambda / nn) * (sp_l_ * sm_r_ + sm_l_ * sp_r_) + 2.0 * pl.mu * p_l + 2.0 * pr.mu * p_r;
  total_ = p_l + p_r;

  auto sqrt_gibbs = [](const MatrixXd& h, double beta) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    const double e0 = es.eigenvalues().minCoeff();
    Eigen::VectorXd w(h.rows());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = std::exp(-beta * (es.eigenvalues()[i] - e0));
    w /= w.sum();
    return MatrixXd(es.eigenvectors() * w.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose());
  };
  const MatrixXd psi_l = sqrt_gibbs(hl, params.beta), psi_r = sqrt_gibbs(hr, params.beta);
  Eigen::VectorXd vl(d * d), vr(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      vl[i * d + j] = psi_l(i, j);
      vr[i * d + j] = psi_r(i, j);
    }
  omega_.resize(d * d * d * d);
  for (Eigen::Index i = 0; i < d * d; ++i) omega_.segment(i * d * d, d * d) = vl[i] * vr;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(h_);
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

Eigen::VectorXcd DenseJunction::state(ChargePair q) const {
  Eigen::VectorXd v = omega_;
  const double sl = c_l_ * n_spins_, sr = c_r_ * n_spins_;
  for (int k = 0; k < std::abs(q.right); ++k) v = (q.right > 0 ? sp_r_ : sm_r_) * v / sr;
  for (int k = 0; k < std::abs(q.left); ++k) v = (q.left > 0 ? sp_l_ : sm_l_) * v / sl;
  return v.cast<cd>();
}

std::complex<double> DenseJunction::element(ChargePair in, ChargePair out, double t) const {
  const Eigen::VectorXcd a = state(in), b = state(out);
  Eigen::VectorXcd phases(evals_.size());
  for (Eigen::Index i = 0; i < evals_.size(); ++i) phases[i] = std::polar(1.0, -t * evals_[i]);
  const Eigen::MatrixXcd v = evecs_.cast<cd>();
  const Eigen::VectorXcd evolved = v * phases.asDiagonal() * (v.adjoint() * a);
  return b.dot(evolved);
}

}  // namespace qfluct::oracle
