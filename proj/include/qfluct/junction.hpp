#pragma once

// Two superconducting layers coupled by the surface tunnelling term
// (lambda/N^2)(S_{L+} S_{R-} + h.c.) and a charging energy on the relative
// charge, evaluated exactly in the GNS block decomposition.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qfluct/chain.hpp"
#include "qfluct/circle.hpp"
#include "qfluct/correlators.hpp"
#include "qfluct/gap.hpp"
#include "qfluct/sectors.hpp"

namespace qfluct {

struct JunctionParams {
  ModelParams left;   // beta is replaced by the common beta below
  ModelParams right;
  double lambda = 1.0;
  double e_c = 1.0;
  double n_g = 0.0;
  double beta = 1.0;
  /// Manual overrides of the layer gaps; otherwise solve_gap at the common beta.
  std::optional<double> delta_left;
  std::optional<double> delta_right;

  void validate() const;
  ModelParams left_layer() const;
  ModelParams right_layer() const;
  /// Layers exchanged and n_g negated.
  JunctionParams mirrored() const;
};

struct ChargePair {
  int left = 0;
  int right = 0;
  int total() const { return left + right; }
  friend bool operator==(const ChargePair&, const ChargePair&) = default;
};

struct JunctionBlock {
  int s_l = 0, sz_l0 = 0, s_r = 0, sz_r0 = 0;
  double log_weight = 0.0;  // log(d_L d_R rho_L rho_R)
  /// On the grid index (a + s_l) * (2 s_r + 1) + (b + s_r).
  Eigen::MatrixXd hamiltonian;
};

/// Materializes every block with its full (a, b) Hamiltonian. Memory grows
/// like N^6, so this is meant for small N and structural checks.
std::vector<JunctionBlock> build_blocks(const JunctionParams& params, int n_spins);

/// Total charge (a - sz_l0) + (b - sz_r0) on the block grid, as a diagonal.
Eigen::VectorXd block_total_charge(const JunctionBlock& block);

struct TransitionElement {
  ChargePair in, out;
  double t = 0.0;
  std::complex<double> value;
};

struct JunctionDysonElement {
  ChargePair in, out;
  std::complex<double> exact;
  std::complex<double> dyson;       // D_K U0 element
  double normalized_error = 0.0;    // |exact - dyson| / (||in|| ||out||)
  bool converged = true;
};

/// Layer tables and gaps for one N; elements are computed lazily per
/// (in, out) pair. Throws NormalPhaseError if either gap vanishes.
class JunctionModel {
 public:
  JunctionModel(const JunctionParams& params, int n_spins);

  int n_spins() const { return n_spins_; }
  const JunctionParams& params() const { return params_; }
  const GapSolution& left_gap() const { return gap_l_; }
  const GapSolution& right_gap() const { return gap_r_; }
  double delta_left() const { return gap_l_.c; }
  double delta_right() const { return gap_r_.c; }
  double josephson_energy() const;

  /// <out| U^N(t) |in>; exactly zero when total charge differs.
  std::complex<double> evolution_element(ChargePair in, ChargePair out, double t) const;

  /// ||E_L^{n_L} E_R^{n_R} Omega||.
  double state_norm(ChargePair state) const;

  JunctionDysonElement dyson_element(ChargePair in, ChargePair out, double t, int order,
                                     const DysonOptions& options = {}) const;

 private:
  struct Layer {
    SectorTable table;
    ModelParams params;
    double log_scale;  // log(c N)
  };
  template <class F>
  void for_each_block(ChargePair in, ChargePair out, F&& f) const;
  Chain sub_chain(int s_l, int sz_l0, int s_r, int sz_r0, int total, int a_min, int a_max) const;
  double layer_norm_sq(const Layer& layer, int n) const;

  JunctionParams params_;
  int n_spins_;
  GapSolution gap_l_, gap_r_;
  Layer left_, right_;
  double log_weight_floor_;
};

TransitionElement evolution_element(const JunctionParams& params, int n_spins, ChargePair in, ChargePair out,
                                    double t);

struct MesoElement {
  std::complex<double> value;
  bool converged = true;  // truncation doubling test
};

/// Circle prediction through the relative coordinate (n_L - n_R)/2, on the
/// half-integer grid when n_L + n_R is odd, with E_J = 2 lambda Delta_L Delta_R.
MesoElement meso_element(const JunctionParams& params, double delta_l, double delta_r, ChargePair in,
                         ChargePair out, double t, int n_max = 24);

struct MesoRow {
  int n_spins = 0;
  std::complex<double> finite;
  double abs_error = 0.0;
};

struct MesoElementReport {
  ChargePair in, out;
  std::complex<double> meso;
  bool meso_converged = true;
  std::vector<MesoRow> rows;
  /// Errors non-increasing after the first point.
  bool monotone = true;
  /// a + b/N least-squares extrapolation of the finite-N values (needs three
  /// or more points) and its rms residual.
  std::complex<double> extrapolant;
  double extrapolation_residual = 0.0;
};

/// Layer gaps are taken from N-independent solve_gap (or overrides).
std::vector<MesoElementReport> meso_compare(const JunctionParams& params, const std::vector<int>& n_list,
                                            const std::vector<std::pair<ChargePair, ChargePair>>& elements,
                                            double t, int n_max = 24);

struct JunctionDysonReport {
  int n_spins = 0;
  int order = 0;
  double t = 0.0;
  double bound = 0.0;  // (2 lambda t)^{K+1} / (K+1)!
  double max_normalized_error = 0.0;
  bool converged = true;
  std::vector<JunctionDysonElement> elements;
};

JunctionDysonReport dyson_junction(const JunctionParams& params, int n_spins, double t, int order,
                                   const std::vector<std::pair<ChargePair, ChargePair>>& elements,
                                   const DysonOptions& options = {});

/// Direct joint sum over both layers' sectors of the product word.
std::complex<double> two_layer_correlator(const JunctionParams& params, int n_spins,
                                          const FluctuationWord& left_word, const FluctuationWord& right_word);

}  // namespace qfluct
