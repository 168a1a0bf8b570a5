#pragma once

// Finite-N GNS expectations of words in the fluctuation operators
// p^N = S_z - S_z' (left minus commutant) and E_±^N = S_±/(c N).

#include <complex>
#include <vector>

#include "qfluct/gap.hpp"
#include "qfluct/sectors.hpp"

namespace qfluct {

using complex = std::complex<double>;

/// e^{i alpha p} (E_-)^n (E_+)^m.
struct WordFactor {
  double alpha = 0.0;
  int n = 0;
  int m = 0;
};

/// Factors act as an ordered operator product, first factor leftmost.
struct FluctuationWord {
  std::vector<WordFactor> factors;

  void validate() const;
  int total_n() const;
  int total_m() const;
  /// Sum_j (Sum_{k<=j} alpha_k)(m_j - n_j): exact phase of the word on the
  /// GNS vector.
  double phase_angle() const;
  /// Same word with every alpha set to zero.
  FluctuationWord without_phases() const;
};

/// log <s, s_z| word without phases |s, s_z>, or -infinity when the walk
/// leaves [-s, s] or does not return to s_z.
double word_log_amplitude(int s, int sz, const FluctuationWord& word);

struct CorrelationOptions {
  /// Evaluate words with total_m != total_n numerically instead of returning
  /// the structural zero.
  bool force_numeric = false;
};

/// Throws NormalPhaseError when gap.c == 0.
complex correlation_finite_n(const SectorTable& table, const FluctuationWord& word,
                             const GapSolution& gap, const CorrelationOptions& options = {});

complex correlation_finite_n(const ModelParams& params, int n_spins, const FluctuationWord& word,
                             const GapSolution& gap, const CorrelationOptions& options = {});

struct MesoscopicPrediction {
  complex value;
};

MesoscopicPrediction mesoscopic_prediction(const FluctuationWord& word);

struct ConvergencePoint {
  int n_spins = 0;
  complex value;
  double abs_error = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergencePoint> points;
  complex limit;
  /// Least-squares slope of log error vs log N; NaN when fewer than four
  /// nonzero errors are available.
  double exponent = 0.0;
  double fit_residual = 0.0;
  bool exponent_available = false;
};

/// Values and errors against the mesoscopic prediction, in n_list order.
ConvergenceReport convergence_sweep(const ModelParams& params, const FluctuationWord& word,
                                    const GapSolution& gap, const std::vector<int>& n_list);

/// <n| U^N(t) |m> with |m> = (E_+)^m Omega for m >= 0 and (E_-)^{|m|} Omega
/// for m < 0, U^N(t) including the chemical-potential factor e^{-2 i mu t p}.
complex single_layer_evolution_element(const ModelParams& params, int n_spins, int n, int m, double t,
                                       const GapSolution& gap);

/// Overload on a prebuilt table; mu is taken from params.
complex single_layer_evolution_element(const SectorTable& table, const ModelParams& params, int n, int m,
                                       double t, const GapSolution& gap);

/// <(W^N(t))^m> = e^{2 i eps m t} Sum d rho e^{-4 i m t T_c s_z / N}, where
/// e^{-itH} S_+ e^{itH} = S_+ W^N(t).
complex w_expectation(const ModelParams& params, int n_spins, int m, double t);
complex w_expectation(const SectorTable& table, const ModelParams& params, int m, double t);

/// <S_z>/N from the sector sum.
double magnetization_per_spin(const SectorTable& table);

}  // namespace qfluct
