#include "qfluct/correlators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qfluct/errors.hpp"
#include "qfluct/fit.hpp"
#include "sum.hpp"

namespace qfluct {

namespace {

void require_gap(const GapSolution& gap) {
  if (!(gap.c > 0.0))
    throw NormalPhaseError("fluctuation operators are undefined in the normal phase (c = 0)");
}

void require_even(int n_spins) {
  if (n_spins % 2 != 0) throw UnsupportedParityError("odd N is not supported");
  if (n_spins < 2) throw InvalidSectorError("n_spins must be >= 2");
}

}  // namespace

void FluctuationWord::validate() const {
  for (const WordFactor& f : factors) {
    if (f.n < 0 || f.m < 0) throw ParameterError("word exponents must be non-negative");
    if (!std::isfinite(f.alpha)) throw ParameterError("word phase must be finite");
  }
}

int FluctuationWord::total_n() const {
  int t = 0;
  for (const WordFactor& f : factors) t += f.n;
  return t;
}

int FluctuationWord::total_m() const {
  int t = 0;
  for (const WordFactor& f : factors) t += f.m;
  return t;
}

double FluctuationWord::phase_angle() const {
  double cumulative = 0.0, angle = 0.0;
  for (const WordFactor& f : factors) {
    cumulative += f.alpha;
    angle += cumulative * (f.m - f.n);
  }
  return angle;
}

FluctuationWord FluctuationWord::without_phases() const {
  FluctuationWord w = *this;
  for (WordFactor& f : w.factors) f.alpha = 0.0;
  return w;
}

double word_log_amplitude(int s, int sz, const FluctuationWord& word) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  int z = sz;
  double lc = 0.0;
  for (auto it = word.factors.rbegin(); it != word.factors.rend(); ++it) {
    lc += log_ladder_coefficient(s, z, it->m);
    z += it->m;
    if (std::isinf(lc)) return kNegInf;
    lc += log_ladder_coefficient(s, z, -it->n);
    z -= it->n;
    if (std::isinf(lc)) return kNegInf;
  }
  return z == sz ? lc : kNegInf;
}

complex correlation_finite_n(const SectorTable& table, const FluctuationWord& word, const GapSolution& gap,
                             const CorrelationOptions& options) {
  word.validate();
  require_gap(gap);
  const int tn = word.total_n(), tm = word.total_m();
  if (tn != tm && !options.force_numeric) return {0.0, 0.0};
  if (tn == 0 && tm == 0) return {1.0, 0.0};  // phases act trivially on the cyclic vector

  const double log_scale = (tn + tm) * std::log(gap.c * table.n_spins());
  detail::CompensatedSum acc;
  table.for_each_row([&](int s, int sz, double lw, double) {
    const double lc = word_log_amplitude(s, sz, word);
    if (!std::isinf(lc)) acc.add(std::exp(lw + lc - log_scale));
  });
  return std::polar(acc.value(), word.phase_angle());
}

complex correlation_finite_n(const ModelParams& params, int n_spins, const FluctuationWord& word,
                             const GapSolution& gap, const CorrelationOptions& options) {
  require_even(n_spins);
  return correlation_finite_n(boltzmann_table(params, n_spins), word, gap, options);
}

MesoscopicPrediction mesoscopic_prediction(const FluctuationWord& word) {
  word.validate();
  if (word.total_m() != word.total_n()) return {{0.0, 0.0}};
  return {std::polar(1.0, word.phase_angle())};
}

ConvergenceReport convergence_sweep(const ModelParams& params, const FluctuationWord& word,
                                    const GapSolution& gap, const std::vector<int>& n_list) {
  ConvergenceReport rep;
  rep.limit = mesoscopic_prediction(word).value;
  std::vector<double> xs, ys;
  for (int n : n_list) {
    ConvergencePoint p;
    p.n_spins = n;
    p.value = correlation_finite_n(params, n, word, gap);
    p.abs_error = std::abs(p.value - rep.limit);
    rep.points.push_back(p);
    if (p.abs_error > 0.0) {
      xs.push_back(n);
      ys.push_back(p.abs_error);
    }
  }
  if (xs.size() >= 4) {
    const PowerLawFit f = fit_power_law(xs, ys);
    rep.exponent = f.exponent;
    rep.fit_residual = f.rms_residual;
    rep.exponent_available = true;
  } else {
    rep.exponent = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

complex single_layer_evolution_element(const SectorTable& table, const ModelParams& params, int n, int m,
                                       double t, const GapSolution& gap) {
  require_gap(gap);
  if (n != m) return {0.0, 0.0};
  if (m == 0) return {1.0, 0.0};
  const int N = table.n_spins();
  const double log_scale = 2.0 * std::abs(m) * std::log(gap.c * N);
  detail::ComplexSum acc;
  table.for_each_row([&](int s, int sz, double lw, double eta) {
    const double lc = log_ladder_coefficient(s, sz, m);
    if (std::isinf(lc)) return;
    const double shifted = sector_energy_unchecked(params.epsilon, params.t_c, N, s, sz + m);
    acc.add(std::polar(std::exp(lw + 2.0 * lc - log_scale), -t * (shifted - eta)));
  });
  return std::polar(1.0, -2.0 * params.mu * t * m) * acc.value();
}

complex single_layer_evolution_element(const ModelParams& params, int n_spins, int n, int m, double t,
                                       const GapSolution& gap) {
  require_even(n_spins);
  require_gap(gap);
  if (n != m) return {0.0, 0.0};
  return single_layer_evolution_element(boltzmann_table(params, n_spins), params, n, m, t, gap);
}

complex w_expectation(const SectorTable& table, const ModelParams& params, int m, double t) {
  const double N = table.n_spins();
  detail::ComplexSum acc;
  table.for_each_row([&](int, int sz, double lw, double) {
    acc.add(std::polar(std::exp(lw), -4.0 * t * m * params.t_c * sz / N));
  });
  return std::polar(1.0, 2.0 * params.epsilon * m * t) * acc.value();
}

complex w_expectation(const ModelParams& params, int n_spins, int m, double t) {
  require_even(n_spins);
  if (m == 0 || t == 0.0) return {1.0, 0.0};
  return w_expectation(boltzmann_table(params, n_spins), params, m, t);
}

double magnetization_per_spin(const SectorTable& table) {
  detail::CompensatedSum acc;
  table.for_each_row([&](int, int sz, double lw, double) { acc.add(std::exp(lw) * sz); });
  return acc.value() / table.n_spins();
}

}  // namespace qfluct
