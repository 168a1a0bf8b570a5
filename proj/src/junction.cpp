#include "qfluct/junction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qfluct/errors.hpp"
#include "qfluct/fit.hpp"
#include "sum.hpp"

namespace qfluct {

namespace {

using cd = std::complex<double>;

// Blocks lighter than the heaviest by this many e-folds are dropped.
constexpr double kPruneLog = 80.0;

GapSolution layer_gap(const ModelParams& layer, std::optional<double> override_delta) {
  GapSolution g = solve_gap(layer.epsilon, layer.t_c, layer.beta);
  if (override_delta) {
    if (!(*override_delta >= 0.0) || !std::isfinite(*override_delta))
      throw ParameterError("gap override must be finite and non-negative");
    g.delta = g.c = *override_delta;
    g.omega = std::sqrt(layer.epsilon * layer.epsilon + 4.0 * layer.t_c * layer.t_c * g.delta * g.delta);
    g.residual = g.omega / layer.t_c - std::tanh(layer.beta * g.omega);
  }
  return g;
}

double eta(const ModelParams& p, int n, int s, int sz) {
  return sector_energy_unchecked(p.epsilon, p.t_c, n, s, sz);
}

double hop(double lambda_over_n2, int s_l, int a, int s_r, int b) {
  // a -> a + 1 on the left, b -> b - 1 on the right.
  const double up = double(s_l - a) * double(s_l + a + 1);
  const double down = double(s_r + b) * double(s_r - b + 1);
  if (up <= 0.0 || down <= 0.0) return 0.0;
  return lambda_over_n2 * std::sqrt(up * down);
}

}  // namespace

void JunctionParams::validate() const {
  left_layer().validate();
  right_layer().validate();
  if (!std::isfinite(lambda) || !std::isfinite(e_c) || !std::isfinite(n_g) || !std::isfinite(beta))
    throw ParameterError("junction parameters must be finite");
  if (e_c < 0.0) throw ParameterError("e_c must be non-negative");
}

ModelParams JunctionParams::left_layer() const {
  ModelParams p = left;
  p.beta = beta;
  return p;
}

ModelParams JunctionParams::right_layer() const {
  ModelParams p = right;
  p.beta = beta;
  return p;
}

JunctionParams JunctionParams::mirrored() const {
  JunctionParams m = *this;
  std::swap(m.left, m.right);
  std::swap(m.delta_left, m.delta_right);
  m.n_g = -n_g;
  return m;
}

JunctionModel::JunctionModel(const JunctionParams& params, int n_spins)
    : params_(params),
      n_spins_(n_spins),
      gap_l_(layer_gap(params.left_layer(), params.delta_left)),
      gap_r_(layer_gap(params.right_layer(), params.delta_right)),
      left_{boltzmann_table(params.left_layer(), n_spins), params.left_layer(), 0.0},
      right_{boltzmann_table(params.right_layer(), n_spins), params.right_layer(), 0.0} {
  params.validate();
  if (!(gap_l_.c > 0.0) || !(gap_r_.c > 0.0))
    throw NormalPhaseError("junction needs both layers superconducting");
  left_.log_scale = std::log(gap_l_.c * n_spins);
  right_.log_scale = std::log(gap_r_.c * n_spins);
  double max_l = -std::numeric_limits<double>::infinity(), max_r = max_l;
  left_.table.for_each_row([&](int, int, double lw, double) { max_l = std::max(max_l, lw); });
  right_.table.for_each_row([&](int, int, double lw, double) { max_r = std::max(max_r, lw); });
  log_weight_floor_ = max_l + max_r - kPruneLog;
}

double JunctionModel::josephson_energy() const { return qfluct::josephson_energy(params_.lambda, gap_l_.c, gap_r_.c); }

Chain JunctionModel::sub_chain(int s_l, int zl, int s_r, int zr, int total, int a_min, int a_max) const {
  const int n = n_spins_;
  const ModelParams& pl = left_.params;
  const ModelParams& pr = right_.params;
  const double ref = eta(pl, n, s_l, zl) + eta(pr, n, s_r, zr);
  const double lam = params_.lambda / (double(n) * n);
  Chain c;
  const int dim = a_max - a_min + 1;
  c.diagonal.resize(dim);
  c.hopping.resize(std::max(dim - 1, 0));
  for (int i = 0; i < dim; ++i) {
    const int a = a_min + i, b = total - a;
    const double rel = 0.5 * ((a - zl) - (b - zr)) - params_.n_g;
    c.diagonal[i] = eta(pl, n, s_l, a) + eta(pr, n, s_r, b) - ref + params_.e_c * rel * rel +
                    2.0 * pl.mu * (a - zl) + 2.0 * pr.mu * (b - zr);
    if (i + 1 < dim) c.hopping[i] = hop(lam, s_l, a, s_r, b);
  }
  return c;
}

// Calls f(weight, chain, in_index, out_index) for every contributing block,
// where weight already carries d rho, ladder coefficients and 1/(cN) factors.
template <class F>
void JunctionModel::for_each_block(ChargePair in, ChargePair out, F&& f) const {
  if (in.total() != out.total()) return;
  const double scale = (std::abs(in.left) + std::abs(out.left)) * left_.log_scale +
                       (std::abs(in.right) + std::abs(out.right)) * right_.log_scale;
  for (const Sector& sl : left_.table.sectors()) {
    for (int il = 0; il < sl.size(); ++il) {
      const int zl = sl.sz(il);
      const double lw_l = sl.log_weight(il);
      const double lc_l =
          log_ladder_coefficient(sl.s, zl, in.left) + log_ladder_coefficient(sl.s, zl, out.left);
      if (std::isinf(lc_l)) continue;
      for (const Sector& sr : right_.table.sectors()) {
        for (int ir = 0; ir < sr.size(); ++ir) {
          const double lw = lw_l + sr.log_weight(ir);
          if (lw < log_weight_floor_) continue;
          const int zr = sr.sz(ir);
          const double lc_r =
              log_ladder_coefficient(sr.s, zr, in.right) + log_ladder_coefficient(sr.s, zr, out.right);
          if (std::isinf(lc_r)) continue;
          const int total = zl + zr + in.total();
          const int a_min = std::max(-sl.s, total - sr.s);
          const int a_max = std::min(sl.s, total + sr.s);
          const Chain c = sub_chain(sl.s, zl, sr.s, zr, total, a_min, a_max);
          const double w = std::exp(lw + lc_l + lc_r - scale);
          f(w, c, zl + in.left - a_min, zl + out.left - a_min);
        }
      }
    }
  }
}

std::complex<double> JunctionModel::evolution_element(ChargePair in, ChargePair out, double t) const {
  detail::ComplexSum acc;
  for_each_block(in, out, [&](double w, const Chain& c, int i, int o) {
    if (t == 0.0) {
      if (i == o) acc.add(w);
      return;
    }
    const Eigen::MatrixXcd u = chain_propagator(c, t);
    acc.add(w * u(o, i));
  });
  return acc.value();
}

double JunctionModel::layer_norm_sq(const Layer& layer, int n) const {
  detail::CompensatedSum acc;
  layer.table.for_each_row([&](int s, int sz, double lw, double) {
    const double lc = log_ladder_coefficient(s, sz, n);
    if (!std::isinf(lc)) acc.add(std::exp(lw + 2.0 * lc - 2.0 * std::abs(n) * layer.log_scale));
  });
  return acc.value();
}

double JunctionModel::state_norm(ChargePair state) const {
  return std::sqrt(layer_norm_sq(left_, state.left) * layer_norm_sq(right_, state.right));
}

JunctionDysonElement JunctionModel::dyson_element(ChargePair in, ChargePair out, double t, int order,
                                                  const DysonOptions& options) const {
  JunctionDysonElement e;
  e.in = in;
  e.out = out;
  detail::ComplexSum exact, dyson;
  for_each_block(in, out, [&](double w, const Chain& c, int i, int o) {
    const Eigen::MatrixXcd u = chain_propagator(c, t);
    exact.add(w * u(o, i));
    const DysonElement d = chain_dyson_element(c, i, o, t, order, options);
    e.converged = e.converged && d.converged;
    dyson.add(w * d.value * std::polar(1.0, -t * c.diagonal[i]));
  });
  e.exact = exact.value();
  e.dyson = dyson.value();
  const double norms = state_norm(in) * state_norm(out);
  e.normalized_error = norms > 0.0 ? std::abs(e.exact - e.dyson) / norms : 0.0;
  return e;
}

std::vector<JunctionBlock> build_blocks(const JunctionParams& params, int n_spins) {
  const JunctionModel model(params, n_spins);
  const ModelParams pl = params.left_layer(), pr = params.right_layer();
  const SectorTable tl = boltzmann_table(pl, n_spins), tr = boltzmann_table(pr, n_spins);
  const double lam = params.lambda / (double(n_spins) * n_spins);
  std::vector<JunctionBlock> blocks;
  tl.for_each_row([&](int s_l, int zl, double lw_l, double) {
    tr.for_each_row([&](int s_r, int zr, double lw_r, double) {
      JunctionBlock blk;
      blk.s_l = s_l;
      blk.sz_l0 = zl;
      blk.s_r = s_r;
      blk.sz_r0 = zr;
      blk.log_weight = lw_l + lw_r;
      const int dl = 2 * s_l + 1, dr = 2 * s_r + 1;
      blk.hamiltonian = Eigen::MatrixXd::Zero(dl * dr, dl * dr);
      const double ref = eta(pl, n_spins, s_l, zl) + eta(pr, n_spins, s_r, zr);
      auto idx = [&](int a, int b) { return (a + s_l) * dr + (b + s_r); };
      for (int a = -s_l; a <= s_l; ++a) {
        for (int b = -s_r; b <= s_r; ++b) {
          const double rel = 0.5 * ((a - zl) - (b - zr)) - params.n_g;
          blk.hamiltonian(idx(a, b), idx(a, b)) = eta(pl, n_spins, s_l, a) + eta(pr, n_spins, s_r, b) - ref +
                                                  params.e_c * rel * rel + 2.0 * pl.mu * (a - zl) +
                                                  2.0 * pr.mu * (b - zr);
          if (a < s_l && b > -s_r) {
            const double h = hop(lam, s_l, a, s_r, b);
            blk.hamiltonian(idx(a + 1, b - 1), idx(a, b)) = h;
            blk.hamiltonian(idx(a, b), idx(a + 1, b - 1)) = h;
          }
        }
      }
      blocks.push_back(std::move(blk));
    });
  });
  return blocks;
}

Eigen::VectorXd block_total_charge(const JunctionBlock& blk) {
  const int dl = 2 * blk.s_l + 1, dr = 2 * blk.s_r + 1;
  Eigen::VectorXd q(dl * dr);
  for (int a = -blk.s_l; a <= blk.s_l; ++a)
    for (int b = -blk.s_r; b <= blk.s_r; ++b) q[(a + blk.s_l) * dr + (b + blk.s_r)] = (a - blk.sz_l0) + (b - blk.sz_r0);
  return q;
}

TransitionElement evolution_element(const JunctionParams& params, int n_spins, ChargePair in, ChargePair out,
                                    double t) {
  const JunctionModel model(params, n_spins);
  return {in, out, t, model.evolution_element(in, out, t)};
}

MesoElement meso_element(const JunctionParams& params, double delta_l, double delta_r, ChargePair in,
                         ChargePair out, double t, int n_max) {
  MesoElement res;
  if (in.total() != out.total()) return res;
  const int total = in.total();
  const double q0 = (total % 2 != 0) ? 0.5 : 0.0;
  const double rel_in = 0.5 * (in.left - in.right), rel_out = 0.5 * (out.left - out.right);
  const double reach = std::max(std::abs(rel_in), std::abs(rel_out));
  ChargeBasisTruncation trunc{std::max(n_max, static_cast<int>(std::ceil(reach)) + 8), q0};
  CircuitParams cp;
  // The circle model requires e_c > 0; the smallest normal double stands in for zero.
  cp.e_c = params.e_c > 0.0 ? params.e_c : std::numeric_limits<double>::min();
  cp.e_j = qfluct::josephson_energy(params.lambda, delta_l, delta_r);
  cp.n_g = params.n_g;
  cp.bias = 2.0 * (params.left.mu - params.right.mu);
  const double global = -t * (params.left.mu + params.right.mu) * total;
  auto element = [&](const ChargeBasisTruncation& tr) {
    const Eigen::MatrixXcd u = circle_propagator(cp, tr, t);
    return std::polar(1.0, global) * u(tr.index_of(rel_out), tr.index_of(rel_in));
  };
  res.value = element(trunc);
  const std::complex<double> check = element(trunc.doubled());
  res.converged = std::abs(check - res.value) <= 1e-10;
  return res;
}

std::vector<MesoElementReport> meso_compare(const JunctionParams& params, const std::vector<int>& n_list,
                                            const std::vector<std::pair<ChargePair, ChargePair>>& elements,
                                            double t, int n_max) {
  const GapSolution gl = layer_gap(params.left_layer(), params.delta_left);
  const GapSolution gr = layer_gap(params.right_layer(), params.delta_right);
  std::vector<MesoElementReport> reports;
  for (const auto& [in, out] : elements) {
    MesoElementReport r;
    r.in = in;
    r.out = out;
    const MesoElement m = meso_element(params, gl.c, gr.c, in, out, t, n_max);
    r.meso = m.value;
    r.meso_converged = m.converged;
    reports.push_back(r);
  }
  for (int n : n_list) {
    const JunctionModel model(params, n);
    for (MesoElementReport& r : reports) {
      MesoRow row;
      row.n_spins = n;
      row.finite = model.evolution_element(r.in, r.out, t);
      row.abs_error = std::abs(row.finite - r.meso);
      r.rows.push_back(row);
    }
  }
  for (MesoElementReport& r : reports) {
    for (std::size_t i = 2; i < r.rows.size(); ++i)
      if (r.rows[i].abs_error > r.rows[i - 1].abs_error) r.monotone = false;
    if (r.rows.size() >= 3) {
      std::vector<double> x, re, im;
      for (const MesoRow& row : r.rows) {
        x.push_back(1.0 / row.n_spins);
        re.push_back(row.finite.real());
        im.push_back(row.finite.imag());
      }
      const LinearFit fr = fit_linear(x, re), fi = fit_linear(x, im);
      r.extrapolant = {fr.intercept, fi.intercept};
      r.extrapolation_residual = std::hypot(fr.rms_residual, fi.rms_residual);
    } else if (!r.rows.empty()) {
      r.extrapolant = r.rows.back().finite;
    }
  }
  return reports;
}

JunctionDysonReport dyson_junction(const JunctionParams& params, int n_spins, double t, int order,
                                   const std::vector<std::pair<ChargePair, ChargePair>>& elements,
                                   const DysonOptions& options) {
  const JunctionModel model(params, n_spins);
  JunctionDysonReport rep;
  rep.n_spins = n_spins;
  rep.order = order;
  rep.t = t;
  rep.bound = dyson_remainder_bound(2.0 * std::abs(params.lambda), t, order);
  for (const auto& [in, out] : elements) {
    JunctionDysonElement e = model.dyson_element(in, out, t, order, options);
    rep.max_normalized_error = std::max(rep.max_normalized_error, e.normalized_error);
    rep.converged = rep.converged && e.converged;
    rep.elements.push_back(e);
  }
  return rep;
}

std::complex<double> two_layer_correlator(const JunctionParams& params, int n_spins,
                                          const FluctuationWord& left_word, const FluctuationWord& right_word) {
  left_word.validate();
  right_word.validate();
  const GapSolution gl = layer_gap(params.left_layer(), params.delta_left);
  const GapSolution gr = layer_gap(params.right_layer(), params.delta_right);
  if (!(gl.c > 0.0) || !(gr.c > 0.0)) throw NormalPhaseError("both layers must be superconducting");
  const SectorTable tl = boltzmann_table(params.left_layer(), n_spins);
  const SectorTable tr = boltzmann_table(params.right_layer(), n_spins);
  const double scale = (left_word.total_n() + left_word.total_m()) * std::log(gl.c * n_spins) +
                       (right_word.total_n() + right_word.total_m()) * std::log(gr.c * n_spins);
  std::vector<double> right_terms;
  tr.for_each_row([&](int s, int sz, double lw, double) { right_terms.push_back(lw + word_log_amplitude(s, sz, right_word)); });
  detail::CompensatedSum acc;
  tl.for_each_row([&](int s, int sz, double lw, double) {
    const double left = lw + word_log_amplitude(s, sz, left_word);
    if (std::isinf(left)) return;
    for (double r : right_terms)
      if (!std::isinf(r)) acc.add(std::exp(left + r - scale));
  });
  return std::polar(acc.value(), left_word.phase_angle() + right_word.phase_angle());
}

}  // namespace qfluct
