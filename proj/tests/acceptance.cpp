// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and parameter choices are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qfluct/circle.hpp"
#include "qfluct/correlators.hpp"
#include "qfluct/fit.hpp"
#include "qfluct/gap.hpp"
#include "qfluct/junction.hpp"
#include "qfluct/oracle/dense.hpp"
#include "qfluct/sectors.hpp"

using namespace qfluct;
using cd = std::complex<double>;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, double time_limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.note(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < time_limit_s, "runtime " + fmt(secs) + " s over limit " + fmt(time_limit_s) + " s");
  std::printf("%s [%d] %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

// Independent evaluation of delta_{m,n} exp(i sum_j sum_{k<=j} alpha_k (m_j - n_j)).
cd phase_formula(const FluctuationWord& w) {
  int n = 0, m = 0;
  for (const WordFactor& f : w.factors) {
    n += f.n;
    m += f.m;
  }
  if (n != m) return 0.0;
  double angle = 0.0;
  for (std::size_t j = 0; j < w.factors.size(); ++j) {
    double partial = 0.0;
    for (std::size_t k = 0; k <= j; ++k) partial += w.factors[k].alpha;
    angle += partial * (w.factors[j].m - w.factors[j].n);
  }
  return std::polar(1.0, angle);
}

}  // namespace

int main() {
  criterion(1, "sector oracle", 10.0, [](Outcome& o) {
    const ModelParams p{0.3, 1.0, 1.0, 0.0};
    double spec_dev = 0.0;
    bool mult_ok = true;
    for (int n : {2, 4, 6}) {
      const Eigen::VectorXd dense = oracle::dense_spectrum(p, n), sect = oracle::sector_spectrum(p, n);
      o.require(dense.size() == sect.size(), "spectrum size at N=" + std::to_string(n));
      if (dense.size() == sect.size()) spec_dev = std::max(spec_dev, (dense - sect).cwiseAbs().maxCoeff());
      const std::vector<long> d = oracle::casimir_multiplicities(n);
      for (int s = n / 2, i = 0; s >= 0; --s, ++i) mult_ok = mult_ok && d[i] == long(multiplicity(n, s));
    }
    o.require(spec_dev <= 1e-10, "dense vs sector spectrum deviation " + fmt(spec_dev));
    o.require(mult_ok, "Casimir multiplicities");
    bool dim_ok = true;
    for (int n = 2; n <= 40; n += 2) dim_ok = dim_ok && dimension_sum(n) == (std::uint64_t(1) << n);
    o.require(dim_ok, "dimension rule for N <= 40");
    o.note("max spectrum deviation " + fmt(spec_dev) + ", dimension rule exact for N=2..40");
  });

  criterion(2, "gap asymptotics and critical scaling", 5.0, [](Outcome& o) {
    const GapSolution g0 = solve_gap(0.0, 1.0, 1e3);
    o.require(g0.converged && std::abs(g0.delta - 0.5) <= 1e-8, "Delta(beta=1e3) = " + fmt(g0.delta));
    const double bold0 = rescaled_gap(g0, 1.0);
    std::vector<double> x, y;
    for (int i = 0; i <= 40; ++i) {
      const double one_minus_tau = std::pow(10.0, -2.0 - 2.0 * i / 40.0);  // T/T_c from 0.99 to 0.9999
      const GapSolution g = solve_gap(0.0, 1.0, 1.0 / (1.0 - one_minus_tau));
      o.require(g.converged, "solver converged near T_c");
      x.push_back(one_minus_tau);
      y.push_back(rescaled_gap(g, 1.0));
    }
    const PowerLawFit f = fit_power_law(x, y);
    const double amp_ref = std::sqrt(3.0) * bold0;
    o.require(std::abs(f.exponent - 0.5) <= 0.02, "exponent " + fmt(f.exponent));
    o.require(std::abs(f.amplitude - amp_ref) <= 0.03 * amp_ref, "amplitude " + fmt(f.amplitude));
    o.note("Delta(0)=" + fmt(g0.delta) + ", exponent " + fmt(f.exponent) + ", amplitude " + fmt(f.amplitude) +
           " vs sqrt(3)*boldDelta(0)=" + fmt(amp_ref));
  });

  criterion(3, "finite-N fluctuation correlators", 120.0, [](Outcome& o) {
    const ModelParams p{0.0, 1.0, 2.0, 0.0};
    const GapSolution gap = solve_gap(p.epsilon, p.t_c, p.beta);
    const FluctuationWord pair{{{0.0, 1, 0}, {0.0, 0, 1}}};
    const std::vector<FluctuationWord> off{{{{0.0, 0, 1}}}, {{{0.3, 1, 0}, {0.2, 1, 0}}}, {{{0.1, 2, 1}, {0.0, 0, 0}}}};
    CorrelationOptions force;
    force.force_numeric = true;

    std::vector<int> ns;
    for (int n = 64; n <= 4096; n *= 2) ns.push_back(n);
    std::vector<double> xs, errs;
    bool zeros = true;
    for (int n : ns) {
      const SectorTable t = boltzmann_table(p, n);
      const double e = std::abs(correlation_finite_n(t, pair, gap) - 1.0);
      xs.push_back(n);
      errs.push_back(e);
      for (const FluctuationWord& w : off) {
        zeros = zeros && correlation_finite_n(t, w, gap) == cd(0.0, 0.0);
        zeros = zeros && correlation_finite_n(t, w, gap, force) == cd(0.0, 0.0);
      }
    }
    o.require(zeros, "off-diagonal correlators exactly zero");
    bool decreasing = true;
    for (std::size_t i = 1; i < errs.size(); ++i) decreasing = decreasing && errs[i] < errs[i - 1];
    o.require(decreasing, "<E_- E_+> error decreasing");
    const PowerLawFit f = fit_power_law(xs, errs);
    o.require(std::abs(f.exponent + 1.0) <= 0.3, "decay exponent " + fmt(f.exponent));

    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> angle(-M_PI, M_PI);
    std::uniform_int_distribution<int> count(0, 2), length(1, 3);
    std::vector<FluctuationWord> words;
    while (words.size() < 20) {
      FluctuationWord w;
      const int len = length(rng);
      for (int j = 0; j < len; ++j) w.factors.push_back({angle(rng), count(rng), count(rng)});
      // Balance every other word so that both branches of the formula are exercised.
      if (words.size() % 2 == 0) {
        const int diff = w.total_m() - w.total_n();
        if (diff > 0) w.factors.back().n += diff;
        if (diff < 0) w.factors.back().m -= diff;
      }
      words.push_back(w);
    }
    double formula_dev = 0.0;
    for (const FluctuationWord& w : words)
      formula_dev = std::max(formula_dev, std::abs(mesoscopic_prediction(w).value - phase_formula(w)));
    o.require(formula_dev <= 1e-14, "mesoscopic_prediction vs formula " + fmt(formula_dev));

    // 1/N envelope from N = 256, 512, 1024: the largest of the measured
    // N |F_N - F| and their Richardson estimate of the 1/N coefficient.
    std::vector<SectorTable> tables;
    for (int n : {256, 512, 1024, 2048}) tables.push_back(boltzmann_table(p, n));
    int inside = 0;
    double worst_ratio = 0.0;
    for (const FluctuationWord& w : words) {
      const cd limit = mesoscopic_prediction(w).value;
      double scaled[3];
      for (int k = 0; k < 3; ++k)
        scaled[k] = tables[k].n_spins() * std::abs(correlation_finite_n(tables[k], w, gap) - limit);
      const double envelope = std::max({scaled[0], scaled[1], scaled[2], 2.0 * scaled[2] - scaled[1]});
      const double e2048 = std::abs(correlation_finite_n(tables[3], w, gap) - limit);
      const double allowed = envelope / 2048.0;
      if (e2048 <= allowed) ++inside;
      if (allowed > 0) worst_ratio = std::max(worst_ratio, e2048 / allowed);
      else if (e2048 > 0) worst_ratio = INFINITY;
    }
    o.require(inside == 20, std::to_string(20 - inside) + " words outside the 1/N envelope at N=2048");
    o.note("exponent " + fmt(f.exponent) + ", error N=4096 " + fmt(errs.back()) + ", formula dev " + fmt(formula_dev) +
           ", N=2048 error / envelope max " + fmt(worst_ratio));
  });

  criterion(4, "single-layer dynamics", 60.0, [](Outcome& o) {
    const ModelParams p{0.0, 1.0, 2.0, 0.3};
    const GapSolution gap = solve_gap(p.epsilon, p.t_c, p.beta);
    const double t = 1.0;
    const cd target = std::polar(1.0, -2.0 * p.mu * t);
    std::vector<double> errs;
    for (int n = 64; n <= 2048; n *= 2) errs.push_back(std::abs(single_layer_evolution_element(p, n, 1, 1, t, gap) - target));
    bool mono = true;
    for (std::size_t i = 2; i < errs.size(); ++i) mono = mono && errs[i] < errs[i - 1];
    o.require(mono, "error not monotone after the first point");
    o.require(errs.back() * 5.0 <= errs.front(), "final error " + fmt(errs.back()) + " vs first " + fmt(errs.front()));
    o.note("error N=64 " + fmt(errs.front()) + ", N=2048 " + fmt(errs.back()) + ", ratio " + fmt(errs.front() / errs.back()));
  });

  criterion(5, "norm estimates", 30.0, [](Outcome& o) {
    const GapSolution gap = solve_gap(0.0, 1.0, 2.0);
    double xyz_dev = 0.0, pm_excess = -INFINITY;
    std::vector<double> comm;
    for (int n : {2, 4, 6, 8}) {
      const oracle::SpinOperators s = oracle::spin_operators(n);
      for (const Eigen::MatrixXcd* a : {&s.sx, &s.sy, &s.sz}) xyz_dev = std::max(xyz_dev, std::abs(oracle::operator_norm(*a) - 0.5 * n));
      for (const Eigen::MatrixXcd* a : {&s.sp, &s.sm}) pm_excess = std::max(pm_excess, oracle::operator_norm(*a) - 0.5 * (n + 1));
      const double scale = gap.c * n;
      const Eigen::MatrixXcd em = s.sm / scale, ep = s.sp / scale;
      comm.push_back(oracle::operator_norm(em * ep - ep * em) * n);
    }
    o.require(xyz_dev <= 1e-10, "||S_xyz|| deviation from N/2 " + fmt(xyz_dev));
    o.require(pm_excess <= 1e-12, "||S_pm|| exceeds (N+1)/2 by " + fmt(pm_excess));
    const double bound = 1.0 / (gap.c * gap.c) * (1.0 + 1e-9);
    double cmax = 0.0;
    for (double c : comm) cmax = std::max(cmax, c);
    o.require(cmax <= bound, "N ||[E_-,E_+]|| exceeds the N-independent bound 1/c^2");
    o.note("||S_xyz|| dev " + fmt(xyz_dev) + ", max(||S_pm|| - (N+1)/2) " + fmt(pm_excess) + ", N||[E_-,E_+]|| in [" +
           fmt(*std::min_element(comm.begin(), comm.end())) + ", " + fmt(cmax) + "]");
  });

  criterion(6, "circle module", 10.0, [](Outcome& o) {
    const ChargeBasisTruncation tr{16, 0.0};
    {
      const CircuitParams cp{1.3, 0.0, 0.3, 0.0};
      const Spectrum sp = spectrum(cp, tr, tr.dimension());
      std::vector<double> analytic;
      for (int i = 0; i < tr.dimension(); ++i) analytic.push_back(cp.e_c * std::pow(tr.charge(i) - cp.n_g, 2));
      std::sort(analytic.begin(), analytic.end());
      double dev = 0.0;
      for (int i = 0; i < tr.dimension(); ++i)
        dev = std::max(dev, std::abs(sp.energies[i] - analytic[i]) / std::max(1.0, analytic[i]));
      o.require(dev <= 1e-12, "E_J=0 spectrum deviation " + fmt(dev));
    }
    const CircuitParams qubit{1.0, 0.01, 0.5, 0.0};
    const Spectrum sq = spectrum(qubit, tr, 2);
    const double split = sq.energies[1] - sq.energies[0];
    o.require(sq.converged && std::abs(split - qubit.e_j) <= 0.01 * qubit.e_j, "qubit splitting " + fmt(split));

    double weyl = 0.0;
    const Eigen::MatrixXcd p = build_momentum(tr);
    for (double alpha : {0.37, -1.2, 2.5})
      for (int n : {-3, -1, 1, 2, 5}) {
        const Eigen::MatrixXcd lhs = build_phase_exponential(tr, alpha) * build_weyl(tr, n);
        const Eigen::MatrixXcd rhs = std::polar(1.0, n * alpha) * build_weyl(tr, n) * build_phase_exponential(tr, alpha);
        const int lo = std::abs(n), hi = tr.dimension() - std::abs(n);
        weyl = std::max(weyl, (lhs - rhs).block(lo, 0, hi - lo, tr.dimension()).cwiseAbs().maxCoeff());
      }
    const Eigen::MatrixXcd w1 = build_weyl(tr, 1);
    weyl = std::max(weyl, (p * w1 - w1 * p - w1).block(1, 0, tr.dimension() - 2, tr.dimension()).cwiseAbs().maxCoeff());
    o.require(weyl < 1e-10, "Weyl residual " + fmt(weyl));

    const CircuitParams jc{1.0, 0.7, 0.2, 0.0};
    const double width = 0.05;
    const ChargeBasisTruncation wide{160, 0.0};
    double packet = 0.0;
    for (double phi : {-2.5, -1.0, 0.0, 0.6, 1.5, 3.0})
      packet = std::max(packet, std::abs(josephson_current(jc, phase_peaked_state(wide, phi, width)) - jc.e_j * std::sin(phi)));
    o.require(packet <= std::abs(jc.e_j) * width, "phase-packet current deviation " + fmt(packet));

    CircleState s{tr, Eigen::VectorXcd::Zero(tr.dimension())};
    s.amplitudes[tr.index_of(0)] = 1.0 / std::sqrt(2.0);
    s.amplitudes[tr.index_of(1)] = cd(0.0, 1.0 / std::sqrt(2.0));
    const double j01 = josephson_current(jc, s);
    o.require(std::abs(j01 + 0.5 * jc.e_j) <= 1e-10, "(|0>+i|1>)/sqrt2 current " + fmt(j01));
    o.note("splitting/E_J " + fmt(split / qubit.e_j) + ", Weyl residual " + fmt(weyl) + ", packet deviation " + fmt(packet) +
           " (width " + fmt(width) + ")");
  });

  criterion(7, "junction convergence to the circle model", 300.0, [](Outcome& o) {
    JunctionParams jp;
    jp.beta = 5.0;
    jp.left = {0.0, 1.0, jp.beta, 0.0};
    jp.right = {0.0, 1.0, jp.beta, 0.0};
    jp.lambda = 1.0;
    jp.e_c = 1.0;
    jp.n_g = 0.25;
    const double t = 0.3;  // lambda t = 0.3
    const std::vector<std::pair<ChargePair, ChargePair>> els{
        {{0, 0}, {1, -1}}, {{0, 0}, {1, 0}}, {{1, 0}, {0, 0}}, {{0, 0}, {1, 1}}, {{1, -1}, {0, 1}}};
    const auto reports = meso_compare(jp, {4, 8, 12, 16}, els, t);
    const MesoElementReport& main = reports[0];
    std::string errs;
    for (const MesoRow& r : main.rows) errs += (errs.empty() ? "" : ", ") + fmt(r.abs_error);
    o.require(main.meso_converged, "circle comparator truncation");
    o.require(main.monotone && main.rows[1].abs_error <= main.rows[0].abs_error, "error not non-increasing");
    o.require(main.rows.back().abs_error <= 0.5 * main.rows.front().abs_error, "final error above half the initial");
    bool zeros = true;
    for (std::size_t e = 1; e < reports.size(); ++e) {
      zeros = zeros && reports[e].meso == cd(0.0, 0.0);
      for (const MesoRow& r : reports[e].rows) zeros = zeros && r.finite == cd(0.0, 0.0);
    }
    o.require(zeros, "charge-violating elements not exactly zero");
    o.note("errors N=4,8,12,16: " + errs + "; 1/N extrapolant error " + fmt(std::abs(main.extrapolant - main.meso)));
  });

  criterion(8, "Dyson remainder bounds", 180.0, [](Outcome& o) {
    const CircuitParams cp{1.0, 0.5, 0.25, 0.0};
    const ChargeBasisTruncation tr{8, 0.0};
    const double tc = 1.0;  // E_J t = 0.5
    const Eigen::MatrixXcd exact = circle_propagator(cp, tr, tc);
    std::string circle_line;
    for (int k = 0; k <= 4; ++k) {
      const CircleDyson d = dyson_circle(cp, tr, tc, k);
      const Eigen::MatrixXcd diff = exact - d.d_times_u0;
      const double err = oracle::operator_norm(diff);
      o.require(d.converged, "circle quadrature at K=" + std::to_string(k));
      o.require(err <= d.bound, "circle K=" + std::to_string(k) + " error " + fmt(err) + " > bound " + fmt(d.bound));
      circle_line += (circle_line.empty() ? "" : " ") + fmt(err) + "/" + fmt(d.bound);
    }
    JunctionParams jp;
    jp.beta = 5.0;
    jp.left = {0.0, 1.0, jp.beta, 0.0};
    jp.right = {0.0, 1.0, jp.beta, 0.0};
    jp.lambda = 1.0;
    jp.e_c = 1.0;
    jp.n_g = 0.25;
    const double t = 0.3;
    std::vector<std::pair<ChargePair, ChargePair>> els;
    const std::vector<ChargePair> states{{0, 0}, {1, -1}, {-1, 1}, {1, 0}, {0, 1}, {2, -1}, {-1, 2}, {2, -2}};
    for (const ChargePair& a : states)
      for (const ChargePair& b : states)
        if (a.total() == b.total()) els.push_back({a, b});
    std::string junction_line;
    for (int n : {4, 8}) {
      for (int k = 0; k <= 4; ++k) {
        const JunctionDysonReport r = dyson_junction(jp, n, t, k, els);
        o.require(r.converged, "junction quadrature N=" + std::to_string(n));
        o.require(r.max_normalized_error <= r.bound, "junction N=" + std::to_string(n) + " K=" + std::to_string(k) +
                                                          " error " + fmt(r.max_normalized_error) + " > bound " + fmt(r.bound));
        if (k == 0 || k == 4)
          junction_line += (junction_line.empty() ? "" : " ") + std::string("N=") + std::to_string(n) + ",K=" +
                           std::to_string(k) + ":" + fmt(r.max_normalized_error) + "/" + fmt(r.bound);
      }
    }
    o.note("circle error/bound K=0..4: " + circle_line + "; junction " + junction_line);
  });

  criterion(9, "phase average <S+S->/N^2 -> Delta^2", 60.0, [](Outcome& o) {
    const ModelParams p{0.0, 1.0, 2.0, 0.0};
    const GapSolution gap = solve_gap(p.epsilon, p.t_c, p.beta);
    std::vector<double> diffs;
    for (int n = 64; n <= 2048; n *= 2) diffs.push_back(std::abs(pair_expectation(boltzmann_table(p, n)) - gap.delta * gap.delta));
    bool decreasing = true;
    for (std::size_t i = 1; i < diffs.size(); ++i) decreasing = decreasing && diffs[i] < diffs[i - 1];
    o.require(decreasing, "difference not decreasing with N");
    o.note("|<S+S->/N^2 - Delta^2| N=64 " + fmt(diffs.front()) + ", N=2048 " + fmt(diffs.back()));
  });

  std::printf("%s: %d of 9 criteria failed\n", failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED", failures);
  return failures ? 1 : 0;
}
