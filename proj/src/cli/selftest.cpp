#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "qfluct/cli.hpp"
#include "qfluct/correlators.hpp"
#include "qfluct/gap.hpp"
#include "qfluct/junction.hpp"
#include "qfluct/oracle/dense.hpp"
#include "qfluct/sectors.hpp"

namespace qfluct::cli {

namespace {

struct Check {
  std::string name;
  double deviation = 0.0;
  double limit = 0.0;
  bool pass() const { return deviation <= limit; }
};

double rel_dev(std::complex<double> a, std::complex<double> b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

}  // namespace

int cmd_selftest(const SelftestOptions& options) {
  std::ostream& log = options.log ? *options.log : std::cout;
  const double tol = options.tolerance;
  auto mult = [&](int n, HalfInteger s) {
    return options.multiplicity ? options.multiplicity(n, s) : multiplicity(n, s);
  };
  std::vector<Check> checks;

  {
    Check c{"sectors.dimension_rule(N<=40)", 0.0, 0.0};
    for (int n = 2; n <= 40; n += 2) {
      unsigned __int128 total = 0;
      for (int s = n / 2; s >= 0; --s) total += (unsigned __int128)mult(n, s) * (2 * s + 1);
      const unsigned __int128 expect = (unsigned __int128)1 << n;
      c.deviation = std::max(c.deviation, std::abs(double(total) - double(expect)));
    }
    checks.push_back(c);
  }
  {
    Check c{"sectors.casimir_multiplicity(N=2,4,6)", 0.0, 0.0};
    for (int n : {2, 4, 6}) {
      const std::vector<long> d = oracle::casimir_multiplicities(n);
      for (int s = n / 2, i = 0; s >= 0; --s, ++i)
        c.deviation = std::max(c.deviation, std::abs(double(d[i]) - double(mult(n, s))));
    }
    checks.push_back(c);
  }
  const ModelParams p{0.3, 1.0, 1.7, 0.25};
  {
    Check c{"sectors.dense_spectrum(N=2,4,6)", 0.0, tol};
    for (int n : {2, 4, 6}) {
      const Eigen::VectorXd a = oracle::dense_spectrum(p, n), b = oracle::sector_spectrum(p, n);
      c.deviation = std::max(c.deviation, (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff()));
    }
    checks.push_back(c);
  }
  const GapSolution gap = solve_gap(p.epsilon, p.t_c, p.beta);
  {
    Check c{"correlators.words(N=2,4,6)", 0.0, tol};
    const std::vector<FluctuationWord> words{
        {{{0.0, 1, 0}, {0.0, 0, 1}}},
        {{{0.4, 0, 1}, {-1.1, 1, 0}}},
        {{{0.2, 1, 2}, {0.7, 2, 1}, {0.3, 0, 0}}},
        {{{0.5, 0, 2}, {0.1, 1, 0}}},
    };
    CorrelationOptions force;
    force.force_numeric = true;
    for (int n : {2, 4, 6}) {
      const oracle::DenseGns dense(p, n, gap.c);
      const SectorTable table = boltzmann_table(p, n);
      for (const FluctuationWord& w : words)
        c.deviation = std::max(c.deviation, rel_dev(correlation_finite_n(table, w, gap, force), dense.correlation(w)));
    }
    checks.push_back(c);
  }
  {
    Check c{"correlators.evolution(N=2,4,6)", 0.0, tol};
    for (int n : {2, 4, 6}) {
      const oracle::DenseGns dense(p, n, gap.c);
      const SectorTable table = boltzmann_table(p, n);
      for (int m : {-1, 0, 1, 2})
        for (int k : {m, m + 1})
          c.deviation = std::max(c.deviation, rel_dev(single_layer_evolution_element(table, p, k, m, 0.9, gap),
                                                       dense.evolution_element(k, m, 0.9)));
      c.deviation = std::max(c.deviation, rel_dev(w_expectation(table, p, 2, 0.7), dense.w_expectation(2, 0.7)));
      c.deviation = std::max(c.deviation, dense.w_identity_residual(0.7));
      c.deviation = std::max(c.deviation, std::abs(pair_expectation(table) - dense.pair_expectation()));
    }
    checks.push_back(c);
  }
  {
    Check c{"junction.dense_blocks(N=2)", 0.0, tol};
    JunctionParams jp;
    jp.beta = 1.3;
    jp.left = {0.1, 1.0, jp.beta, 0.2};
    jp.right = {0.25, 1.2, jp.beta, -0.1};
    jp.lambda = 0.8;
    jp.e_c = 0.6;
    jp.n_g = 0.3;
    const JunctionModel model(jp, 2);
    const oracle::DenseJunction dense(jp, 2, model.delta_left(), model.delta_right());
    const std::vector<std::pair<ChargePair, ChargePair>> els{
        {{0, 0}, {0, 0}}, {{0, 0}, {1, -1}}, {{1, 0}, {0, 1}}, {{1, -1}, {-1, 1}}, {{0, 1}, {1, 0}}, {{1, 0}, {1, 1}}};
    for (const auto& [in, out] : els)
      c.deviation = std::max(c.deviation, rel_dev(model.evolution_element(in, out, 0.8), dense.element(in, out, 0.8)));
    checks.push_back(c);
  }

  bool ok = true;
  for (const Check& c : checks) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", c.deviation);
    log << (c.pass() ? "PASS " : "FAIL ") << c.name << " max_dev=" << buf << "\n";
    ok = ok && c.pass();
  }
  log << (ok ? "selftest passed" : "selftest FAILED") << " (" << checks.size() << " suites, tol=" << tol << ")\n";
  return ok ? kOk : kSelftestFailure;
}

}  // namespace qfluct::cli
