#include "qfluct/chain.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <unsupported/Eigen/MatrixFunctions>

#include "qfluct/errors.hpp"

namespace qfluct {

namespace {

using cd = std::complex<double>;

// Gauss-Legendre rule on [-1, 1] together with the spectral integration
// matrix: (S f)_i ~ int_{-1}^{x_i} f for f sampled at the nodes.
struct LegendreRule {
  Eigen::VectorXd x, w;
  Eigen::MatrixXd s;
};

void legendre_values(int q, double x, std::vector<double>& p) {
  p.assign(q + 1, 0.0);
  p[0] = 1.0;
  if (q >= 1) p[1] = x;
  for (int n = 1; n < q; ++n) p[n + 1] = ((2.0 * n + 1.0) * x * p[n] - n * p[n - 1]) / (n + 1.0);
}

LegendreRule make_rule(int q) {
  LegendreRule r;
  r.x.resize(q);
  r.w.resize(q);
  std::vector<double> p;
  for (int i = 0; i < q; ++i) {
    double x = -std::cos(M_PI * (i + 0.75) / (q + 0.5));
    for (int it = 0; it < 100; ++it) {
      legendre_values(q, x, p);
      const double dp = q * (x * p[q] - p[q - 1]) / (x * x - 1.0);
      const double dx = p[q] / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre_values(q, x, p);
    const double dp = q * (x * p[q] - p[q - 1]) / (x * x - 1.0);
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  // Projection onto P_0..P_{q-1}, then exact antiderivatives
  // int_{-1}^x P_0 = x + 1 and int_{-1}^x P_n = (P_{n+1} - P_{n-1}) / (2n + 1).
  Eigen::MatrixXd proj(q, q), integ(q, q);
  for (int j = 0; j < q; ++j) {
    legendre_values(q, r.x[j], p);
    for (int n = 0; n < q; ++n) {
      proj(n, j) = r.w[j] * p[n] * (2.0 * n + 1.0) / 2.0;
      integ(j, n) = n == 0 ? r.x[j] + 1.0 : (p[n + 1] - p[n - 1]) / (2.0 * n + 1.0);
    }
  }
  r.s = integ * proj;
  return r;
}

constexpr int kLevels = 7;  // 16 .. 1024 nodes

const LegendreRule& rule_for_level(int level) {
  static std::array<LegendreRule, kLevels> rules;
  static std::array<std::once_flag, kLevels> flags;
  std::call_once(flags[level], [level] { rules[level] = make_rule(16 << level); });
  return rules[level];
}

cd simplex_gauss_legendre(const std::vector<double>& omegas, double t, const LegendreRule& r) {
  const int k = static_cast<int>(omegas.size());
  const int q = static_cast<int>(r.x.size());
  const double half = 0.5 * t;
  auto factor = [&](int j) {
    Eigen::VectorXcd e(q);
    for (int i = 0; i < q; ++i) e[i] = std::polar(1.0, -omegas[j] * half * (r.x[i] + 1.0));
    return e;
  };
  Eigen::VectorXcd g = factor(k - 1);
  for (int j = k - 1; j >= 1; --j) g = factor(j - 1).cwiseProduct(half * (r.s.cast<cd>() * g));
  return half * r.w.cast<cd>().dot(g);
}

cd simplex_exact(const std::vector<double>& omegas, double t) {
  const int k = static_cast<int>(omegas.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(k + 1, k + 1);
  double cumulative = 0.0;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) cumulative += omegas[j - 1];
    m(j, j) = cd(0.0, -cumulative * t);
    if (j < k) m(j, j + 1) = t;
  }
  const Eigen::MatrixXcd e = m.exp();
  return e(0, k);
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

Eigen::MatrixXd Chain::matrix() const {
  const int n = size();
  Eigen::MatrixXd h = diagonal.asDiagonal();
  for (int i = 0; i + 1 < n; ++i) h(i, i + 1) = h(i + 1, i) = hopping[i];
  return h;
}

double Chain::hopping_norm_bound() const {
  const int n = size();
  double b = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    if (i > 0) row += std::abs(hopping[i - 1]);
    if (i + 1 < n) row += std::abs(hopping[i]);
    b = std::max(b, row);
  }
  return b;
}

Eigen::MatrixXcd chain_propagator(const Chain& chain, double t) {
  const int n = chain.size();
  if (n == 1) return Eigen::MatrixXcd::Constant(1, 1, std::polar(1.0, -t * chain.diagonal[0]));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(chain.diagonal, chain.hopping, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("tridiagonal eigensolver failed");
  Eigen::VectorXcd phases(n);
  for (int i = 0; i < n; ++i) phases[i] = std::polar(1.0, -t * es.eigenvalues()[i]);
  const Eigen::MatrixXcd v = es.eigenvectors().cast<cd>();
  return v * phases.asDiagonal() * v.transpose();
}

SimplexResult ordered_simplex_integral(const std::vector<double>& omegas, double t, SimplexMethod method,
                                       double rel_tol, int max_nodes) {
  SimplexResult res;
  const int k = static_cast<int>(omegas.size());
  if (k == 0) {
    res.value = 1.0;
    return res;
  }
  if (method == SimplexMethod::kExact) {
    res.value = simplex_exact(omegas, t);
    return res;
  }
  const double scale = std::pow(std::abs(t), k) / factorial(k);
  cd previous = simplex_gauss_legendre(omegas, t, rule_for_level(0));
  res.nodes = 16;
  for (int level = 1; level < kLevels && (16 << level) <= max_nodes; ++level) {
    const cd current = simplex_gauss_legendre(omegas, t, rule_for_level(level));
    res.nodes = 16 << level;
    const bool stable = std::abs(current - previous) <= rel_tol * scale;
    previous = current;
    if (stable) {
      res.value = current;
      res.converged = true;
      return res;
    }
  }
  res.value = previous;
  res.converged = false;
  return res;
}

DysonElement chain_dyson_element(const Chain& chain, int in, int out, double t, int order,
                                 const DysonOptions& options) {
  if (order < 0) throw ParameterError("Dyson order must be >= 0");
  const int n = chain.size();
  DysonElement res;
  if (in == out) res.value = 1.0;
  std::vector<int> path{in};
  std::vector<double> omegas;
  // Depth-first enumeration of nearest-neighbour walks from in to out.
  auto visit = [&](auto&& self, double amplitude) -> void {
    const int depth = static_cast<int>(omegas.size());
    const int here = path.back();
    if (depth > 0 && here == out) {
      const SimplexResult s = ordered_simplex_integral(omegas, t, options.method, options.tolerance, options.max_nodes);
      res.converged = res.converged && s.converged;
      res.max_nodes = std::max(res.max_nodes, s.nodes);
      cd phase = 1.0;
      for (int i = 0; i < depth; ++i) phase *= cd(0.0, -1.0);
      res.value += phase * amplitude * s.value;
    }
    if (depth == order) return;
    // Remaining steps must still be able to reach out.
    for (int step : {-1, 1}) {
      const int next = here + step;
      if (next < 0 || next >= n) continue;
      if (std::abs(out - next) > order - depth - 1) continue;
      const double h = step > 0 ? chain.hopping[here] : chain.hopping[next];
      if (h == 0.0) continue;
      path.push_back(next);
      omegas.push_back(chain.diagonal[next] - chain.diagonal[here]);
      self(self, amplitude * h);
      omegas.pop_back();
      path.pop_back();
    }
  };
  visit(visit, 1.0);
  return res;
}

DysonMatrix chain_dyson(const Chain& chain, double t, int order, const DysonOptions& options) {
  const int n = chain.size();
  DysonMatrix res;
  res.d = Eigen::MatrixXcd::Zero(n, n);
  for (int in = 0; in < n; ++in) {
    for (int out = 0; out < n; ++out) {
      if (std::abs(out - in) > order) continue;
      const DysonElement e = chain_dyson_element(chain, in, out, t, order, options);
      res.d(out, in) = e.value;
      res.converged = res.converged && e.converged;
      res.max_nodes = std::max(res.max_nodes, e.max_nodes);
    }
  }
  return res;
}

double dyson_remainder_bound(double h1_norm, double t, int order) {
  return std::pow(std::abs(h1_norm * t), order + 1) / factorial(order + 1);
}

}  // namespace qfluct
