#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "qfluct/circle.hpp"
#include "qfluct/cli.hpp"
#include "qfluct/correlators.hpp"
#include "qfluct/errors.hpp"
#include "qfluct/fit.hpp"
#include "qfluct/gap.hpp"
#include "qfluct/io.hpp"
#include "qfluct/junction.hpp"
#include "qfluct/parallel.hpp"

namespace qfluct::cli {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ostream& log_of(const RunOptions& o) { return o.log ? *o.log : std::cout; }

std::string config_hash(const std::string& command, const json& config) {
  return hex64(fnv1a64(command + "\n" + config.dump()));
}

class CsvFile {
 public:
  CsvFile(const RunOptions& o, const std::string& name, const Provenance& prov, const std::string& header)
      : path_(std::filesystem::path(o.out_dir) / name) {
    out_ << prov.header() << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }
  std::string close() {
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path_.string());
    f << out_.str();
    return path_.string();
  }

 private:
  std::filesystem::path path_;
  std::ostringstream out_;
};

std::string write_json(const RunOptions& o, const std::string& name, const json& j) {
  const auto path = std::filesystem::path(o.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << j.dump(2) << "\n";
  return path.string();
}

void prepare_out(const RunOptions& o) {
  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + o.out_dir + ": " + ec.message());
}

std::string gap_line(const std::string& label, const GapSolution& g) { return "gap_" + label + " " + to_json(g).dump(); }

std::vector<int> even_list(ConfigReader& r, const std::string& key, std::vector<int> fallback) {
  std::vector<int> v = r.integers(key);
  if (!r.has(key)) v = std::move(fallback);
  if (v.empty()) throw ConfigError(key + " must not be empty");
  for (int n : v)
    if (n < 2 || n % 2 != 0) throw ConfigError(key + " entries must be even and >= 2");
  return v;
}

FluctuationWord read_word(ConfigReader& r, const std::string& key, const FluctuationWord& fallback) {
  const json v = r.raw(key);
  if (v.is_null()) return fallback;
  try {
    return word_from_json(v);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("malformed word: ") + e.what());
  }
}

ModelParams read_layer(ConfigReader r, double beta) {
  ModelParams p;
  p.epsilon = r.number("epsilon", 0.0);
  p.t_c = r.number("t_c", 1.0);
  p.mu = r.number("mu", 0.0);
  p.beta = beta;
  r.finish();
  return p;
}

}  // namespace

int cmd_gap(const json& config, const RunOptions& o) {
  ConfigReader r(config, "");
  const double eps = r.number("epsilon", 0.0);
  const double t_c = r.number("t_c", 1.0);
  const double lambda = r.number("lambda", 1.0);
  std::vector<double> betas = r.numbers("betas");
  for (double temp : r.numbers("temperatures")) {
    if (!(temp > 0.0)) throw ConfigError("temperatures must be positive");
    betas.push_back(1.0 / temp);
  }
  GapOptions gopt;
  gopt.tolerance = o.tolerance.value_or(r.number("tolerance", 1e-12));
  gopt.max_iterations = r.integer("max_iterations", 200);
  if (gopt.max_iterations < 1) throw ConfigError("max_iterations must be positive");
  r.finish();
  if (betas.empty()) throw ConfigError("empty temperature grid: give betas or temperatures");
  for (double b : betas)
    if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("betas must be positive and finite");
  std::sort(betas.begin(), betas.end(), std::greater<>());
  const std::size_t before = betas.size();
  betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
  if (betas.size() != before)
    std::cerr << "warning: removed " << (before - betas.size()) << " duplicate temperature grid point(s)\n";

  prepare_out(o);
  const auto points = parallel_map(betas.size(), o.workers, [&](std::size_t i) {
    return critical_current_curve(lambda, eps, t_c, {betas[i]}, gopt).front();
  });
  Provenance prov{"gap", config_hash("gap", config), {"tolerance " + num(gopt.tolerance)}};
  CsvFile csv(o, "gap_curve.csv", prov, "T,beta,delta,bold_delta,E_J");
  json sols = json::array();
  bool all_converged = true;
  for (const CriticalCurvePoint& p : points) {
    csv.row({num(p.temperature), num(p.beta), num(p.delta), num(p.bold_delta), num(p.e_j)});
    json s = to_json(p.solution);
    s["beta"] = p.beta;
    sols.push_back(s);
    all_converged = all_converged && p.solution.converged;
  }
  const std::string path = csv.close();
  write_json(o, "gap_solutions.json", {{"config_fnv1a64", prov.config_hash}, {"solutions", sols}});
  log_of(o) << "gap: " << points.size() << " points, bold_delta(T=" << num(points.front().temperature)
            << ")=" << num(points.front().bold_delta) << ", wrote " << path << "\n";
  if (!all_converged) {
    std::cerr << "error: gap solver did not converge at every grid point\n";
    return kSolverFailure;
  }
  return kOk;
}

int cmd_converge(const json& config, const RunOptions& o) {
  ConfigReader r(config, "");
  ModelParams p;
  p.epsilon = r.number("epsilon", 0.0);
  p.t_c = r.number("t_c", 1.0);
  p.beta = r.number("beta", 2.0);
  p.mu = r.number("mu", 0.0);
  const std::vector<int> n_list = even_list(r, "n_list", {64, 128, 256, 512, 1024, 2048, 4096});
  const FluctuationWord word = read_word(r, "word", FluctuationWord{{{0.0, 1, 0}, {0.0, 0, 1}}});
  ConfigReader wr = r.object("w");
  const int w_m = wr.integer("m", 1);
  const double w_t = wr.number("t", 1.0);
  wr.finish();
  ConfigReader er = r.object("evolution");
  const int ev_m = er.integer("m", 1);
  const double ev_t = er.number("t", 1.0);
  er.finish();
  GapOptions gopt;
  gopt.tolerance = o.tolerance.value_or(r.number("tolerance", 1e-12));
  r.finish();
  try {
    p.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }

  const GapSolution gap = solve_gap(p.epsilon, p.t_c, p.beta, gopt);
  if (!gap.converged) {
    std::cerr << "error: gap solver did not converge\n";
    return kSolverFailure;
  }
  if (!(gap.c > 0.0)) throw NormalPhaseError("converge needs the superconducting phase; parameters give c = 0");

  struct Row {
    complex f, w, u;
    double sz_per_spin;
  };
  prepare_out(o);
  const auto rows = parallel_map(n_list.size(), o.workers, [&](std::size_t i) {
    const SectorTable table = boltzmann_table(p, n_list[i]);
    return Row{correlation_finite_n(table, word, gap), w_expectation(table, p, w_m, w_t),
               single_layer_evolution_element(table, p, ev_m, ev_m, ev_t, gap), magnetization_per_spin(table)};
  });
  const complex limit = mesoscopic_prediction(word).value;
  const complex u_limit = std::polar(1.0, -2.0 * p.mu * ev_t * ev_m);

  Provenance prov{"converge", config_hash("converge", config), {gap_line("layer", gap), "word " + to_json(word).dump()}};
  CsvFile fc(o, "converge.csv", prov, "N,re,im,abs_err");
  CsvFile wc(o, "w_expectation.csv", prov, "N,re,im,abs_err");
  CsvFile uc(o, "evolution.csv", prov, "N,re,im,abs_err");
  std::vector<double> xs, ys;
  json sz = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double n = n_list[i];
    const double ef = std::abs(rows[i].f - limit);
    fc.row({std::to_string(n_list[i]), num(rows[i].f.real()), num(rows[i].f.imag()), num(ef)});
    wc.row({std::to_string(n_list[i]), num(rows[i].w.real()), num(rows[i].w.imag()), num(std::abs(rows[i].w - 1.0))});
    uc.row({std::to_string(n_list[i]), num(rows[i].u.real()), num(rows[i].u.imag()), num(std::abs(rows[i].u - u_limit))});
    sz.push_back({{"N", n_list[i]}, {"sz_per_spin", rows[i].sz_per_spin}});
    if (ef > 0.0) {
      xs.push_back(n);
      ys.push_back(ef);
    }
  }
  json fit = {{"config_fnv1a64", prov.config_hash},
              {"word", to_json(word)},
              {"limit", {limit.real(), limit.imag()}},
              {"gap", to_json(gap)},
              {"w", {{"m", w_m}, {"t", w_t}}},
              {"evolution", {{"m", ev_m}, {"t", ev_t}, {"limit", {u_limit.real(), u_limit.imag()}}}},
              {"magnetization", sz}};
  if (xs.size() >= 4) {
    const PowerLawFit pf = fit_power_law(xs, ys);
    fit["exponent"] = pf.exponent;
    fit["fit_residual"] = pf.rms_residual;
    fit["fit_points"] = pf.points;
  } else {
    fit["exponent"] = nullptr;
  }
  const std::string path = fc.close();
  wc.close();
  uc.close();
  write_json(o, "converge_fit.json", fit);
  log_of(o) << "converge: " << n_list.size() << " sizes, exponent "
            << (fit["exponent"].is_null() ? std::string("n/a") : num(fit["exponent"].get<double>())) << ", wrote "
            << path << "\n";
  return kOk;
}

int cmd_circle(const json& config, const RunOptions& o) {
  ConfigReader r(config, "");
  CircuitParams cp;
  cp.e_c = r.number("e_c", 1.0);
  cp.e_j = r.number("e_j", 0.1);
  cp.n_g = r.number("n_g", 0.0);
  ChargeBasisTruncation tr;
  tr.n_max = r.integer("n_max", 16);
  tr.charge_offset = r.number("charge_offset", 0.0);
  const int levels = r.integer("levels", 4);
  ConfigReader dr = r.object("dispersion");
  const double g0 = dr.number("n_g_min", 0.0), g1 = dr.number("n_g_max", 1.0);
  const int gcount = dr.integer("count", 21);
  dr.finish();
  ConfigReader jr = r.object("current");
  const double width = jr.number("width", 0.05);
  const int pcount = jr.integer("count", 17);
  // The packet needs width * n_max >= 6; by default the current table gets its own grid.
  const int current_n_max = jr.integer("n_max", std::max(16, static_cast<int>(std::ceil(6.0 / std::max(width, 1e-6)))));
  jr.finish();
  const double tol = o.tolerance.value_or(r.number("tolerance", 1e-10));
  r.finish();
  try {
    cp.validate();
    tr.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (levels < 1 || levels > tr.dimension()) throw ConfigError("levels must be in [1, 2 n_max + 1]");
  if (gcount < 1 || pcount < 1) throw ConfigError("grid counts must be positive");

  prepare_out(o);
  Provenance prov{"circle", config_hash("circle", config), {"truncation_tolerance " + num(tol)}};
  bool converged = true;

  const Spectrum sp = spectrum(cp, tr, levels, tol);
  converged = converged && sp.converged;
  CsvFile sc(o, "circle_spectrum.csv", prov, "index,energy");
  for (int i = 0; i < levels; ++i) sc.row({std::to_string(i), num(sp.energies[i])});
  const std::string spath = sc.close();

  std::string header = "n_g";
  for (int i = 0; i < levels; ++i) header += ",E" + std::to_string(i);
  const auto disp = parallel_map(gcount, o.workers, [&](std::size_t i) {
    CircuitParams q = cp;
    q.n_g = gcount == 1 ? g0 : g0 + (g1 - g0) * double(i) / (gcount - 1);
    return std::make_pair(q.n_g, spectrum(q, tr, levels, tol));
  });
  CsvFile dc(o, "circle_dispersion.csv", prov, header);
  for (const auto& [ng, s] : disp) {
    std::vector<std::string> cells{num(ng)};
    for (double e : s.energies) cells.push_back(num(e));
    dc.row(cells);
    converged = converged && s.converged;
  }
  dc.close();

  CsvFile jc(o, "circle_current.csv", prov, "phi_bar,current,e_j_sin_phi_bar");
  for (int i = 0; i < pcount; ++i) {
    const double phi = pcount == 1 ? 0.0 : -M_PI + 2.0 * M_PI * i / (pcount - 1);
    const CircleState st = phase_peaked_state({current_n_max, tr.charge_offset}, phi, width);
    jc.row({num(phi), num(josephson_current(cp, st)), num(cp.e_j * std::sin(phi))});
  }
  jc.close();
  log_of(o) << "circle: E1-E0=" << (levels > 1 ? num(sp.energies[1] - sp.energies[0]) : std::string("n/a"))
            << ", wrote " << spath << "\n";
  if (!converged) {
    std::cerr << "error: spectrum not converged under n_max doubling (max shift " << num(sp.max_shift) << ")\n";
    return kTruncationFailure;
  }
  return kOk;
}

namespace {

std::vector<std::pair<ChargePair, ChargePair>> read_elements(ConfigReader& r, const std::string& key,
                                                             const std::vector<std::pair<ChargePair, ChargePair>>& fallback) {
  const json v = r.raw(key);
  if (v.is_null()) return fallback;
  if (!v.is_array() || v.empty()) throw ConfigError(key + " must be a non-empty array of [nL, nR, nLp, nRp]");
  std::vector<std::pair<ChargePair, ChargePair>> out;
  for (const json& e : v) {
    if (!e.is_array() || e.size() != 4) throw ConfigError(key + " entries must be [nL, nR, nLp, nRp]");
    for (const json& x : e)
      if (!x.is_number_integer()) throw ConfigError(key + " entries must be integers");
    out.push_back({{e[0].get<int>(), e[1].get<int>()}, {e[2].get<int>(), e[3].get<int>()}});
  }
  return out;
}

}  // namespace

int cmd_junction(const json& config, const RunOptions& o) {
  ConfigReader r(config, "");
  JunctionParams jp;
  jp.beta = r.number("beta", 5.0);
  jp.left = read_layer(r.object("left"), jp.beta);
  jp.right = read_layer(r.object("right"), jp.beta);
  jp.lambda = r.number("lambda", 1.0);
  jp.e_c = r.number("e_c", 1.0);
  jp.n_g = r.number("n_g", 0.25);
  if (r.has("delta_left")) jp.delta_left = r.number("delta_left");
  if (r.has("delta_right")) jp.delta_right = r.number("delta_right");
  const std::vector<int> n_list = even_list(r, "n_list", {4, 8, 12, 16});
  const double t = r.number("t", 0.3);
  const int n_max = r.integer("n_max", 24);
  const std::vector<std::pair<ChargePair, ChargePair>> defaults{{{0, 0}, {1, -1}}, {{0, 0}, {0, 0}}, {{0, 0}, {1, 0}}};
  const auto elements = read_elements(r, "elements", defaults);
  ConfigReader dr = r.object("dyson");
  const bool dyson_enabled = dr.boolean("enabled", true);
  std::vector<int> orders = dr.integers("orders");
  if (orders.empty()) orders = {0, 1, 2, 3, 4};
  const std::vector<int> dyson_n = even_list(dr, "n_list", {4, 8});
  const auto dyson_elements = read_elements(dr, "elements", elements);
  dr.finish();
  DysonOptions dopt;
  dopt.tolerance = o.tolerance.value_or(r.number("tolerance", 1e-10));
  r.finish();
  for (int k : orders)
    if (k < 0) throw ConfigError("dyson.orders must be non-negative");
  try {
    jp.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }

  prepare_out(o);
  const auto reports = meso_compare(jp, {}, elements, t, n_max);  // circle side only
  const auto finite = parallel_map(n_list.size(), o.workers, [&](std::size_t i) {
    const JunctionModel model(jp, n_list[i]);
    std::vector<complex> values;
    for (const auto& [in, out] : elements) values.push_back(model.evolution_element(in, out, t));
    return std::make_tuple(values, model.left_gap(), model.right_gap());
  });
  const GapSolution gl = std::get<1>(finite.front()), gr = std::get<2>(finite.front());
  std::vector<std::string> extra{gap_line("left", gl), gap_line("right", gr),
                                 "delta_override " + std::string(jp.delta_left || jp.delta_right ? "yes" : "no")};
  Provenance prov{"junction", config_hash("junction", config), extra};

  bool meso_ok = true;
  json manifest_elements = json::array();
  std::vector<std::vector<double>> errs(elements.size());
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    CsvFile c(o, "junction_N" + std::to_string(n_list[k]) + ".csv", prov, "nL,nR,nLp,nRp,t,re,im,abs_err_vs_meso");
    for (std::size_t e = 0; e < elements.size(); ++e) {
      const complex v = std::get<0>(finite[k])[e];
      const double err = std::abs(v - reports[e].meso);
      errs[e].push_back(err);
      const auto& [in, out] = elements[e];
      c.row({std::to_string(in.left), std::to_string(in.right), std::to_string(out.left), std::to_string(out.right),
             num(t), num(v.real()), num(v.imag()), num(err)});
    }
    c.close();
  }
  for (std::size_t e = 0; e < elements.size(); ++e) {
    bool monotone = true;
    for (std::size_t i = 2; i < errs[e].size(); ++i) monotone = monotone && errs[e][i] <= errs[e][i - 1];
    meso_ok = meso_ok && reports[e].meso_converged;
    manifest_elements.push_back({{"in", {elements[e].first.left, elements[e].first.right}},
                                 {"out", {elements[e].second.left, elements[e].second.right}},
                                 {"meso", {reports[e].meso.real(), reports[e].meso.imag()}},
                                 {"meso_truncation_converged", reports[e].meso_converged},
                                 {"abs_errors", errs[e]},
                                 {"monotone_after_first", monotone}});
  }

  json dyson_json = json::array();
  bool quad_ok = true;
  if (dyson_enabled) {
    std::vector<std::pair<int, int>> jobs;
    for (int n : dyson_n)
      for (int k : orders) jobs.push_back({n, k});
    const auto dys = parallel_map(jobs.size(), o.workers, [&](std::size_t i) {
      return dyson_junction(jp, jobs[i].first, t, jobs[i].second, dyson_elements, dopt);
    });
    CsvFile c(o, "junction_dyson.csv", prov,
              "N,K,t,nL,nR,nLp,nRp,re_exact,im_exact,re_dyson,im_dyson,normalized_error,bound");
    for (const JunctionDysonReport& rep : dys) {
      for (const JunctionDysonElement& e : rep.elements)
        c.row({std::to_string(rep.n_spins), std::to_string(rep.order), num(t), std::to_string(e.in.left),
               std::to_string(e.in.right), std::to_string(e.out.left), std::to_string(e.out.right), num(e.exact.real()),
               num(e.exact.imag()), num(e.dyson.real()), num(e.dyson.imag()), num(e.normalized_error), num(rep.bound)});
      dyson_json.push_back({{"N", rep.n_spins},
                            {"K", rep.order},
                            {"max_normalized_error", rep.max_normalized_error},
                            {"bound", rep.bound},
                            {"within_bound", rep.max_normalized_error <= rep.bound},
                            {"quadrature_converged", rep.converged}});
      quad_ok = quad_ok && rep.converged;
    }
    c.close();
  }
  write_json(o, "junction_manifest.json",
             {{"config_fnv1a64", prov.config_hash},
              {"params", to_json(jp)},
              {"gap_left", to_json(gl)},
              {"gap_right", to_json(gr)},
              {"delta_override", bool(jp.delta_left || jp.delta_right)},
              {"josephson_energy", josephson_energy(jp.lambda, gl.c, gr.c)},
              {"t", t},
              {"n_list", n_list},
              {"elements", manifest_elements},
              {"dyson", dyson_json}});
  log_of(o) << "junction: " << n_list.size() << " sizes, " << elements.size() << " elements, wrote "
            << o.out_dir << "\n";
  if (!meso_ok) {
    std::cerr << "error: circle comparator not converged under truncation doubling\n";
    return kTruncationFailure;
  }
  if (!quad_ok) {
    std::cerr << "error: Dyson quadrature did not converge\n";
    return kNumericalFailure;
  }
  return kOk;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Finite-N quasi-spin BCS fluctuations and their mesoscopic circle limit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  struct Common {
    std::string config, out = ".";
    int workers = 1;
    std::optional<double> tol;
    std::vector<std::string> sets;
  };
  std::map<std::string, Common> common;
  auto add_common = [&](CLI::App* sub) {
    Common& c = common[sub->get_name()];
    sub->add_option("--config", c.config, "JSON configuration file");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tol", c.tol, "tolerance override");
    sub->add_option("--set", c.sets, "override a scalar config field, key=value")->take_all();
  };
  for (const char* name : {"gap", "converge", "circle", "junction"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " study");
    add_common(sub);
  }
  CLI::App* st = app.add_subcommand("selftest", "run the small-N oracle suites");
  std::optional<double> st_tol;
  std::string fault;
  st->add_option("--tol", st_tol, "oracle tolerance");
  st->add_option("--fault", fault, "inject a known defect (testing only)")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (st->parsed()) {
      SelftestOptions so;
      if (st_tol) so.tolerance = *st_tol;
      if (fault == "multiplicity") {
        so.multiplicity = [](int n, HalfInteger s) { return multiplicity(n, s) + (s.twice() == 0 ? 1 : 0); };
      } else if (!fault.empty()) {
        std::cerr << "error: unknown fault '" << fault << "'\n";
        return kConfigError;
      }
      return cmd_selftest(so);
    }
    for (const auto& [name, c] : common) {
      if (!app.got_subcommand(name)) continue;
      json config = c.config.empty() ? json::object() : load_config(c.config);
      for (const std::string& s : c.sets) apply_override(config, s);
      RunOptions ro;
      ro.out_dir = c.out;
      ro.workers = c.workers;
      ro.tolerance = c.tol;
      if (name == "gap") return cmd_gap(config, ro);
      if (name == "converge") return cmd_converge(config, ro);
      if (name == "circle") return cmd_circle(config, ro);
      if (name == "junction") return cmd_junction(config, ro);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ResolutionError& e) {
    std::cerr << "truncation error: " << e.what() << "\n";
    return kTruncationFailure;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kConfigError;
}

}  // namespace qfluct::cli
