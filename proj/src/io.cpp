#include "qfluct/io.hpp"

#include "qfluct/errors.hpp"

namespace qfluct {

json to_json(const SectorTable& table) {
  json sectors = json::array();
  for (const Sector& sec : table.sectors()) {
    json rows = json::array();
    for (int i = 0; i < sec.size(); ++i)
      rows.push_back({{"sz", sec.sz(i)}, {"eta", sec.eta[i]}, {"log_rho", sec.log_rho[i]}});
    json js = {{"s", sec.s}, {"rows", rows}};
    if (sec.d != 0)
      js["d"] = sec.d;
    else
      js["log_d"] = sec.log_d;
    sectors.push_back(js);
  }
  return {{"n_spins", table.n_spins()}, {"log_partition", table.log_partition()}, {"sectors", sectors}};
}

json to_json(const GapSolution& sol) {
  return {{"delta", sol.delta},
          {"omega", sol.omega},
          {"c", sol.c},
          {"phase", sol.phase},
          {"converged", sol.converged},
          {"residual", sol.residual},
          {"normal_branch_residual", sol.normal_branch_residual},
          {"iterations", sol.iterations}};
}

json to_json(const ModelParams& p) {
  return {{"epsilon", p.epsilon}, {"t_c", p.t_c}, {"beta", p.beta}, {"mu", p.mu}};
}

json to_json(const JunctionParams& p) {
  json j = {{"left", to_json(p.left_layer())},
            {"right", to_json(p.right_layer())},
            {"lambda", p.lambda},
            {"e_c", p.e_c},
            {"n_g", p.n_g},
            {"beta", p.beta}};
  if (p.delta_left) j["delta_left_override"] = *p.delta_left;
  if (p.delta_right) j["delta_right_override"] = *p.delta_right;
  return j;
}

json to_json(const FluctuationWord& word) {
  json j = json::array();
  for (const WordFactor& f : word.factors) j.push_back({{"alpha", f.alpha}, {"n", f.n}, {"m", f.m}});
  return j;
}

json to_json(const CircleState& state) {
  json amps = json::array();
  for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i)
    amps.push_back({state.amplitudes[i].real(), state.amplitudes[i].imag()});
  return {{"n_max", state.trunc.n_max}, {"charge_offset", state.trunc.charge_offset}, {"amplitudes", amps}};
}

namespace {

int count_field(const json& v) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ParameterError("word exponents must be non-negative integers");
  return v.get<int>();
}

}  // namespace

FluctuationWord word_from_json(const json& j) {
  if (!j.is_array()) throw ParameterError("word must be a JSON array of factors");
  FluctuationWord w;
  for (const json& f : j) {
    WordFactor wf;
    if (f.is_array()) {
      if (f.size() != 3 || !f[0].is_number()) throw ParameterError("word factor must be [alpha, n, m]");
      wf.alpha = f[0].get<double>();
      wf.n = count_field(f[1]);
      wf.m = count_field(f[2]);
    } else if (f.is_object()) {
      for (const auto& [key, _] : f.items())
        if (key != "alpha" && key != "n" && key != "m") throw ParameterError("unknown word factor key: " + key);
      if (f.contains("alpha")) {
        if (!f["alpha"].is_number()) throw ParameterError("alpha must be a number");
        wf.alpha = f["alpha"].get<double>();
      }
      if (f.contains("n")) wf.n = count_field(f["n"]);
      if (f.contains("m")) wf.m = count_field(f["m"]);
    } else {
      throw ParameterError("word factor must be an array or an object");
    }
    w.factors.push_back(wf);
  }
  w.validate();
  return w;
}

CircleState circle_state_from_json(const json& j) {
  try {
    CircleState s;
    s.trunc.n_max = j.at("n_max").get<int>();
    s.trunc.charge_offset = j.value("charge_offset", 0.0);
    s.trunc.validate();
    const json& amps = j.at("amplitudes");
    if (!amps.is_array() || static_cast<int>(amps.size()) != s.trunc.dimension())
      throw ParameterError("amplitude count does not match the truncation");
    s.amplitudes.resize(s.trunc.dimension());
    for (int i = 0; i < s.trunc.dimension(); ++i)
      s.amplitudes[i] = {amps[i].at(0).get<double>(), amps[i].at(1).get<double>()};
    return s;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed circle state: ") + e.what());
  }
}

}  // namespace qfluct
