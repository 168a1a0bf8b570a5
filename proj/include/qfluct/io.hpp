#pragma once

#include <json.hpp>

#include "qfluct/circle.hpp"
#include "qfluct/correlators.hpp"
#include "qfluct/gap.hpp"
#include "qfluct/junction.hpp"
#include "qfluct/sectors.hpp"

namespace qfluct {

using json = nlohmann::json;

json to_json(const SectorTable& table);
json to_json(const GapSolution& sol);
json to_json(const ModelParams& params);
json to_json(const JunctionParams& params);
json to_json(const FluctuationWord& word);
/// {"n_max", "charge_offset", "amplitudes": [[re, im], ...]}.
json to_json(const CircleState& state);

/// Accepts [[alpha, n, m], ...] or [{"alpha": a, "n": n, "m": m}, ...].
/// Throws ParameterError on anything else.
FluctuationWord word_from_json(const json& j);

CircleState circle_state_from_json(const json& j);

}  // namespace qfluct
