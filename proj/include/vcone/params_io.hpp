#pragma once

#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "vcone/admissible.hpp"

namespace vcone {

/// Reads {"w": [...], "x": [...], "theta", "lambda", "nu", "v0": [...]}.
/// theta, lambda and nu default to 0. When "v0" is absent a scalar "V0"
/// selects v0 = canonical_anchor(w, x, V0); with neither, v0 = 0.
/// Throws std::invalid_argument on malformed or invalid content.
ModelParams params_from_json(const nlohmann::json& j);
ModelParams load_params(const std::string& path);
nlohmann::json params_to_json(const ModelParams& params);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Vector& v);

/// Named parameter sets.
///   table1      N = 2 stochastic-volatility parameters of the PDE study
///   fig2        x = (1, 10), w = (1, 2), lambda = nu = 0.3, V0 = theta = 0.02
///   fig3a/b/c   x = (1, 5, 25), w = (1, 2, 3), otherwise as fig2, with
///               (a, b) = (1, 2), (1.1, 2.5) admissible and (2, 2) not
struct Preset {
    ModelParams params;
    std::optional<std::pair<double, double>> q3;
};

Preset preset(const std::string& name);

}  // namespace vcone
