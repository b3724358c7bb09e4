#include "vcone/params_io.hpp"

#include <fstream>
#include <stdexcept>

#include "vcone/cone.hpp"

namespace vcone {

using nlohmann::json;

namespace {

Vector vector_field(const json& j, const char* key)
{
    if (!j.contains(key))
        throw std::invalid_argument(std::string("missing key '") + key + "'");
    const json& a = j.at(key);
    if (!a.is_array() || a.empty())
        throw std::invalid_argument(std::string("'") + key + "' must be a non-empty array");
    Vector v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number())
            throw std::invalid_argument(std::string("'") + key + "' must contain numbers");
        v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    }
    return v;
}

double scalar_field(const json& j, const char* key, double fallback)
{
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number())
        throw std::invalid_argument(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

}  // namespace

ModelParams params_from_json(const json& j)
{
    if (!j.is_object())
        throw std::invalid_argument("parameter file must hold a JSON object");
    Vector w = vector_field(j, "w");
    Vector x = vector_field(j, "x");
    if (w.size() != x.size())
        throw std::invalid_argument("w and x must have the same length");
    require_positive_weights(w);
    require_ordered_nodes(x);

    Vector v0;
    if (j.contains("v0")) {
        v0 = vector_field(j, "v0");
    } else if (j.contains("V0")) {
        v0 = canonical_anchor(w, x, scalar_field(j, "V0", 0.0));
    } else {
        v0 = Vector::Zero(w.size());
    }
    return ModelParams(std::move(w), std::move(x), scalar_field(j, "theta", 0.0), scalar_field(j, "lambda", 0.0),
                       scalar_field(j, "nu", 0.0), std::move(v0));
}

ModelParams load_params(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open parameter file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("cannot parse '" + path + "': " + e.what());
    }
    return params_from_json(j);
}

json vector_to_json(const Vector& v)
{
    return json(to_std(v));
}

json params_to_json(const ModelParams& p)
{
    return {{"w", vector_to_json(p.weights())}, {"x", vector_to_json(p.nodes())}, {"theta", p.theta()},
            {"lambda", p.lambda()},         {"nu", p.nu()},                    {"v0", vector_to_json(p.v0())}};
}

json matrix_to_json(const Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j)
{
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw std::invalid_argument("matrix must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw std::invalid_argument("matrix rows must have equal length");
        for (Eigen::Index k = 0; k < cols; ++k)
            m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

Preset preset(const std::string& name)
{
    if (name == "table1") {
        Vector w(2), x(2), v0(2);
        w << 0.4, 1.8;
        x << 0.1, 3.5;
        v0 << 0.2, 0.3;
        return {ModelParams(w, x, 0.8, 1.2, 0.7, v0), std::nullopt};
    }
    if (name == "fig2") {
        Vector w(2), x(2);
        w << 1.0, 2.0;
        x << 1.0, 10.0;
        return {ModelParams(w, x, 0.02, 0.3, 0.3, canonical_anchor(w, x, 0.02)), std::nullopt};
    }
    if (name == "fig3a" || name == "fig3b" || name == "fig3c") {
        Vector w(3), x(3);
        w << 1.0, 2.0, 3.0;
        x << 1.0, 5.0, 25.0;
        ModelParams p(w, x, 0.02, 0.3, 0.3, canonical_anchor(w, x, 0.02));
        if (name == "fig3a")
            return {p, std::make_pair(1.0, 2.0)};
        if (name == "fig3b")
            return {p, std::make_pair(1.1, 2.5)};
        return {p, std::make_pair(2.0, 2.0)};
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace vcone
