#include "chronon/serialize.hpp"

#include <cmath>

namespace chronon {

using nlohmann::json;

namespace {

double require_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    return j.get<double>();
}

const json& require_field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(path + "." + key + ": missing field");
    return j.at(key);
}

}  // namespace

json matrix_to_json(const CMatrix& m) {
    json data = json::array();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            data.push_back({m(i, j).real(), m(i, j).imag()});
    return json{{"dim", m.rows()}, {"data", data}};
}

CMatrix matrix_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected {dim, data}");
    const json& jd = require_field(j, "dim", path);
    if (!jd.is_number_integer() || jd.get<int>() < 1)
        throw ConfigError(path + ".dim: expected a positive integer");
    const int dim = jd.get<int>();
    const json& data = require_field(j, "data", path);
    if (!data.is_array() || data.size() != static_cast<size_t>(dim) * dim)
        throw ConfigError(path + ".data: expected " + std::to_string(dim * dim) +
                          " [re, im] pairs (row-major)");
    CMatrix m(dim, dim);
    for (size_t k = 0; k < data.size(); ++k) {
        const json& cell = data[k];
        const std::string cp = path + ".data[" + std::to_string(k) + "]";
        if (!cell.is_array() || cell.size() != 2) throw ConfigError(cp + ": expected [re, im] pair");
        m(static_cast<int>(k) / dim, static_cast<int>(k) % dim) =
            cplx(require_number(cell[0], cp + "[0]"), require_number(cell[1], cp + "[1]"));
    }
    return m;
}

json intensity_to_json(const IntensityProfile& p) {
    if (p.kind() == IntensityProfile::Kind::constant)
        return json{{"kind", "constant"}, {"value", p.nu_min()}};
    return json{{"kind", "tabulated"}, {"x", p.knots()}, {"values", p.knot_values()}};
}

IntensityProfile intensity_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an intensity object");
    const std::string kind = require_field(j, "kind", path).get<std::string>();
    try {
        if (kind == "constant")
            return IntensityProfile::constant(require_number(require_field(j, "value", path), path + ".value"));
        if (kind == "tabulated") {
            const json& jx = require_field(j, "x", path);
            const json& jv = require_field(j, "values", path);
            if (!jx.is_array() || !jv.is_array())
                throw ConfigError(path + ": x and values must be arrays");
            return IntensityProfile::tabulated(jx.get<std::vector<double>>(),
                                               jv.get<std::vector<double>>());
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    throw ConfigError(path + ".kind: expected constant or tabulated");
}

HamiltonianSchedule schedule_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected a schedule object");
    const std::string kind = require_field(j, "kind", path).get<std::string>();
    try {
        if (kind == "constant") return HamiltonianSchedule::constant(matrix_from_json(require_field(j, "h0", path), path + ".h0"));
        if (kind == "harmonic") {
            const double omega = require_number(require_field(j, "omega", path), path + ".omega");
            return HamiltonianSchedule::harmonic(
                matrix_from_json(require_field(j, "h0", path), path + ".h0"),
                matrix_from_json(require_field(j, "h1", path), path + ".h1"), omega);
        }
        if (kind == "separable")
            return HamiltonianSchedule::separable(
                matrix_from_json(require_field(j, "h", path), path + ".h"),
                intensity_from_json(require_field(j, "intensity", path), path + ".intensity"));
        if (kind == "piecewise_constant") {
            const json& pieces = require_field(j, "pieces", path);
            if (!pieces.is_array() || pieces.empty())
                throw ConfigError(path + ".pieces: expected a non-empty array");
            std::vector<std::pair<double, CMatrix>> ps;
            for (size_t i = 0; i < pieces.size(); ++i) {
                const std::string pp = path + ".pieces[" + std::to_string(i) + "]";
                const double until = require_number(require_field(pieces[i], "until", pp), pp + ".until");
                ps.emplace_back(until, matrix_from_json(require_field(pieces[i], "h", pp), pp + ".h"));
            }
            return HamiltonianSchedule::piecewise_constant(std::move(ps));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    throw ConfigError(path + ".kind: expected constant, harmonic, separable or piecewise_constant");
}

json chain_to_json(const Chain& c) { return json(c.times()); }

Chain chain_from_json(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array of times");
    try {
        return Chain(j.get<std::vector<double>>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

json estimate_to_json(const PropagatorEstimate& e) {
    json j{{"method", method_name(e.method)}};
    json data = json::array();
    for (int i = 0; i < e.matrix.rows(); ++i)
        for (int c = 0; c < e.matrix.cols(); ++c)
            data.push_back({e.matrix(i, c).real(), e.matrix(i, c).imag()});
    j["matrix"] = data;
    if (e.truncation_order) j["order"] = *e.truncation_order;
    if (e.mc_samples) j["samples"] = *e.mc_samples;
    if (e.mc_stderr) j["stderr"] = *e.mc_stderr;
    if (e.seed) j["seed"] = *e.seed;
    return j;
}

PropagatorEstimate estimate_from_json(const json& j, const std::string& path) {
    PropagatorEstimate e;
    const std::string m = require_field(j, "method", path).get<std::string>();
    if (m == "reference") e.method = PropagatorMethod::reference;
    else if (m == "dyson") e.method = PropagatorMethod::dyson;
    else if (m == "picard") e.method = PropagatorMethod::picard;
    else if (m == "poisson_mc") e.method = PropagatorMethod::poisson_mc;
    else throw ConfigError(path + ".method: unknown method " + m);

    const json& data = require_field(j, "matrix", path);
    if (!data.is_array()) throw ConfigError(path + ".matrix: expected an array");
    const int dim = static_cast<int>(std::lround(std::sqrt(double(data.size()))));
    if (static_cast<size_t>(dim) * dim != data.size())
        throw ConfigError(path + ".matrix: length is not a perfect square");
    e.matrix = CMatrix(dim, dim);
    for (size_t k = 0; k < data.size(); ++k) {
        const json& cell = data[k];
        const std::string cp = path + ".matrix[" + std::to_string(k) + "]";
        if (!cell.is_array() || cell.size() != 2) throw ConfigError(cp + ": expected [re, im] pair");
        e.matrix(static_cast<int>(k) / dim, static_cast<int>(k) % dim) =
            cplx(require_number(cell[0], cp), require_number(cell[1], cp));
    }
    if (j.contains("order")) e.truncation_order = j.at("order").get<int>();
    if (j.contains("samples")) e.mc_samples = j.at("samples").get<long long>();
    if (j.contains("stderr")) e.mc_stderr = j.at("stderr").get<double>();
    if (j.contains("seed")) e.seed = j.at("seed").get<std::uint64_t>();
    return e;
}

}  // namespace chronon
