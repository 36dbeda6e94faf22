#pragma once

// Model document format: a JSON object with top-level keys
//   horizon, stationary, states, controls, observations, dynamics, obs0,
//   obs, cost, final_cost, admissible, and optionally initial_belief and
//   structure.
// Rationals are strings "p/q" (or integer literals); "+inf" costs are the
// string "inf". Canonical serialization sorts keys lexicographically and
// emits reduced fractions, so parse ∘ serialize is the identity on valid
// models.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "detpomdp/errors.hpp"
#include "detpomdp/model.hpp"

namespace detpomdp {

namespace detail {

inline std::pair<int, int> line_col_of_offset(std::string_view text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline const nlohmann::json& require_field(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
    return *it;
}

// Rational from a JSON value that is either an integer or a "p/q" string.
// Malformed literals become a pending validation error at `path`.
inline Rational json_rational(const nlohmann::json& v, const std::string& path,
                              std::vector<ValidationIssue>& pending) {
    try {
        if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
        if (v.is_string()) {
            const auto& s = v.get_ref<const std::string&>();
            Rational r = Rational::parse(s);
            // The canonical form never writes a negative denominator; a
            // source literal like "1/-2" is reported, not silently accepted.
            if (s.find("/-") != std::string::npos) {
                pending.push_back({ValidationIssue::Severity::error, path,
                                   "malformed rational literal '" + s + "'"});
                return Rational::zero();
            }
            return r;
        }
    } catch (const Error& e) {
        pending.push_back({ValidationIssue::Severity::error, path, e.what()});
        return Rational::zero();
    }
    pending.push_back(
        {ValidationIssue::Severity::error, path, "expected a rational (integer or \"p/q\")"});
    return Rational::zero();
}

inline ExtendedValue json_cost(const nlohmann::json& v, const std::string& path,
                               std::vector<ValidationIssue>& pending) {
    if (v.is_string() && v.get_ref<const std::string&>() == "inf")
        return ExtendedValue::infinity();
    return ExtendedValue(json_rational(v, path, pending));
}

}  // namespace detail

inline std::string serialize_model(const DetPomdpModel& m) {
    using nlohmann::json;
    json j;
    j["horizon"] = m.horizon;
    j["stationary"] = m.stationary;
    j["states"] = m.states;
    j["controls"] = m.controls;
    j["observations"] = m.observations;

    json dyn = json::array();
    for (const auto& slice : m.dynamics) dyn.push_back(slice);
    j["dynamics"] = std::move(dyn);

    j["obs0"] = m.obs0;
    json ob = json::array();
    for (const auto& slice : m.obs) ob.push_back(slice);
    j["obs"] = std::move(ob);

    json cost = json::array();
    for (const auto& slice : m.cost) {
        json rows = json::array();
        for (const auto& row : slice) {
            json cells = json::array();
            for (const auto& c : row) cells.push_back(c.str());
            rows.push_back(std::move(cells));
        }
        cost.push_back(std::move(rows));
    }
    j["cost"] = std::move(cost);

    json fin = json::array();
    for (const auto& c : m.final_cost) fin.push_back(c.str());
    j["final_cost"] = std::move(fin);

    json adm = json::array();
    for (const auto& slice : m.admissible) adm.push_back(slice);
    j["admissible"] = std::move(adm);

    if (m.initial_belief) {
        json b = json::object();
        for (const auto& [label, w] : *m.initial_belief) b[label] = w.str();
        j["initial_belief"] = std::move(b);
    }
    if (m.structure) {
        json st;
        st["kind"] = m.structure->kind == StructureAnnotation::Kind::affine ? "affine" : "product";
        json g = json::array();
        for (const auto& row : m.structure->g) g.push_back(row);
        st["g"] = std::move(g);
        j["structure"] = std::move(st);
    }
    return j.dump(2) + "\n";
}

inline DetPomdpModel parse_model(std::string_view text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = detail::line_col_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(std::string("model document is not valid JSON: ") + e.what(), line, col);
    }
    if (!j.is_object()) throw ParseError("model document must be a JSON object");

    DetPomdpModel m;
    try {
        m.horizon = detail::require_field(j, "horizon").get<std::int32_t>();
        m.stationary = detail::require_field(j, "stationary").get<bool>();
        m.states = detail::require_field(j, "states").get<std::vector<std::string>>();
        m.controls = detail::require_field(j, "controls").get<std::vector<std::string>>();
        m.observations = detail::require_field(j, "observations").get<std::vector<std::string>>();
        m.dynamics = detail::require_field(j, "dynamics")
                         .get<std::vector<std::vector<std::vector<StateIndex>>>>();
        m.obs0 = detail::require_field(j, "obs0").get<std::vector<ObsIndex>>();
        m.obs = detail::require_field(j, "obs")
                    .get<std::vector<std::vector<std::vector<ObsIndex>>>>();
        m.admissible = detail::require_field(j, "admissible")
                           .get<std::vector<std::vector<std::vector<ControlIndex>>>>();

        const auto& cost = detail::require_field(j, "cost");
        if (!cost.is_array()) throw ParseError("field 'cost' must be an array of time slices");
        m.cost.resize(cost.size());
        for (std::size_t t = 0; t < cost.size(); ++t) {
            const auto& rows = cost[t];
            if (!rows.is_array()) throw ParseError("cost slice must be an array");
            m.cost[t].resize(rows.size());
            for (std::size_t x = 0; x < rows.size(); ++x) {
                const auto& cells = rows[x];
                if (!cells.is_array()) throw ParseError("cost row must be an array");
                m.cost[t][x].reserve(cells.size());
                for (std::size_t u = 0; u < cells.size(); ++u) {
                    m.cost[t][x].push_back(
                        detail::json_cost(cells[u], detail::idx3("cost", t, x, u),
                                          m.pending_issues));
                }
            }
        }

        const auto& fin = detail::require_field(j, "final_cost");
        if (!fin.is_array()) throw ParseError("field 'final_cost' must be an array");
        for (std::size_t x = 0; x < fin.size(); ++x) {
            m.final_cost.push_back(detail::json_cost(
                fin[x], "final_cost[" + std::to_string(x) + "]", m.pending_issues));
        }

        if (auto it = j.find("initial_belief"); it != j.end()) {
            if (!it->is_object()) throw ParseError("field 'initial_belief' must be an object");
            std::map<std::string, Rational> b;
            for (auto kv = it->begin(); kv != it->end(); ++kv) {
                b[kv.key()] = detail::json_rational(
                    kv.value(), "initial_belief[" + kv.key() + "]", m.pending_issues);
            }
            m.initial_belief = std::move(b);
        }

        if (auto it = j.find("structure"); it != j.end()) {
            StructureAnnotation st;
            const std::string kind = detail::require_field(*it, "kind").get<std::string>();
            if (kind == "affine") {
                st.kind = StructureAnnotation::Kind::affine;
            } else if (kind == "product") {
                st.kind = StructureAnnotation::Kind::product;
            } else {
                throw ParseError("structure.kind must be 'affine' or 'product'");
            }
            st.g = detail::require_field(*it, "g")
                       .get<std::vector<std::vector<std::int64_t>>>();
            m.structure = std::move(st);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("model document has a field of the wrong type: ") +
                         e.what());
    }
    return m;
}

inline bool models_equal(const DetPomdpModel& a, const DetPomdpModel& b) {
    return a.horizon == b.horizon && a.stationary == b.stationary && a.states == b.states &&
           a.controls == b.controls && a.observations == b.observations &&
           a.dynamics == b.dynamics && a.obs0 == b.obs0 && a.obs == b.obs && a.cost == b.cost &&
           a.final_cost == b.final_cost && a.admissible == b.admissible &&
           a.initial_belief == b.initial_belief &&
           a.structure.has_value() == b.structure.has_value() &&
           (!a.structure || (a.structure->kind == b.structure->kind &&
                             a.structure->g == b.structure->g));
}

}  // namespace detpomdp
