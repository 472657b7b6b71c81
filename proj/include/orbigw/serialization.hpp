#pragma once

// JSON forms of keys, equations, reports and the persisted memo cache.
// Rendering is deterministic: insertion order of fields is fixed, map
// iteration is rank-ordered, rationals render canonically.

#include <orbigw/chow_ring.hpp>
#include <orbigw/correlator.hpp>
#include <orbigw/geometry_config.hpp>
#include <orbigw/wdvv.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace orbigw {

// Insertions are listed by descending degree (ties by basis order), the same
// order the text form uses.
inline std::vector<int> display_order(const CorrelatorKey& key, const TargetGeometry& t) {
    std::vector<int> order = key.insertions;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (t.cr_degree(a) != t.cr_degree(b)) return t.cr_degree(a) > t.cr_degree(b);
        return a < b;
    });
    return order;
}

inline Json key_to_json(const CorrelatorKey& key, const TargetGeometry& t) {
    Json j;
    j["insertions"] = Json::array();
    for (int i : display_order(key, t)) j["insertions"].push_back(t.class_name(i));
    j["degree_steps"] = key.degree.steps;
    return j;
}

inline CorrelatorKey key_from_json(const Json& j, const TargetGeometry& t) {
    std::vector<int> ins;
    for (const Json& name : j.at("insertions")) ins.push_back(t.class_index(name.get<std::string>()));
    return CorrelatorKey(std::move(ins), DegreeSteps{j.at("degree_steps").get<int>()});
}

inline Json equation_to_json(const WdvvEquation& eq, const TargetGeometry& t) {
    Json j;
    Json quad = Json::array();
    for (int i : eq.context.quadruple) quad.push_back(t.class_name(i));
    Json extras = Json::array();
    for (int i : eq.context.extras) extras.push_back(t.class_name(i));
    j["context"] = {{"quadruple", quad}, {"extras", extras}, {"degree_steps", eq.context.degree.steps}};
    j["terms"] = Json::array();
    for (const auto& [key, coeff] : eq.terms)
        j["terms"].push_back({{"coeff", coeff.str()}, {"key", key_to_json(key, t)}});
    if (!eq.constant.is_zero()) j["constant"] = eq.constant.str();
    return j;
}

// The audit report is a JSON array of violations; empty on success.
inline Json audit_report_to_json(const AuditReport& report, const TargetGeometry& t) {
    Json arr = Json::array();
    for (const AuditViolation& v : report.violations) {
        Json item = equation_to_json(v.equation, t);
        item["residual"] = v.residual.str();
        arr.push_back(std::move(item));
    }
    return arr;
}

inline Json presentation_report_to_json(const PresentationReport& report) {
    Json j;
    j["pass"] = report.ok();
    j["checks"] = Json::array();
    for (const CheckResult& c : report.checks)
        j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return j;
}

// ---- memo cache (schema 1) ----

inline Json table_to_json(const InvariantTable& table, const TargetGeometry& t) {
    Json j;
    j["schema"] = 1;
    j["target"] = t.name();
    j["entries"] = Json::array();
    for (const auto& [key, entry] : table) {
        Json e = key_to_json(key, t);
        e["value"] = entry.value.str();
        e["provenance"] = provenance_name(entry.prov);
        j["entries"].push_back(std::move(e));
    }
    return j;
}

// Restores a cache on top of the target's seeds. Every entry is validated:
// names must resolve, nonzero values must pass the selection rule, and a
// value conflicting with a seed or a duplicate entry is fatal.
inline InvariantTable table_from_json(const Json& j, const TargetGeometry& t) {
    if (!j.is_object()) throw config_error("cache: expected a JSON object");
    detail::reject_unknown_fields(j, {"schema", "target", "entries"}, "cache");
    if (j.contains("schema") && j.at("schema").get<int>() != 1)
        throw config_error("cache: unsupported schema version");
    if (j.contains("target") && j.at("target").get<std::string>() != t.name())
        throw config_error("cache: built for target \"" + j.at("target").get<std::string>() +
                           "\", not \"" + t.name() + "\"");
    InvariantTable table = make_table(t);
    if (!j.contains("entries")) return table;
    for (const Json& e : j.at("entries")) {
        detail::reject_unknown_fields(e, {"insertions", "degree_steps", "value", "provenance"},
                                      "cache entry");
        const CorrelatorKey key = key_from_json(e, t);
        const Rational value = Rational::parse(e.at("value").get<std::string>());
        const Provenance prov = e.contains("provenance")
                                    ? provenance_from_name(e.at("provenance").get<std::string>())
                                    : Provenance::axiom;
        if (!value.is_zero() && !selection_pass(key, t))
            throw config_error("cache entry " + key_to_text(key, t) + " = " + value.str() +
                               " violates the selection rule");
        if (const auto* existing = table.find(key)) {
            if (existing->value != value)
                throw config_error("cache entry " + key_to_text(key, t) + " = " + value.str() +
                                   " conflicts with existing value " + existing->value.str());
            continue;
        }
        table.insert(key, value, prov);
    }
    return table;
}

} // namespace orbigw
