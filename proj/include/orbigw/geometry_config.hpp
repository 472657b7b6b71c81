#pragma once

// JSON geometry configs and the two built-in targets. The loader is strict:
// unknown fields, unknown rule tags, missing product pairs and malformed
// rationals are all fatal, so a typo cannot silently change a ring.

#include <orbigw/chow_ring.hpp>
#include <orbigw/errors.hpp>

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace orbigw {

using Json = nlohmann::ordered_json;

namespace detail {

inline Rational rational_from_json(const Json& j, const std::string& where) {
    if (j.is_number_integer()) return Rational(static_cast<long long>(j.get<long long>()));
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    throw config_error(where + ": expected an integer or a \"num/den\" string");
}

// Product keys use an interpunct ("h·h"); a plain '*' is accepted too.
inline std::pair<std::string, std::string> split_product_key(const std::string& key) {
    static const std::string dot = "·";
    auto pos = key.find(dot);
    std::size_t seplen = dot.size();
    if (pos == std::string::npos) {
        pos = key.find('*');
        seplen = 1;
    }
    if (pos == std::string::npos)
        throw config_error("product key \"" + key + "\" is not of the form name·name");
    return {key.substr(0, pos), key.substr(pos + seplen)};
}

inline void reject_unknown_fields(const Json& j, const std::vector<std::string>& allowed,
                                  const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw config_error(where + ": unknown field \"" + it.key() + "\"");
}

} // namespace detail

inline TargetGeometry::Data geometry_data_from_json(const Json& j) {
    if (!j.is_object()) throw config_error("geometry config must be a JSON object");
    detail::reject_unknown_fields(j,
                                  {"name", "dim", "degree_step", "c1_per_step", "basis", "pairing",
                                   "products", "seeds", "vanishing_rules", "relations"},
                                  "geometry config");
    for (const char* field : {"name", "dim", "degree_step", "c1_per_step", "basis", "pairing",
                              "products", "seeds", "vanishing_rules"})
        if (!j.contains(field)) throw config_error(std::string("geometry config: missing \"") + field + "\"");

    TargetGeometry::Data d;
    d.name = j.at("name").get<std::string>();
    d.dim = j.at("dim").get<int>();
    d.degree_step = detail::rational_from_json(j.at("degree_step"), "degree_step");
    d.c1_per_step = detail::rational_from_json(j.at("c1_per_step"), "c1_per_step");

    int idx = 0;
    for (const Json& b : j.at("basis")) {
        detail::reject_unknown_fields(b, {"name", "cr_degree", "sector"}, "basis entry");
        BasisClass bc;
        bc.index = idx++;
        bc.name = b.at("name").get<std::string>();
        bc.cr_degree = b.at("cr_degree").get<int>();
        const std::string sector = b.at("sector").get<std::string>();
        if (sector == "untwisted")
            bc.sector = Sector::untwisted;
        else if (sector == "twisted")
            bc.sector = Sector::twisted;
        else
            throw config_error("basis class \"" + bc.name + "\": unknown sector \"" + sector + "\"");
        for (const BasisClass& prev : d.basis)
            if (prev.name == bc.name) throw config_error("duplicate basis name \"" + bc.name + "\"");
        d.basis.push_back(bc);
    }
    const std::size_t n = d.basis.size();
    if (n == 0) throw config_error("geometry config: empty basis");

    auto index_of = [&](const std::string& name, const std::string& where) {
        for (const BasisClass& b : d.basis)
            if (b.name == name) return b.index;
        throw config_error(where + ": unknown class \"" + name + "\"");
    };

    const Json& pairing = j.at("pairing");
    if (!pairing.is_array() || pairing.size() != n)
        throw config_error("pairing: expected a " + std::to_string(n) + "x" + std::to_string(n) +
                           " matrix");
    for (const Json& row : pairing) {
        if (!row.is_array() || row.size() != n)
            throw config_error("pairing: expected a " + std::to_string(n) + "x" +
                               std::to_string(n) + " matrix");
        std::vector<Rational> r;
        for (const Json& v : row) r.push_back(detail::rational_from_json(v, "pairing entry"));
        d.pairing.push_back(std::move(r));
    }

    // Unit products are implied; every other unordered pair must be listed,
    // possibly as an empty object meaning zero.
    d.products.assign(n * n, ChowClass(n));
    for (std::size_t k = 0; k < n; ++k) {
        d.products[0 * n + k] = ChowClass(n);
        d.products[0 * n + k].coeff[k] = Rational(1);
        d.products[k * n + 0] = d.products[0 * n + k];
    }
    std::vector<bool> seen(n * n, false);
    for (auto it = j.at("products").begin(); it != j.at("products").end(); ++it) {
        const auto [lname, rname] = detail::split_product_key(it.key());
        const int i = index_of(lname, "products"), jj = index_of(rname, "products");
        if (i == 0 || jj == 0)
            throw config_error("products: the unit row is implied, remove \"" + it.key() + "\"");
        if (seen[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(jj)])
            throw config_error("products: duplicate entry for \"" + it.key() + "\"");
        ChowClass c(n);
        for (auto term = it.value().begin(); term != it.value().end(); ++term)
            c.coeff[static_cast<std::size_t>(index_of(term.key(), "products"))] =
                detail::rational_from_json(term.value(), "product coefficient");
        d.products[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(jj)] = c;
        d.products[static_cast<std::size_t>(jj) * n + static_cast<std::size_t>(i)] = c;
        seen[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(jj)] = true;
        seen[static_cast<std::size_t>(jj) * n + static_cast<std::size_t>(i)] = true;
    }
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t jj = i; jj < n; ++jj)
            if (!seen[i * n + jj])
                throw config_error("products: missing entry for \"" + d.basis[i].name + "·" +
                                   d.basis[jj].name + "\"");

    for (const Json& s : j.at("seeds")) {
        detail::reject_unknown_fields(s, {"insertions", "degree_steps", "value"}, "seed");
        SeedData seed;
        for (const Json& name : s.at("insertions"))
            seed.insertions.push_back(index_of(name.get<std::string>(), "seed"));
        seed.degree_steps = s.at("degree_steps").get<int>();
        seed.value = detail::rational_from_json(s.at("value"), "seed value");
        d.seeds.push_back(std::move(seed));
    }

    for (const Json& tag : j.at("vanishing_rules")) d.vanishing_rules.insert(tag.get<std::string>());

    if (j.contains("relations")) {
        for (const Json& rel : j.at("relations")) {
            detail::reject_unknown_fields(rel, {"lhs", "rhs"}, "relation");
            const auto [li, lj] = detail::split_product_key(rel.at("lhs").get<std::string>());
            const auto [ri, rj] = detail::split_product_key(rel.at("rhs").get<std::string>());
            d.relations.push_back({index_of(li, "relation"), index_of(lj, "relation"),
                                   index_of(ri, "relation"), index_of(rj, "relation"),
                                   rel.at("lhs").get<std::string>() + " = " +
                                       rel.at("rhs").get<std::string>()});
        }
    }
    return d;
}

inline TargetGeometry load_target(const Json& j, bool validate = true) {
    return TargetGeometry::build(geometry_data_from_json(j), validate);
}

inline TargetGeometry load_target_file(const std::string& path, bool validate = true) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open geometry config \"" + path + "\"");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw config_error("geometry config \"" + path + "\": " + e.what());
    }
    return load_target(j, validate);
}

// The weighted projective plane with one Z/2 point. Basis: the unit, the
// hyperplane class h, the twisted-sector class g of age-shifted degree 1,
// and the point class p = 2h^2. Degrees live in half-integers, one step
// meets c1 in 2, and the one seeded invariant is <p, g | d=1/2> = 1.
inline const char* builtin_p112_json() {
    return R"({
  "name": "p112",
  "dim": 2,
  "degree_step": "1/2",
  "c1_per_step": 2,
  "basis": [
    { "name": "1", "cr_degree": 0, "sector": "untwisted" },
    { "name": "h", "cr_degree": 1, "sector": "untwisted" },
    { "name": "g", "cr_degree": 1, "sector": "twisted" },
    { "name": "p", "cr_degree": 2, "sector": "untwisted" }
  ],
  "pairing": [
    [0, 0, 0, 1],
    [0, "1/2", 0, 0],
    [0, 0, "1/2", 0],
    [1, 0, 0, 0]
  ],
  "products": {
    "h·h": { "p": "1/2" },
    "h·g": {},
    "h·p": {},
    "g·g": { "p": "1/2" },
    "g·p": {},
    "p·p": {}
  },
  "seeds": [
    { "insertions": ["p", "g"], "degree_steps": 1, "value": "1" }
  ],
  "vanishing_rules": ["deg0-gamma-pair", "deg0-mixed-sector", "deg0-n4", "parity"],
  "relations": [
    { "lhs": "g·g", "rhs": "h·h" }
  ]
})";
}

// The classical projective plane, used to cross-validate the engine against
// the rational-curve counts. Seeded with N_1 = <P, P | d=1> = 1.
inline const char* builtin_p2_json() {
    return R"({
  "name": "p2",
  "dim": 2,
  "degree_step": 1,
  "c1_per_step": 3,
  "basis": [
    { "name": "1", "cr_degree": 0, "sector": "untwisted" },
    { "name": "H", "cr_degree": 1, "sector": "untwisted" },
    { "name": "P", "cr_degree": 2, "sector": "untwisted" }
  ],
  "pairing": [
    [0, 0, 1],
    [0, 1, 0],
    [1, 0, 0]
  ],
  "products": {
    "H·H": { "P": 1 },
    "H·P": {},
    "P·P": {}
  },
  "seeds": [
    { "insertions": ["P", "P"], "degree_steps": 1, "value": "1" }
  ],
  "vanishing_rules": ["deg0-n4"]
})";
}

inline TargetGeometry builtin_target(const std::string& name, bool validate = true) {
    if (name == "p112") return load_target(Json::parse(builtin_p112_json()), validate);
    if (name == "p2") return load_target(Json::parse(builtin_p2_json()), validate);
    throw config_error("unknown built-in target \"" + name + "\" (have: p112, p2)");
}

} // namespace orbigw
