#pragma once

// Canonical correlator keys, the memo table, and the axiom layer that
// normalizes a key before any equation solving: selection rule, unit and
// divisor axioms, degree-zero ring evaluation and the config-gated
// vanishing rules.

#include <orbigw/chow_ring.hpp>
#include <orbigw/errors.hpp>
#include <orbigw/rational.hpp>

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace orbigw {

// (sorted multiset of basis indices, curve degree in steps). Sorting makes
// permutation invariance structural.
struct CorrelatorKey {
    std::vector<int> insertions;
    DegreeSteps degree;

    CorrelatorKey() = default;
    CorrelatorKey(std::vector<int> ins, DegreeSteps d) : insertions(std::move(ins)), degree(d) {
        if (degree.steps < 0) throw config_error("correlator key with negative degree");
        std::sort(insertions.begin(), insertions.end());
    }

    int size() const { return static_cast<int>(insertions.size()); }

    friend bool operator==(const CorrelatorKey& a, const CorrelatorKey& b) {
        return a.degree == b.degree && a.insertions == b.insertions;
    }
    friend bool operator!=(const CorrelatorKey& a, const CorrelatorKey& b) { return !(a == b); }
};

// Recursion rank: (degree, insertion count, lexicographic content). The
// solver only ever recurses to strictly smaller keys under this order.
inline bool rank_less(const CorrelatorKey& a, const CorrelatorKey& b) {
    if (a.degree.steps != b.degree.steps) return a.degree.steps < b.degree.steps;
    if (a.insertions.size() != b.insertions.size()) return a.insertions.size() < b.insertions.size();
    return a.insertions < b.insertions;
}

struct KeyRankLess {
    bool operator()(const CorrelatorKey& a, const CorrelatorKey& b) const { return rank_less(a, b); }
};

// Text form, e.g. "<p, g^3 | d=1/2>". Insertions are shown by descending
// degree so the point class leads, matching the usual way these brackets
// are written.
inline std::string key_to_text(const CorrelatorKey& key, const TargetGeometry& t) {
    std::vector<int> order = key.insertions;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (t.cr_degree(a) != t.cr_degree(b)) return t.cr_degree(a) > t.cr_degree(b);
        return a < b;
    });
    std::string out = "<";
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && order[j] == order[i]) ++j;
        if (i > 0) out += ", ";
        out += t.class_name(order[i]);
        if (j - i > 1) out += "^" + std::to_string(j - i);
        i = j;
    }
    out += " | d=" + t.degree_of(key.degree).str() + ">";
    return out;
}

enum class Provenance { seed, axiom, wdvv };

inline const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::seed: return "seed";
        case Provenance::axiom: return "axiom";
        case Provenance::wdvv: return "wdvv";
    }
    return "?";
}

inline Provenance provenance_from_name(const std::string& s) {
    if (s == "seed") return Provenance::seed;
    if (s == "axiom") return Provenance::axiom;
    if (s == "wdvv") return Provenance::wdvv;
    throw config_error("unknown provenance tag \"" + s + "\"");
}

// Memoized correlator values. A key is present at most once and can never
// be rebound to a different value; in particular seeds are immutable.
class InvariantTable {
public:
    struct Entry {
        Rational value;
        Provenance prov;
    };

    const Entry* find(const CorrelatorKey& key) const {
        auto it = map_.find(key);
        return it == map_.end() ? nullptr : &it->second;
    }
    bool contains(const CorrelatorKey& key) const { return map_.count(key) > 0; }

    void insert(const CorrelatorKey& key, Rational value, Provenance prov) {
        auto it = map_.find(key);
        if (it != map_.end()) {
            if (it->second.value != value)
                throw config_error("conflicting values for a correlator key: " +
                                   it->second.value.str() + " vs " + value.str());
            return; // first writer wins, provenance included
        }
        map_.emplace(key, Entry{std::move(value), prov});
    }

    std::size_t size() const { return map_.size(); }
    auto begin() const { return map_.begin(); }
    auto end() const { return map_.end(); }

    friend bool operator==(const InvariantTable& a, const InvariantTable& b) {
        if (a.map_.size() != b.map_.size()) return false;
        auto ia = a.map_.begin();
        for (auto ib = b.map_.begin(); ib != b.map_.end(); ++ia, ++ib)
            if (!(ia->first == ib->first) || ia->second.value != ib->second.value ||
                ia->second.prov != ib->second.prov)
                return false;
        return true;
    }

private:
    std::map<CorrelatorKey, Entry, KeyRankLess> map_;
};

// Fresh table holding exactly the target's seeds.
inline InvariantTable make_table(const TargetGeometry& t);

// Grading selection rule: a correlator vanishes unless
//   sum cr_degree(ins_i) = dim - 3 + integral_d c1 + n.
inline bool selection_pass(const CorrelatorKey& key, const TargetGeometry& t) {
    Rational lhs;
    for (int i : key.insertions) {
        if (i < 0 || i >= t.size()) throw unknown_class_error("basis index out of range in key");
        lhs += Rational(t.cr_degree(i));
    }
    const Rational rhs = Rational(t.dim() - 3 + key.size()) +
                         Rational(key.degree.steps) * t.c1_per_step();
    return lhs == rhs;
}

inline InvariantTable make_table(const TargetGeometry& t) {
    InvariantTable table;
    for (const SeedData& s : t.seeds()) {
        CorrelatorKey key(s.insertions, DegreeSteps{s.degree_steps});
        if (!s.value.is_zero() && !selection_pass(key, t))
            throw config_error("seed " + key_to_text(key, t) + " violates the selection rule");
        table.insert(key, s.value, Provenance::seed);
    }
    return table;
}

// Degree-zero three-point invariants are the ring's structure integrals.
inline Rational degree_zero_eval(const CorrelatorKey& key, const TargetGeometry& t) {
    if (key.degree.steps != 0 || key.size() != 3)
        throw config_error("degree_zero_eval needs a degree-0 three-point key");
    return t.pair(t.multiply(t.basis_vector(key.insertions[0]), t.basis_vector(key.insertions[1])),
                  t.basis_vector(key.insertions[2]));
}

enum class NormalReason { none, selection, unit, ring, rule };

// Outcome of axiom normalization: either a fully determined value with the
// reason it is known, or coeff times a reduced key. reduced == input means
// the key is irreducible and only an equation can determine it.
struct Normalized {
    bool determined = false;
    Rational value;
    NormalReason reason = NormalReason::none;
    Rational coeff;
    CorrelatorKey reduced;

    static Normalized of_value(Rational v, NormalReason why) {
        Normalized n;
        n.determined = true;
        n.value = std::move(v);
        n.reason = why;
        return n;
    }
    static Normalized of_reduced(Rational c, CorrelatorKey k) {
        Normalized n;
        n.coeff = std::move(c);
        n.reduced = std::move(k);
        return n;
    }
};

inline Normalized normalize(const CorrelatorKey& key, const TargetGeometry& t) {
    // (1) selection rule
    if (!selection_pass(key, t)) return Normalized::of_value(Rational(0), NormalReason::selection);

    const int unit = t.unit_index();
    const bool has_unit =
        std::find(key.insertions.begin(), key.insertions.end(), unit) != key.insertions.end();

    // (2) unit axiom
    if (has_unit) {
        if (key.degree.steps == 0 && key.size() == 3) {
            std::vector<int> rest;
            bool dropped = false;
            for (int i : key.insertions) {
                if (!dropped && i == unit) {
                    dropped = true;
                    continue;
                }
                rest.push_back(i);
            }
            const Rational v = t.pair(t.basis_vector(rest[0]), t.basis_vector(rest[1]));
            return Normalized::of_value(v, NormalReason::unit);
        }
        return Normalized::of_value(Rational(0), NormalReason::unit);
    }

    // (3) divisor axiom: at positive degree every untwisted degree-1
    // insertion is stripped at the cost of the curve degree.
    Rational coeff(1);
    std::vector<int> ins;
    if (key.degree.steps > 0) {
        const Rational d = t.divisor_integral(key.degree);
        for (int i : key.insertions) {
            if (t.is_divisor(i))
                coeff *= d;
            else
                ins.push_back(i);
        }
    } else {
        ins = key.insertions;
    }

    const int twisted_count =
        static_cast<int>(std::count_if(ins.begin(), ins.end(), [&](int i) { return t.twisted(i); }));

    if (key.degree.steps == 0) {
        const int n = static_cast<int>(ins.size());
        // (4) degree-0 three-point keys are ring integrals
        if (n == 3)
            return Normalized::of_value(degree_zero_eval(CorrelatorKey(ins, key.degree), t),
                                        NormalReason::ring);
        if (n < 3) return Normalized::of_value(Rational(0), NormalReason::rule); // unstable
        // (5) vanishing rules for the rest
        if (t.has_rule("deg0-gamma-pair") && n - twisted_count == 1 && twisted_count >= 1)
            return Normalized::of_value(Rational(0), NormalReason::rule);
        if (t.has_rule("deg0-mixed-sector") && twisted_count >= 1 &&
            std::any_of(ins.begin(), ins.end(), [&](int i) { return t.is_divisor(i); }))
            return Normalized::of_value(Rational(0), NormalReason::rule);
        if (t.has_rule("deg0-n4"))
            return Normalized::of_value(Rational(0), NormalReason::rule);
        return Normalized::of_reduced(Rational(1), key); // irreducible, solver will refuse
    }

    // (5) parity rule: the twisted-point count must match 2d mod 2 whenever
    // 2d is integral.
    if (t.has_rule("parity")) {
        const Rational twice = Rational(2 * key.degree.steps) * t.degree_step();
        if (twice.den() == 1 && (twice.num() - twisted_count) % 2 != 0)
            return Normalized::of_value(Rational(0), NormalReason::rule);
    }

    CorrelatorKey reduced(ins, key.degree);
    return Normalized::of_reduced(std::move(coeff), std::move(reduced));
}

// Memo lookup, then axioms, then the supplied equation solver for
// irreducible positive-degree keys. Axiom-determined values are cached with
// provenance "axiom" except plain selection failures, which are not worth
// table space.
template <class SolverFn>
Rational lookup_or_solve(const CorrelatorKey& key, InvariantTable& table, const TargetGeometry& t,
                         SolverFn&& solver) {
    if (const auto* e = table.find(key)) return e->value;
    const Normalized n = normalize(key, t);
    if (n.determined) {
        if (n.reason != NormalReason::selection) table.insert(key, n.value, Provenance::axiom);
        return n.value;
    }
    if (n.reduced != key) {
        const Rational v = n.coeff * lookup_or_solve(n.reduced, table, t, solver);
        table.insert(key, v, Provenance::axiom);
        return v;
    }
    if (key.degree.steps == 0)
        throw unsolvable_error("no rule determines the degree-0 key " + key_to_text(key, t));
    return solver(key);
}

} // namespace orbigw
