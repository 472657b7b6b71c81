#pragma once

// WDVV associativity constraints over multiset splittings, and the recursive
// solver that extracts unknown correlators from them. The solver never
// guesses: a key it cannot isolate raises unsolvable_error, and a key
// revisited mid-solve raises cycle_error.

#include <orbigw/chow_ring.hpp>
#include <orbigw/correlator.hpp>
#include <orbigw/errors.hpp>
#include <orbigw/rational.hpp>

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbigw {

struct WdvvContext {
    std::array<int, 4> quadruple{}; // basis indices (i, j, k, l)
    std::vector<int> extras;        // multiset of basis indices
    DegreeSteps degree;             // total degree of the constraint
};

// Linear constraint sum(coeff * key) + constant = 0. Coefficients for equal
// keys are combined on construction and zero coefficients dropped.
struct WdvvEquation {
    WdvvContext context;
    std::map<CorrelatorKey, Rational, KeyRankLess> terms;
    Rational constant;

    bool trivial() const { return terms.empty() && constant.is_zero(); }
};

// One way of dividing the extras multiset between the two correlator slots,
// weighted by the number of ways to pick identical insertions.
struct ExtrasSplit {
    std::vector<int> first;
    std::vector<int> second;
    BigInt weight;
};

inline std::vector<ExtrasSplit> enumerate_splits(std::vector<int> extras) {
    std::sort(extras.begin(), extras.end());
    std::vector<std::pair<int, int>> groups; // (class, multiplicity)
    for (std::size_t i = 0; i < extras.size();) {
        std::size_t j = i;
        while (j < extras.size() && extras[j] == extras[i]) ++j;
        groups.emplace_back(extras[i], static_cast<int>(j - i));
        i = j;
    }
    std::vector<ExtrasSplit> out;
    std::vector<int> take(groups.size(), 0);
    while (true) {
        ExtrasSplit s;
        s.weight = 1;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            s.weight *= binomial(groups[g].second, take[g]);
            s.first.insert(s.first.end(), static_cast<std::size_t>(take[g]), groups[g].first);
            s.second.insert(s.second.end(), static_cast<std::size_t>(groups[g].second - take[g]),
                            groups[g].first);
        }
        out.push_back(std::move(s));
        std::size_t g = 0;
        while (g < groups.size() && take[g] == groups[g].second) take[g++] = 0;
        if (g == groups.size()) break;
        ++take[g];
    }
    return out;
}

struct AuditBounds {
    int min_degree_steps = 0;
    int max_degree_steps = 1;
    int max_extras = 9;
    int extras_class = -1; // -1: the twisted class if any, else the point class
};

struct AuditViolation {
    WdvvEquation equation;
    Rational residual;
};

struct AuditReport {
    std::vector<AuditViolation> violations;
    long equations_checked = 0;

    bool ok() const { return violations.empty(); }
};

// Equation generation and recursive solving against one target and one memo
// table. The table is borrowed, not owned, so callers can persist it.
class Solver {
public:
    Solver(const TargetGeometry& t, InvariantTable& table) : t_(t), table_(table) {}

    const TargetGeometry& target() const { return t_; }
    InvariantTable& table() { return table_; }

    Rational lookup_or_solve(const CorrelatorKey& key) {
        return orbigw::lookup_or_solve(key, table_, t_,
                                       [this](const CorrelatorKey& k) { return solve_correlator(k); });
    }

    // Builds the constraint
    //   sum over (S1 + S2 = extras, d1 + d2 = degree, dual pair (mu, nu)) of
    //     <x_i, x_j, S1, e_mu>_{d1} g^{mu nu} <e_nu, x_k, x_l, S2>_{d2}
    //   minus the same with j and k exchanged,
    // with every key normalized through the axioms. Factors the axioms
    // determine fold into coefficients; when both factors of a term stay
    // symbolic the lower-rank one is resolved through the table (solving it
    // recursively if needed) so the equation remains linear.
    WdvvEquation generate(const WdvvContext& ctx) {
        WdvvEquation eq;
        eq.context = ctx;
        const auto& q = ctx.quadruple;
        for (int x : q)
            if (x < 0 || x >= t_.size()) throw unknown_class_error("quadruple index out of range");
        const Matrix& ginv = t_.pairing_inverse();
        const auto pairs = t_.dual_pairs();
        const auto splits = enumerate_splits(ctx.extras);

        for (const ExtrasSplit& split : splits) {
            for (int d1 = 0; d1 <= ctx.degree.steps; ++d1) {
                const DegreeSteps dA{d1}, dB{ctx.degree.steps - d1};
                for (const auto& [mu, nu] : pairs) {
                    const Rational dual =
                        ginv[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)];
                    for (int side = 0; side < 2; ++side) {
                        // side 0 pairs (i,j | k,l); side 1 subtracts (i,k | j,l)
                        const int a1 = q[0], a2 = side == 0 ? q[1] : q[2];
                        const int b1 = side == 0 ? q[2] : q[1], b2 = q[3];

                        std::vector<int> insA = split.first;
                        insA.push_back(a1);
                        insA.push_back(a2);
                        insA.push_back(mu);
                        const Normalized nA = normalize(CorrelatorKey(std::move(insA), dA), t_);
                        if (nA.determined && nA.value.is_zero()) continue;

                        std::vector<int> insB = split.second;
                        insB.push_back(nu);
                        insB.push_back(b1);
                        insB.push_back(b2);
                        const Normalized nB = normalize(CorrelatorKey(std::move(insB), dB), t_);
                        if (nB.determined && nB.value.is_zero()) continue;

                        Rational base = Rational(split.weight) * dual;
                        if (side == 1) base = -base;

                        if (nA.determined && nB.determined) {
                            eq.constant += base * nA.value * nB.value;
                        } else if (nA.determined) {
                            eq.terms[nB.reduced] += base * nA.value * nB.coeff;
                        } else if (nB.determined) {
                            eq.terms[nA.reduced] += base * nB.value * nA.coeff;
                        } else if (rank_less(nA.reduced, nB.reduced) || nA.reduced == nB.reduced) {
                            const Rational vA = lookup_or_solve(nA.reduced);
                            eq.terms[nB.reduced] += base * nA.coeff * vA * nB.coeff;
                        } else {
                            const Rational vB = lookup_or_solve(nB.reduced);
                            eq.terms[nA.reduced] += base * nB.coeff * vB * nA.coeff;
                        }
                    }
                }
            }
        }
        for (auto it = eq.terms.begin(); it != eq.terms.end();)
            it = it->second.is_zero() ? eq.terms.erase(it) : std::next(it);
        return eq;
    }

    // Context used to isolate an irreducible key, or nullopt when the target
    // admits no strategy for it.
    std::optional<WdvvContext> strategy(const CorrelatorKey& key) const {
        const int point = t_.point_index();

        std::vector<int> twisted, divisors;
        for (int i = 0; i < t_.size(); ++i) {
            if (t_.twisted(i)) twisted.push_back(i);
            if (t_.is_divisor(i)) divisors.push_back(i);
        }
        if (divisors.size() != 1) return std::nullopt;
        const int div = divisors.front();

        if (twisted.size() == 1) {
            // Half-step ladder: <p, tau^(2g+1)> at one step is isolated by
            // the quadruple (h, h, tau, tau) with extras tau^(2g-1).
            const int tau = twisted.front();
            if (key.degree.steps != 1) return std::nullopt;
            int points = 0, taus = 0;
            for (int i : key.insertions) {
                if (i == point)
                    ++points;
                else if (i == tau)
                    ++taus;
                else
                    return std::nullopt;
            }
            if (points != 1 || taus < 3 || taus % 2 == 0) return std::nullopt;
            WdvvContext ctx;
            ctx.quadruple = {div, div, tau, tau};
            ctx.extras.assign(static_cast<std::size_t>(taus - 2), tau);
            ctx.degree = key.degree;
            return ctx;
        }
        if (twisted.empty()) {
            // Point-count ladder: <P^(n)> at degree d is isolated by
            // (H, H, P, P) with extras P^(n-3).
            if (key.degree.steps < 2) return std::nullopt;
            if (std::any_of(key.insertions.begin(), key.insertions.end(),
                            [&](int i) { return i != point; }))
                return std::nullopt;
            if (key.size() < 3) return std::nullopt;
            WdvvContext ctx;
            ctx.quadruple = {div, div, point, point};
            ctx.extras.assign(static_cast<std::size_t>(key.size() - 3), point);
            ctx.degree = key.degree;
            return ctx;
        }
        return std::nullopt;
    }

    // Isolates the key in its strategy equation, resolving every other key
    // recursively (all of strictly smaller rank), and memoizes the result.
    Rational solve_correlator(const CorrelatorKey& key) {
        for (const CorrelatorKey& active : in_progress_)
            if (active == key)
                throw cycle_error("solve revisited " + key_to_text(key, t_) + " mid-solve");
        if (!in_progress_.empty() && !rank_less(key, in_progress_.back()))
            throw std::logic_error("recursion rank order violated at " + key_to_text(key, t_));

        const auto ctx = strategy(key);
        if (!ctx)
            throw unsolvable_error("no solve strategy isolates " + key_to_text(key, t_) +
                                   " on target \"" + t_.name() + "\"");

        in_progress_.push_back(key);
        struct Pop {
            std::vector<CorrelatorKey>& v;
            ~Pop() { v.pop_back(); }
        } pop{in_progress_};

        const WdvvEquation eq = generate(*ctx);
        const auto self = eq.terms.find(key);
        if (self == eq.terms.end())
            throw unsolvable_error("strategy equation does not contain " + key_to_text(key, t_));
        const Rational pivot = self->second;

        Rational acc = eq.constant;
        for (const auto& [other, coeff] : eq.terms) {
            if (other == key) continue;
            acc += coeff * lookup_or_solve(other);
        }
        Rational value = -acc / pivot;
        table_.insert(key, value, Provenance::wdvv);
        return value;
    }

    // <p, tau^(2g+1)> at one half-step, cross-checked against the closed
    // form (-1/4)^g; a mismatch means the engine is inconsistent and is
    // fatal by design.
    Rational hodge_integral(int g) {
        if (g < 0) throw config_error("hodge_integral: g must be nonnegative");
        std::vector<int> twisted;
        for (int i = 0; i < t_.size(); ++i)
            if (t_.twisted(i)) twisted.push_back(i);
        if (twisted.size() != 1)
            throw config_error("hodge_integral needs a target with exactly one twisted class");
        std::vector<int> ins(static_cast<std::size_t>(2 * g + 1), twisted.front());
        ins.push_back(t_.point_index());
        const Rational value = lookup_or_solve(CorrelatorKey(std::move(ins), DegreeSteps{1}));
        const Rational closed = pow(Rational(-1, 4), g);
        if (value != closed)
            throw std::logic_error("hodge ladder value " + value.str() + " at g=" +
                                   std::to_string(g) + " disagrees with closed form " + closed.str());
        return value;
    }

    // N_d for d = 1..dmax: the count of degree-d rational curves through the
    // selection-forced number of point insertions.
    std::vector<Rational> kontsevich_numbers(int dmax) {
        if (dmax < 1) throw config_error("kontsevich_numbers: dmax must be >= 1");
        std::vector<Rational> out;
        for (int d = 1; d <= dmax; ++d) {
            const Rational n = Rational(d) * t_.c1_per_step() + Rational(t_.dim() - 3);
            if (n.den() != 1 || n.num() <= 0)
                throw config_error("no point-count key exists at degree " + std::to_string(d));
            std::vector<int> ins(static_cast<std::size_t>(n.num()), t_.point_index());
            out.push_back(lookup_or_solve(CorrelatorKey(std::move(ins), DegreeSteps{d})));
        }
        return out;
    }

    // Evaluates every generated equation in the bounds against the table;
    // any nonzero residual is a violation with its full term breakdown.
    AuditReport audit(const AuditBounds& bounds) {
        AuditReport report;
        int cls = bounds.extras_class;
        if (cls < 0) {
            cls = t_.point_index();
            for (int i = 0; i < t_.size(); ++i)
                if (t_.twisted(i)) {
                    cls = i;
                    break;
                }
        }
        for (int s = bounds.min_degree_steps; s <= bounds.max_degree_steps; ++s) {
            for (int m = 0; m <= bounds.max_extras; ++m) {
                WdvvContext ctx;
                ctx.extras.assign(static_cast<std::size_t>(m), cls);
                ctx.degree = DegreeSteps{s};
                for (int i = 0; i < t_.size(); ++i)
                    for (int j = 0; j < t_.size(); ++j)
                        for (int k = 0; k < t_.size(); ++k)
                            for (int l = 0; l < t_.size(); ++l) {
                                ctx.quadruple = {i, j, k, l};
                                WdvvEquation eq = generate(ctx);
                                Rational residual = eq.constant;
                                for (const auto& [key, coeff] : eq.terms)
                                    residual += coeff * lookup_or_solve(key);
                                ++report.equations_checked;
                                if (!residual.is_zero())
                                    report.violations.push_back({std::move(eq), residual});
                            }
            }
        }
        return report;
    }

private:
    const TargetGeometry& t_;
    InvariantTable& table_;
    std::vector<CorrelatorKey> in_progress_;
};

inline WdvvEquation generate_wdvv(const WdvvContext& ctx, const TargetGeometry& t,
                                  InvariantTable& table) {
    return Solver(t, table).generate(ctx);
}

} // namespace orbigw
