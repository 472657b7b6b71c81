#include <orbigw/serialization.hpp>
#include <orbigw/wdvv.hpp>

#include "kontsevich_oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace orbigw;

namespace {

CorrelatorKey key_of(const TargetGeometry& t, std::vector<std::string> names, int steps) {
    std::vector<int> ins;
    for (const auto& n : names) ins.push_back(t.class_index(n));
    return CorrelatorKey(std::move(ins), DegreeSteps{steps});
}

CorrelatorKey ladder_key(const TargetGeometry& t, int g) {
    std::vector<int> ins(static_cast<std::size_t>(2 * g + 1), t.class_index("g"));
    ins.push_back(t.class_index("p"));
    return CorrelatorKey(std::move(ins), DegreeSteps{1});
}

WdvvContext context_of(const TargetGeometry& t, std::vector<std::string> quad,
                       std::vector<std::string> extras, int steps) {
    WdvvContext ctx;
    for (std::size_t i = 0; i < 4; ++i) ctx.quadruple[i] = t.class_index(quad[i]);
    for (const auto& n : extras) ctx.extras.push_back(t.class_index(n));
    ctx.degree = DegreeSteps{steps};
    return ctx;
}

} // namespace

TEST_CASE("extras splittings carry multinomial weights that conserve 2^m") {
    const TargetGeometry t = builtin_target("p112");
    const int g = t.class_index("g");
    for (int m = 0; m <= 9; ++m) {
        const auto splits = enumerate_splits(std::vector<int>(static_cast<std::size_t>(m), g));
        CHECK(splits.size() == static_cast<std::size_t>(m + 1));
        BigInt total = 0;
        for (const auto& s : splits) {
            CHECK(static_cast<int>(s.first.size() + s.second.size()) == m);
            CHECK(s.weight == binomial(m, static_cast<int>(s.first.size())));
            total += s.weight;
        }
        CHECK(total == pow(BigInt(2), m));
    }
    // mixed multiset: {g, g, p} has 3*2 = 6 splits totalling 2^3
    const auto mixed = enumerate_splits({g, g, t.class_index("p")});
    CHECK(mixed.size() == 6);
    BigInt total = 0;
    for (const auto& s : mixed) total += s.weight;
    CHECK(total == 8);
}

TEST_CASE("the ladder equation matches the hand expansion") {
    const TargetGeometry t = builtin_target("p112");
    InvariantTable table = make_table(t);
    const WdvvEquation eq =
        generate_wdvv(context_of(t, {"h", "h", "g", "g"}, {"g"}, 1), t, table);

    // (1/2) <p, g^3 | d=1/2> + (1/8) <p, g | d=1/2> = 0
    REQUIRE(eq.terms.size() == 2);
    CHECK(eq.constant == Rational(0));
    const auto x1 = eq.terms.find(key_of(t, {"p", "g"}, 1));
    const auto x3 = eq.terms.find(key_of(t, {"p", "g", "g", "g"}, 1));
    REQUIRE(x1 != eq.terms.end());
    REQUIRE(x3 != eq.terms.end());
    CHECK(x1->second == Rational(1, 8));
    CHECK(x3->second == Rational(1, 2));
}

TEST_CASE("the all-unit context degenerates to 0 = 0") {
    const TargetGeometry t = builtin_target("p112");
    InvariantTable table = make_table(t);
    const WdvvEquation eq = generate_wdvv(context_of(t, {"1", "1", "1", "1"}, {}, 0), t, table);
    CHECK(eq.trivial());
}

TEST_CASE("the degree-2 plane equation determines the conic count") {
    const TargetGeometry t = builtin_target("p2");
    InvariantTable table = make_table(t);
    const WdvvEquation eq =
        generate_wdvv(context_of(t, {"H", "H", "P", "P"}, {"P", "P"}, 2), t, table);
    // N_2 - N_1 = 0: the line count stays symbolic with net weight
    // 1 - binom(2,1) = -1, so the seed N_1 = 1 forces N_2 = 1
    REQUIRE(eq.terms.size() == 2);
    CHECK(eq.constant == Rational(0));
    const auto n2 = eq.terms.find(key_of(t, {"P", "P", "P", "P", "P"}, 2));
    const auto n1 = eq.terms.find(key_of(t, {"P", "P"}, 1));
    REQUIRE(n2 != eq.terms.end());
    REQUIRE(n1 != eq.terms.end());
    CHECK(n2->second == Rational(1));
    CHECK(n1->second == Rational(-1));
}

TEST_CASE("exchanging the middle quadruple slots negates the equation term by term") {
    const TargetGeometry t = builtin_target("p112");
    InvariantTable table = make_table(t);
    std::mt19937 rng(55);
    std::uniform_int_distribution<int> cls(0, 3), deg(0, 1), m(0, 4);
    for (int iter = 0; iter < 40; ++iter) {
        const int i = cls(rng), j = cls(rng), k = cls(rng), l = cls(rng);
        WdvvContext ctx;
        ctx.quadruple = {i, j, k, l};
        ctx.extras.assign(static_cast<std::size_t>(m(rng)), t.class_index("g"));
        ctx.degree = DegreeSteps{deg(rng)};
        WdvvContext swapped = ctx;
        std::swap(swapped.quadruple[1], swapped.quadruple[2]);

        const WdvvEquation a = generate_wdvv(ctx, t, table);
        const WdvvEquation b = generate_wdvv(swapped, t, table);
        CHECK(a.constant == -b.constant);
        REQUIRE(a.terms.size() == b.terms.size());
        for (const auto& [key, coeff] : a.terms) {
            const auto it = b.terms.find(key);
            REQUIRE(it != b.terms.end());
            CHECK(coeff == -it->second);
        }
    }
}

TEST_CASE("the equation is invariant under swapping the outer pairs") {
    const TargetGeometry t = builtin_target("p112");
    InvariantTable table = make_table(t);
    std::mt19937 rng(56);
    std::uniform_int_distribution<int> cls(0, 3), deg(0, 1), m(0, 4);
    for (int iter = 0; iter < 40; ++iter) {
        WdvvContext ctx;
        ctx.quadruple = {cls(rng), cls(rng), cls(rng), cls(rng)};
        ctx.extras.assign(static_cast<std::size_t>(m(rng)), t.class_index("g"));
        ctx.degree = DegreeSteps{deg(rng)};
        WdvvContext flipped = ctx;
        std::swap(flipped.quadruple[0], flipped.quadruple[1]);
        std::swap(flipped.quadruple[2], flipped.quadruple[3]);

        const WdvvEquation a = generate_wdvv(ctx, t, table);
        const WdvvEquation b = generate_wdvv(flipped, t, table);
        CHECK(a.constant == b.constant);
        CHECK(a.terms == b.terms);
    }
}

TEST_CASE("the solver reproduces the ladder values") {
    const TargetGeometry t = builtin_target("p112");
    InvariantTable table = make_table(t);
    Solver solver(t, table);

    CHECK(solver.lookup_or_solve(ladder_key(t, 1)) == Rational(-1, 4));
    CHECK(solver.lookup_or_solve(ladder_key(t, 2)) == Rational(1, 16));
    CHECK(solver.lookup_or_solve(ladder_key(t, 3)) == Rational(-1, 64));
    CHECK(table.find(ladder_key(t, 1))->prov == Provenance::wdvv);
    CHECK(table.find(ladder_key(t, 0))->prov == Provenance::seed);
}

TEST_CASE("solving twice performs no second derivation") {
    const TargetGeometry t = builtin_target("p112");
    InvariantTable table = make_table(t);
    Solver solver(t, table);
    const Rational first = solver.lookup_or_solve(ladder_key(t, 4));
    const std::size_t entries = table.size();
    const Rational second = solver.lookup_or_solve(ladder_key(t, 4));
    CHECK(first == second);
    CHECK(table.size() == entries);
    CHECK(table.find(ladder_key(t, 4))->prov == Provenance::wdvv);
}

TEST_CASE("hodge integrals against the closed form") {
    const TargetGeometry t = builtin_target("p112");
    InvariantTable table = make_table(t);
    Solver solver(t, table);
    CHECK(solver.hodge_integral(0) == Rational(1));
    CHECK(solver.hodge_integral(1) == Rational(-1, 4));
    CHECK(solver.hodge_integral(5) == Rational(-1, 1024));
    for (int g = 0; g <= 24; ++g) CHECK(solver.hodge_integral(g) == pow(Rational(-1, 4), g));
}

TEST_CASE("higher-degree keys on the orbifold target are honestly unsolvable") {
    const TargetGeometry t = builtin_target("p112");
    InvariantTable table = make_table(t);
    Solver solver(t, table);
    // <p^3 | d=1> passes selection and parity but no strategy isolates it
    CHECK_THROWS_AS(solver.lookup_or_solve(key_of(t, {"p", "p", "p"}, 2)), unsolvable_error);
}

TEST_CASE("keys no rule or strategy covers are refused rather than zeroed") {
    Json j = Json::parse(builtin_p112_json());
    j["vanishing_rules"] = Json::array();
    const TargetGeometry t = load_target(j);
    InvariantTable table = make_table(t);
    Solver solver(t, table);
    // with the parity rule off this key survives normalization, and the
    // ladder strategy does not cover even twisted counts
    CHECK_THROWS_AS(solver.lookup_or_solve(key_of(t, {"p", "g", "g"}, 1)), unsolvable_error);
}

TEST_CASE("the parity rule is not load-bearing for the ladder") {
    Json j = Json::parse(builtin_p112_json());
    Json rules = Json::array();
    for (const auto& r : j["vanishing_rules"])
        if (r.get<std::string>() != "parity") rules.push_back(r);
    j["vanishing_rules"] = rules;
    const TargetGeometry no_parity = load_target(j);
    InvariantTable table = make_table(no_parity);
    Solver solver(no_parity, table);
    for (int g = 0; g <= 12; ++g) {
        std::vector<int> ins(static_cast<std::size_t>(2 * g + 1), no_parity.class_index("g"));
        ins.push_back(no_parity.class_index("p"));
        CHECK(solver.lookup_or_solve(CorrelatorKey(std::move(ins), DegreeSteps{1})) ==
              pow(Rational(-1, 4), g));
    }
}

TEST_CASE("plane curve counts match the independent recursion") {
    const TargetGeometry t = builtin_target("p2");
    InvariantTable table = make_table(t);
    Solver solver(t, table);
    const std::vector<Rational> engine = solver.kontsevich_numbers(6);

    const std::vector<Rational> frozen = {Rational(1),     Rational(1),
                                          Rational(12),    Rational(620),
                                          Rational(87304), Rational(26312976)};
    REQUIRE(engine.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(engine[i] == frozen[i]);

    const auto brute = oracle::plane_curve_counts(6);
    for (int d = 1; d <= 6; ++d) {
        CHECK(engine[static_cast<std::size_t>(d - 1)].den() == 1);
        CHECK(engine[static_cast<std::size_t>(d - 1)].num() ==
              brute[static_cast<std::size_t>(d)]);
    }
}

TEST_CASE("divisor-axiom consistency across the solved ladder") {
    const TargetGeometry t = builtin_target("p112");
    InvariantTable table = make_table(t);
    Solver solver(t, table);
    solver.hodge_integral(10);
    std::vector<std::pair<CorrelatorKey, Rational>> solved;
    for (const auto& [key, entry] : table)
        if (key.degree.steps == 1 && entry.prov == Provenance::wdvv)
            solved.emplace_back(key, entry.value);
    REQUIRE_FALSE(solved.empty());
    for (const auto& [key, value] : solved) {
        std::vector<int> ins = key.insertions;
        ins.push_back(t.class_index("h"));
        CHECK(solver.lookup_or_solve(CorrelatorKey(std::move(ins), key.degree)) ==
              Rational(1, 2) * value);
    }
}

TEST_CASE("residual audit is clean on the orbifold target") {
    const TargetGeometry t = builtin_target("p112");
    InvariantTable table = make_table(t);
    Solver solver(t, table);
    AuditBounds bounds;
    bounds.max_degree_steps = 1;
    bounds.max_extras = 9;
    const AuditReport report = solver.audit(bounds);
    CHECK(report.ok());
    CHECK(report.equations_checked == 2 * 10 * 256);
}

TEST_CASE("residual audit is clean on the plane") {
    const TargetGeometry t = builtin_target("p2");
    InvariantTable table = make_table(t);
    Solver solver(t, table);
    AuditBounds bounds;
    bounds.max_degree_steps = 4;
    bounds.max_extras = 8;
    const AuditReport report = solver.audit(bounds);
    CHECK(report.ok());
    CHECK(report.equations_checked == 5 * 9 * 81);
}

TEST_CASE("a corrupted table is caught by the audit with a term breakdown") {
    const TargetGeometry t = builtin_target("p112");
    InvariantTable corrupt;
    corrupt.insert(ladder_key(t, 0), Rational(2), Provenance::seed); // wrong: the seed is 1
    corrupt.insert(ladder_key(t, 1), Rational(-1, 4), Provenance::wdvv); // honest
    Solver solver(t, corrupt);
    AuditBounds bounds;
    bounds.min_degree_steps = 1;
    bounds.max_degree_steps = 1;
    bounds.max_extras = 1;
    const AuditReport report = solver.audit(bounds);
    REQUIRE_FALSE(report.ok());
    bool found = false;
    for (const AuditViolation& v : report.violations)
        if (!v.equation.terms.empty()) found = true;
    CHECK(found);
}

TEST_CASE("equation and audit JSON forms") {
    const TargetGeometry t = builtin_target("p112");
    InvariantTable table = make_table(t);
    const WdvvEquation eq =
        generate_wdvv(context_of(t, {"h", "h", "g", "g"}, {"g"}, 1), t, table);
    const Json j = equation_to_json(eq, t);
    CHECK(j.at("context").at("quadruple") == Json::array({"h", "h", "g", "g"}));
    CHECK(j.at("context").at("degree_steps") == 1);
    REQUIRE(j.at("terms").size() == 2);
    CHECK(j.at("terms")[0].at("coeff") == "1/8");
    CHECK(j.at("terms")[0].at("key").at("insertions") == Json::array({"p", "g"}));
    CHECK(j.at("terms")[1].at("coeff") == "1/2");
    CHECK_FALSE(j.contains("constant"));

    AuditReport clean;
    CHECK(audit_report_to_json(clean, t) == Json::array());
}

TEST_CASE("cache JSON round-trips the solved table bit-exactly") {
    const TargetGeometry t = builtin_target("p112");
    InvariantTable table = make_table(t);
    Solver solver(t, table);
    solver.hodge_integral(10);
    const Json saved = table_to_json(table, t);
    const InvariantTable restored = table_from_json(saved, t);
    CHECK(restored == table);
    CHECK(table_to_json(restored, t).dump(2) == saved.dump(2));
}

TEST_CASE("cache validation") {
    const TargetGeometry t = builtin_target("p112");
    SECTION("an empty object is the seeded table") {
        const InvariantTable table = table_from_json(Json::parse("{}"), t);
        CHECK(table == make_table(t));
    }
    SECTION("selection-violating nonzero entries are rejected") {
        Json j = Json::parse(R"({"schema":1,"target":"p112","entries":[
            {"insertions":["p","p"],"degree_steps":1,"value":"5","provenance":"wdvv"}]})");
        CHECK_THROWS_AS(table_from_json(j, t), config_error);
    }
    SECTION("entries conflicting with seeds are rejected") {
        Json j = Json::parse(R"({"schema":1,"target":"p112","entries":[
            {"insertions":["p","g"],"degree_steps":1,"value":"2","provenance":"seed"}]})");
        CHECK_THROWS_AS(table_from_json(j, t), config_error);
    }
    SECTION("wrong target or schema is rejected") {
        CHECK_THROWS_AS(table_from_json(Json::parse(R"({"target":"p2"})"), t), config_error);
        CHECK_THROWS_AS(table_from_json(Json::parse(R"({"schema":7})"), t), config_error);
    }
}
