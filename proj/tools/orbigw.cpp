// Command-line surface for the engine: single invariants, ladder and curve
// count tables, the WDVV residual audit, ring checks, geometry validation
// and the persisted memo cache.
//
// Exit codes: 0 success; 1 audit/check violation or table mismatch;
// 2 unknown class name; 3 solver gave up (unsolvable/cycle); 4 config or
// cache error; 64 usage error; 70 internal consistency failure.

#include <orbigw/correlator.hpp>
#include <orbigw/geometry_config.hpp>
#include <orbigw/serialization.hpp>
#include <orbigw/wdvv.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace orbigw;

struct CommonOpts {
    std::string target = "p112";
    std::string geometry;
    std::string format = "text";
    std::string cache;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--target", o.target, "Built-in target (p112, p2)")
        ->check(CLI::IsMember({"p112", "p2"}));
    cmd->add_option("--geometry", o.geometry, "Path to a geometry config JSON (overrides --target)");
    cmd->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    cmd->add_option("--cache", o.cache, "Memo cache file to load if present and save on success");
}

TargetGeometry resolve_target(const CommonOpts& o, bool validate = true) {
    if (!o.geometry.empty()) return load_target_file(o.geometry, validate);
    return builtin_target(o.target, validate);
}

InvariantTable load_cache(const CommonOpts& o, const TargetGeometry& t) {
    if (o.cache.empty() || !std::filesystem::exists(o.cache)) return make_table(t);
    std::ifstream in(o.cache);
    if (!in) throw config_error("cannot open cache \"" + o.cache + "\"");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw config_error("cache \"" + o.cache + "\": " + e.what());
    }
    return table_from_json(j, t);
}

void save_cache(const CommonOpts& o, const InvariantTable& table, const TargetGeometry& t) {
    if (o.cache.empty()) return;
    std::ofstream out(o.cache);
    if (!out) throw config_error("cannot write cache \"" + o.cache + "\"");
    out << table_to_json(table, t).dump(2) << "\n";
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

// ---- invariant ----

struct InvariantOpts {
    CommonOpts common;
    std::string insertions;
    std::string degree;
    int degree_steps = -1; // < 0: not provided
};

int cmd_invariant(const InvariantOpts& o) {
    const TargetGeometry t = resolve_target(o.common);
    std::vector<int> ins;
    for (const std::string& name : split_csv(o.insertions)) ins.push_back(t.class_index(name));

    int steps = 0;
    if (o.degree_steps >= 0) {
        steps = o.degree_steps;
    } else {
        const Rational d = Rational::parse(o.degree);
        const Rational s = d / t.degree_step();
        if (s.den() != 1 || s.num() < 0)
            throw config_error("degree " + d.str() + " is not a nonnegative multiple of the step " +
                               t.degree_step().str());
        steps = static_cast<int>(s.num());
    }
    const CorrelatorKey key(std::move(ins), DegreeSteps{steps});

    Rational value;
    std::string prov;
    if (!selection_pass(key, t)) {
        value = Rational(0);
        prov = "selection";
    } else {
        InvariantTable table = load_cache(o.common, t);
        Solver solver(t, table);
        value = solver.lookup_or_solve(key);
        const auto* entry = table.find(key);
        prov = entry ? provenance_name(entry->prov) : "axiom";
        save_cache(o.common, table, t);
    }

    if (o.common.format == "json") {
        Json j;
        j["target"] = t.name();
        j["key"] = key_to_json(key, t);
        j["degree"] = t.degree_of(key.degree).str();
        j["value"] = value.str();
        j["provenance"] = prov;
        emit(j);
    } else if (o.common.format == "csv") {
        std::cout << "key,degree,value,provenance\n";
        std::string names;
        for (int i : display_order(key, t)) names += (names.empty() ? "" : "+") + t.class_name(i);
        std::cout << names << "," << t.degree_of(key.degree) << "," << value << "," << prov << "\n";
    } else {
        std::cout << value << " (" << prov << ")\n";
    }
    return 0;
}

// ---- hodge-table ----

struct HodgeOpts {
    CommonOpts common;
    int gmax = 10;
};

int cmd_hodge_table(const HodgeOpts& o) {
    const TargetGeometry t = resolve_target(o.common);
    InvariantTable table = load_cache(o.common, t);
    Solver solver(t, table);

    int twisted = -1;
    for (int i = 0; i < t.size(); ++i)
        if (t.twisted(i)) {
            if (twisted >= 0) throw config_error("target has more than one twisted class");
            twisted = i;
        }
    if (twisted < 0) throw config_error("hodge-table needs a target with a twisted sector");

    struct Row {
        int g;
        Rational recursion, closed;
        bool match;
    };
    std::vector<Row> rows;
    bool all_match = true;
    for (int g = 0; g <= o.gmax; ++g) {
        std::vector<int> ins(static_cast<std::size_t>(2 * g + 1), twisted);
        ins.push_back(t.point_index());
        const Rational rec = solver.lookup_or_solve(CorrelatorKey(std::move(ins), DegreeSteps{1}));
        const Rational closed = pow(Rational(-1, 4), g);
        rows.push_back({g, rec, closed, rec == closed});
        all_match = all_match && rec == closed;
    }
    save_cache(o.common, table, t);

    if (o.common.format == "json") {
        Json j;
        j["target"] = t.name();
        j["rows"] = Json::array();
        for (const Row& r : rows)
            j["rows"].push_back({{"g", r.g},
                                 {"recursion", r.recursion.str()},
                                 {"closed_form", r.closed.str()},
                                 {"match", r.match}});
        emit(j);
    } else if (o.common.format == "csv") {
        std::cout << "g,recursion,closed_form,match\n";
        for (const Row& r : rows)
            std::cout << r.g << "," << r.recursion << "," << r.closed << ","
                      << (r.match ? "yes" : "no") << "\n";
    } else {
        std::cout << "g\trecursion\tclosed-form\tmatch\n";
        for (const Row& r : rows)
            std::cout << r.g << "\t" << r.recursion << "\t" << r.closed << "\t"
                      << (r.match ? "yes" : "no") << "\n";
    }
    return all_match ? 0 : 1;
}

// ---- kontsevich ----

struct KontsevichOpts {
    CommonOpts common;
    int dmax = 6;
};

int cmd_kontsevich(const KontsevichOpts& o) {
    const TargetGeometry t = resolve_target(o.common);
    InvariantTable table = load_cache(o.common, t);
    Solver solver(t, table);
    const std::vector<Rational> values = solver.kontsevich_numbers(o.dmax);
    save_cache(o.common, table, t);

    if (o.common.format == "json") {
        Json j;
        j["target"] = t.name();
        j["rows"] = Json::array();
        for (int d = 1; d <= o.dmax; ++d)
            j["rows"].push_back({{"d", d}, {"value", values[static_cast<std::size_t>(d - 1)].str()}});
        emit(j);
    } else if (o.common.format == "csv") {
        std::cout << "d,N_d\n";
        for (int d = 1; d <= o.dmax; ++d)
            std::cout << d << "," << values[static_cast<std::size_t>(d - 1)] << "\n";
    } else {
        std::cout << "d\tN_d\n";
        for (int d = 1; d <= o.dmax; ++d)
            std::cout << d << "\t" << values[static_cast<std::size_t>(d - 1)] << "\n";
    }
    return 0;
}

// ---- audit ----

struct AuditOpts {
    CommonOpts common;
    AuditBounds bounds;
    std::string extras_name;
};

int cmd_audit(const AuditOpts& o) {
    const TargetGeometry t = resolve_target(o.common);
    InvariantTable table = load_cache(o.common, t);
    Solver solver(t, table);

    AuditBounds bounds = o.bounds;
    if (!o.extras_name.empty()) bounds.extras_class = t.class_index(o.extras_name);
    const AuditReport report = solver.audit(bounds);
    const PresentationReport ring = verify_presentation(t);
    save_cache(o.common, table, t);

    if (o.common.format == "json") {
        emit(audit_report_to_json(report, t));
    } else if (o.common.format == "csv") {
        std::cout << "quadruple,extras,degree_steps,residual\n";
        for (const AuditViolation& v : report.violations) {
            std::string quad, extras;
            for (int i : v.equation.context.quadruple)
                quad += (quad.empty() ? "" : "+") + t.class_name(i);
            for (int i : v.equation.context.extras)
                extras += (extras.empty() ? "" : "+") + t.class_name(i);
            std::cout << quad << "," << extras << "," << v.equation.context.degree.steps << ","
                      << v.residual << "\n";
        }
    } else {
        std::cout << "checked " << report.equations_checked << " equations, "
                  << report.violations.size() << " violation(s)\n";
        for (const AuditViolation& v : report.violations) {
            std::cout << "  residual " << v.residual << " in "
                      << equation_to_json(v.equation, t).dump() << "\n";
        }
        for (const CheckResult& c : ring.checks)
            if (!c.pass) std::cout << "ring check failed [" << c.name << "]: " << c.detail << "\n";
    }
    return (report.ok() && ring.ok()) ? 0 : 1;
}

// ---- ring-check / geometry-validate ----

int render_report(const PresentationReport& report, const std::string& format) {
    if (format == "json") {
        emit(presentation_report_to_json(report));
    } else if (format == "csv") {
        std::cout << "check,pass,detail\n";
        for (const CheckResult& c : report.checks)
            std::cout << c.name << "," << (c.pass ? "yes" : "no") << ",\"" << c.detail << "\"\n";
    } else {
        for (const CheckResult& c : report.checks)
            std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
    }
    return report.ok() ? 0 : 1;
}

int cmd_ring_check(const CommonOpts& o) {
    const TargetGeometry t = resolve_target(o, /*validate=*/false);
    return render_report(verify_presentation(t), o.format);
}

int cmd_geometry_validate(const CommonOpts& o) {
    if (o.geometry.empty()) throw config_error("geometry-validate needs --geometry <path>");
    const TargetGeometry t = load_target_file(o.geometry, /*validate=*/false);
    const PresentationReport report = verify_presentation(t);
    render_report(report, o.format);
    return report.ok() ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact genus-zero (orbifold) Gromov-Witten invariants from WDVV constraints"};
    app.require_subcommand(1);

    InvariantOpts inv;
    CLI::App* c_inv = app.add_subcommand("invariant", "Evaluate one correlator");
    add_common(c_inv, inv.common);
    c_inv->add_option("--ins", inv.insertions, "Comma-separated insertion class names, e.g. p,g,g,g")
        ->required();
    auto* deg = c_inv->add_option("--degree", inv.degree, "Curve degree as a rational, e.g. 1/2");
    c_inv->add_option("--degree-steps", inv.degree_steps, "Curve degree in minimal steps")
        ->check(CLI::NonNegativeNumber)
        ->excludes(deg);

    HodgeOpts hodge;
    CLI::App* c_hodge = app.add_subcommand("hodge-table", "Ladder values against the closed form");
    add_common(c_hodge, hodge.common);
    c_hodge->add_option("--gmax", hodge.gmax, "Largest genus row")->check(CLI::NonNegativeNumber);

    KontsevichOpts kont;
    kont.common.target = "p2";
    CLI::App* c_kont = app.add_subcommand("kontsevich", "Rational plane curve counts N_d");
    add_common(c_kont, kont.common);
    c_kont->add_option("--dmax", kont.dmax, "Largest degree")->check(CLI::PositiveNumber);

    AuditOpts audit;
    CLI::App* c_audit = app.add_subcommand("audit", "WDVV residual audit plus ring checks");
    add_common(c_audit, audit.common);
    c_audit->add_option("--max-extras", audit.bounds.max_extras, "Largest extras multiset size");
    c_audit->add_option("--max-degree-steps,--dmax", audit.bounds.max_degree_steps,
                        "Largest total degree in steps");
    c_audit->add_option("--min-degree-steps", audit.bounds.min_degree_steps,
                        "Smallest total degree in steps");
    c_audit->add_option("--extras", audit.extras_name, "Class repeated in the extras multiset");

    CommonOpts ring;
    CLI::App* c_ring = app.add_subcommand("ring-check", "Verify the target's ring presentation");
    add_common(c_ring, ring);

    CommonOpts geo;
    CLI::App* c_geo = app.add_subcommand("geometry-validate", "Validate a geometry config file");
    add_common(c_geo, geo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 64;
    }

    try {
        if (c_inv->parsed()) {
            if (inv.degree.empty() && inv.degree_steps < 0)
                throw config_error("invariant needs --degree or --degree-steps");
            return cmd_invariant(inv);
        }
        if (c_hodge->parsed()) return cmd_hodge_table(hodge);
        if (c_kont->parsed()) return cmd_kontsevich(kont);
        if (c_audit->parsed()) return cmd_audit(audit);
        if (c_ring->parsed()) return cmd_ring_check(ring);
        if (c_geo->parsed()) return cmd_geometry_validate(geo);
    } catch (const unknown_class_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const unsolvable_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const cycle_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 70;
    }
    return 64;
}
