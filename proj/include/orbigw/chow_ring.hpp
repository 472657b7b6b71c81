#pragma once

// A target geometry: graded basis over untwisted and twisted sectors, the
// Poincare pairing, the cup-product table, the degree lattice and the
// first-Chern pairing, together with the consistency checks that make the
// data a ring. Everything is table-driven; nothing is derived from fans or
// weights.

#include <orbigw/errors.hpp>
#include <orbigw/rational.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace orbigw {

enum class Sector { untwisted, twisted };

struct BasisClass {
    int index = 0;
    std::string name;
    int cr_degree = 0; // Chen-Ruan (age-shifted) complex degree
    Sector sector = Sector::untwisted;
};

// Coefficient vector over the basis of one target.
struct ChowClass {
    std::vector<Rational> coeff;

    explicit ChowClass(std::size_t n = 0) : coeff(n) {}

    bool is_zero() const {
        return std::all_of(coeff.begin(), coeff.end(),
                           [](const Rational& c) { return c.is_zero(); });
    }

    friend bool operator==(const ChowClass& a, const ChowClass& b) { return a.coeff == b.coeff; }

    friend ChowClass operator+(const ChowClass& a, const ChowClass& b) {
        ChowClass r(a.coeff.size());
        for (std::size_t i = 0; i < a.coeff.size(); ++i) r.coeff[i] = a.coeff[i] + b.coeff[i];
        return r;
    }
    friend ChowClass operator-(const ChowClass& a, const ChowClass& b) {
        ChowClass r(a.coeff.size());
        for (std::size_t i = 0; i < a.coeff.size(); ++i) r.coeff[i] = a.coeff[i] - b.coeff[i];
        return r;
    }
    friend ChowClass operator*(const Rational& s, const ChowClass& a) {
        ChowClass r(a.coeff.size());
        for (std::size_t i = 0; i < a.coeff.size(); ++i) r.coeff[i] = s * a.coeff[i];
        return r;
    }
};

using Matrix = std::vector<std::vector<Rational>>;

// Exact Gauss-Jordan; empty optional when singular.
inline std::optional<Matrix> invert_matrix(Matrix m) {
    const std::size_t n = m.size();
    Matrix inv(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && m[pivot][col].is_zero()) ++pivot;
        if (pivot == n) return std::nullopt;
        std::swap(m[pivot], m[col]);
        std::swap(inv[pivot], inv[col]);
        const Rational p = m[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || m[row][col].is_zero()) continue;
            const Rational f = m[row][col];
            for (std::size_t j = 0; j < n; ++j) {
                m[row][j] -= f * m[col][j];
                inv[row][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

struct SeedData {
    std::vector<int> insertions; // basis indices, unsorted as configured
    int degree_steps = 0;
    Rational value;
};

// Declared ring relation lhs_i*lhs_j = rhs_i*rhs_j, checked by
// verify_presentation.
struct RingRelation {
    int lhs_i, lhs_j, rhs_i, rhs_j;
    std::string text;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct PresentationReport {
    std::vector<CheckResult> checks;

    bool ok() const {
        return std::all_of(checks.begin(), checks.end(),
                           [](const CheckResult& c) { return c.pass; });
    }
};

class TargetGeometry;
inline PresentationReport verify_presentation(const TargetGeometry& t);

class TargetGeometry {
public:
    // Raw data handed over by the config loader.
    struct Data {
        std::string name;
        int dim = 0;
        Rational degree_step;
        Rational c1_per_step;
        std::vector<BasisClass> basis;
        Matrix pairing;
        std::vector<ChowClass> products; // row-major over basis pairs
        std::set<std::string> vanishing_rules;
        std::vector<SeedData> seeds;
        std::vector<RingRelation> relations;
    };

    // validate=false constructs without the algebraic checks; used by the
    // validator CLI and by fault-injection tests to obtain a report instead
    // of an exception.
    static TargetGeometry build(Data data, bool validate = true) {
        TargetGeometry t(std::move(data));
        t.check_structure();
        t.pairing_inv_ = invert_matrix(t.d_.pairing);
        if (validate) {
            const PresentationReport report = verify_presentation(t);
            for (const CheckResult& c : report.checks)
                if (!c.pass)
                    throw config_error("target \"" + t.d_.name + "\" failed check [" + c.name +
                                       "]: " + c.detail);
        }
        return t;
    }

    const std::string& name() const { return d_.name; }
    int dim() const { return d_.dim; }
    const Rational& degree_step() const { return d_.degree_step; }
    const Rational& c1_per_step() const { return d_.c1_per_step; }
    const std::vector<BasisClass>& basis() const { return d_.basis; }
    int size() const { return static_cast<int>(d_.basis.size()); }
    const Matrix& pairing_matrix() const { return d_.pairing; }
    const std::vector<SeedData>& seeds() const { return d_.seeds; }
    const std::vector<RingRelation>& relations() const { return d_.relations; }
    const std::set<std::string>& vanishing_rules() const { return d_.vanishing_rules; }
    bool has_rule(const std::string& tag) const { return d_.vanishing_rules.count(tag) > 0; }

    int unit_index() const { return 0; }
    int point_index() const { return point_; }

    const std::string& class_name(int i) const { return d_.basis.at(static_cast<std::size_t>(i)).name; }
    int cr_degree(int i) const { return d_.basis.at(static_cast<std::size_t>(i)).cr_degree; }
    bool twisted(int i) const {
        return d_.basis.at(static_cast<std::size_t>(i)).sector == Sector::twisted;
    }
    // Insertions the divisor axiom strips: untwisted, Chen-Ruan degree 1.
    bool is_divisor(int i) const { return !twisted(i) && cr_degree(i) == 1; }

    int class_index(const std::string& name) const {
        for (const BasisClass& b : d_.basis)
            if (b.name == name) return b.index;
        throw unknown_class_error("target \"" + d_.name + "\" has no class named \"" + name + "\"");
    }

    ChowClass basis_vector(int i) const {
        ChowClass c(d_.basis.size());
        c.coeff[static_cast<std::size_t>(i)] = Rational(1);
        return c;
    }

    const ChowClass& product_entry(int i, int j) const {
        return d_.products[static_cast<std::size_t>(i) * d_.basis.size() + static_cast<std::size_t>(j)];
    }

    // Bilinear extension of the product table.
    ChowClass multiply(const ChowClass& a, const ChowClass& b) const {
        ChowClass r(d_.basis.size());
        for (int i = 0; i < size(); ++i) {
            if (a.coeff[static_cast<std::size_t>(i)].is_zero()) continue;
            for (int j = 0; j < size(); ++j) {
                if (b.coeff[static_cast<std::size_t>(j)].is_zero()) continue;
                const Rational f =
                    a.coeff[static_cast<std::size_t>(i)] * b.coeff[static_cast<std::size_t>(j)];
                const ChowClass& e = product_entry(i, j);
                for (std::size_t k = 0; k < r.coeff.size(); ++k) r.coeff[k] += f * e.coeff[k];
            }
        }
        return r;
    }

    Rational pair(const ChowClass& a, const ChowClass& b) const {
        Rational r;
        for (int i = 0; i < size(); ++i) {
            if (a.coeff[static_cast<std::size_t>(i)].is_zero()) continue;
            for (int j = 0; j < size(); ++j)
                r += a.coeff[static_cast<std::size_t>(i)] * d_.pairing[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                     b.coeff[static_cast<std::size_t>(j)];
        }
        return r;
    }

    // Integral against the point class: the point-class coefficient.
    Rational integral(const ChowClass& a) const {
        return a.coeff[static_cast<std::size_t>(point_)];
    }

    // Exact inverse of the pairing matrix, cached at build.
    const Matrix& pairing_inverse() const {
        if (!pairing_inv_) throw config_error("target \"" + d_.name + "\": pairing is degenerate");
        return *pairing_inv_;
    }
    bool pairing_nondegenerate() const { return pairing_inv_.has_value(); }

    // Basis pairs with nonzero inverse-pairing entry, for WDVV contractions.
    std::vector<std::pair<int, int>> dual_pairs() const {
        std::vector<std::pair<int, int>> out;
        const Matrix& inv = pairing_inverse();
        for (int mu = 0; mu < size(); ++mu)
            for (int nu = 0; nu < size(); ++nu)
                if (!inv[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)].is_zero())
                    out.emplace_back(mu, nu);
        return out;
    }

    // Curve degree represented by a step count.
    Rational degree_of(DegreeSteps d) const { return Rational(d.steps) * d_.degree_step; }

    // Value of the divisor axiom factor: the integral of the canonical
    // divisor generator over the class of d steps equals the curve degree.
    Rational divisor_integral(DegreeSteps d) const { return degree_of(d); }

private:
    explicit TargetGeometry(Data data) : d_(std::move(data)) {}

    void check_structure() {
        const std::size_t n = d_.basis.size();
        if (n == 0) throw config_error("empty basis");
        for (std::size_t i = 0; i < n; ++i)
            if (d_.basis[i].index != static_cast<int>(i))
                throw config_error("basis indices must be contiguous from 0");
        const BasisClass& unit = d_.basis[0];
        if (unit.cr_degree != 0 || unit.sector != Sector::untwisted)
            throw config_error("basis class 0 must be the untwisted unit of degree 0");
        for (std::size_t i = 1; i < n; ++i)
            if (d_.basis[i].cr_degree == 0)
                throw config_error("only the unit may have degree 0 (class \"" +
                                   d_.basis[i].name + "\")");
        point_ = -1;
        for (const BasisClass& b : d_.basis) {
            if (b.sector == Sector::untwisted && b.cr_degree == d_.dim) {
                if (point_ >= 0) throw config_error("more than one point class");
                point_ = b.index;
            }
            if (b.cr_degree < 0 || b.cr_degree > d_.dim)
                throw config_error("class \"" + b.name + "\" has degree outside [0, dim]");
        }
        if (point_ < 0) throw config_error("no untwisted class of top degree (point class)");
        if (d_.pairing.size() != n) throw config_error("pairing matrix has wrong size");
        for (const auto& row : d_.pairing)
            if (row.size() != n) throw config_error("pairing matrix has wrong size");
        if (d_.products.size() != n * n) throw config_error("product table has wrong size");
        for (const ChowClass& c : d_.products)
            if (c.coeff.size() != n) throw config_error("product table entry has wrong length");
        if (!(Rational(0) < d_.degree_step)) throw config_error("degree_step must be positive");
        static const std::set<std::string> known_rules = {"deg0-gamma-pair", "deg0-mixed-sector",
                                                          "deg0-n4", "parity"};
        for (const std::string& tag : d_.vanishing_rules)
            if (!known_rules.count(tag)) throw config_error("unknown vanishing rule \"" + tag + "\"");
        for (const SeedData& s : d_.seeds) {
            if (s.degree_steps < 0) throw config_error("seed with negative degree");
            for (int i : s.insertions)
                if (i < 0 || i >= static_cast<int>(n)) throw config_error("seed names unknown class");
        }
    }

    Data d_;
    int point_ = -1;
    std::optional<Matrix> pairing_inv_;
};

inline std::string class_to_string(const ChowClass& c, const TargetGeometry& t) {
    std::string out;
    for (int i = 0; i < t.size(); ++i) {
        const Rational& r = c.coeff[static_cast<std::size_t>(i)];
        if (r.is_zero()) continue;
        if (!out.empty()) out += " + ";
        if (r == Rational(1))
            out += t.class_name(i);
        else
            out += "(" + r.str() + ")" + t.class_name(i);
    }
    return out.empty() ? "0" : out;
}

// Algebraic consistency of a target: ring axioms, pairing duality, declared
// relations. Build runs this and refuses inconsistent data; the validator
// CLI renders the same report.
inline PresentationReport verify_presentation(const TargetGeometry& t) {
    PresentationReport rep;
    const int n = t.size();
    auto add = [&](std::string name, bool pass, std::string detail) {
        rep.checks.push_back({std::move(name), pass, std::move(detail)});
    };

    // unit row
    {
        bool ok = true;
        std::string detail = "1 * e = e for every basis class e";
        for (int j = 0; j < n && ok; ++j)
            if (!(t.product_entry(0, j) == t.basis_vector(j))) {
                ok = false;
                detail = "1 * " + t.class_name(j) + " != " + t.class_name(j);
            }
        add("unit", ok, detail);
    }
    // commutativity
    {
        bool ok = true;
        std::string detail = "product table is symmetric";
        for (int i = 0; i < n && ok; ++i)
            for (int j = i + 1; j < n && ok; ++j)
                if (!(t.product_entry(i, j) == t.product_entry(j, i))) {
                    ok = false;
                    detail = t.class_name(i) + "*" + t.class_name(j) + " != " + t.class_name(j) +
                             "*" + t.class_name(i);
                }
        add("commutativity", ok, detail);
    }
    // grading: e_i * e_j supported in degree cr(i)+cr(j)
    {
        bool ok = true;
        std::string detail = "products respect the Chen-Ruan grading";
        for (int i = 0; i < n && ok; ++i)
            for (int j = 0; j < n && ok; ++j) {
                const int want = t.cr_degree(i) + t.cr_degree(j);
                const ChowClass& p = t.product_entry(i, j);
                for (int k = 0; k < n; ++k)
                    if (!p.coeff[static_cast<std::size_t>(k)].is_zero() && t.cr_degree(k) != want) {
                        ok = false;
                        detail = t.class_name(i) + "*" + t.class_name(j) + " has support in degree " +
                                 std::to_string(t.cr_degree(k)) + ", expected " + std::to_string(want);
                        break;
                    }
            }
        add("grading", ok, detail);
    }
    // associativity, exhaustive over basis triples
    {
        bool ok = true;
        std::string detail = "(e_i*e_j)*e_k = e_i*(e_j*e_k) for all triples";
        for (int i = 0; i < n && ok; ++i)
            for (int j = 0; j < n && ok; ++j)
                for (int k = 0; k < n && ok; ++k) {
                    const ChowClass lhs = t.multiply(t.product_entry(i, j), t.basis_vector(k));
                    const ChowClass rhs = t.multiply(t.basis_vector(i), t.product_entry(j, k));
                    if (!(lhs == rhs)) {
                        ok = false;
                        detail = "associativity fails on (" + t.class_name(i) + ", " +
                                 t.class_name(j) + ", " + t.class_name(k) + ")";
                    }
                }
        add("associativity", ok, detail);
    }
    // pairing symmetry
    {
        bool ok = true;
        std::string detail = "pairing matrix is symmetric";
        for (int i = 0; i < n && ok; ++i)
            for (int j = i + 1; j < n && ok; ++j)
                if (!(t.pairing_matrix()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
                      t.pairing_matrix()[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])) {
                    ok = false;
                    detail = "pairing(" + t.class_name(i) + ", " + t.class_name(j) + ") asymmetric";
                }
        add("pairing-symmetric", ok, detail);
    }
    // pairing agrees with the integral of the product
    {
        bool ok = true;
        std::string detail = "pairing(a, b) = integral of a*b";
        for (int i = 0; i < n && ok; ++i)
            for (int j = 0; j < n && ok; ++j) {
                const Rational lhs =
                    t.pairing_matrix()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                const Rational rhs = t.integral(t.product_entry(i, j));
                if (lhs != rhs) {
                    ok = false;
                    detail = "pairing(" + t.class_name(i) + ", " + t.class_name(j) + ") = " +
                             lhs.str() + " but integral of the product is " + rhs.str();
                    break;
                }
            }
        add("pairing-product", ok, detail);
    }
    // nondegeneracy / Poincare duality
    add("pairing-nondegenerate", t.pairing_nondegenerate(),
        t.pairing_nondegenerate() ? "pairing matrix is invertible over the rationals"
                                  : "pairing matrix is singular");
    // declared relations
    for (const RingRelation& rel : t.relations()) {
        const ChowClass residual = t.multiply(t.basis_vector(rel.lhs_i), t.basis_vector(rel.lhs_j)) -
                                   t.multiply(t.basis_vector(rel.rhs_i), t.basis_vector(rel.rhs_j));
        add("relation " + rel.text, residual.is_zero(),
            residual.is_zero() ? "holds in the ring" : "residual " + class_to_string(residual, t));
    }
    return rep;
}

} // namespace orbigw
