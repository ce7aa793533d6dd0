#include "ealinfer/eal_types.hpp"

#include <algorithm>
#include <cctype>

namespace eal {

VarId VarTable::fresh(VarOrigin origin) {
    int idx = ++counters_[static_cast<int>(origin)];
    info_.emplace_back(origin, idx);
    return static_cast<VarId>(info_.size() - 1);
}

std::string VarTable::name(VarId v) const {
    auto& [origin, idx] = info_.at(static_cast<size_t>(v));
    static const char* prefix[] = {"p", "b", "c", "n"};
    return prefix[static_cast<int>(origin)] + std::to_string(idx);
}

int LinExpr::coeff(VarId v) const {
    for (auto& [var, c] : terms)
        if (var == v) return c;
    return 0;
}

LinExpr& LinExpr::add(const LinExpr& other, int scale) {
    std::vector<std::pair<VarId, int>> merged;
    merged.reserve(terms.size() + other.terms.size());
    size_t i = 0, j = 0;
    while (i < terms.size() || j < other.terms.size()) {
        if (j >= other.terms.size() || (i < terms.size() && terms[i].first < other.terms[j].first)) {
            merged.push_back(terms[i++]);
        } else if (i >= terms.size() || other.terms[j].first < terms[i].first) {
            merged.emplace_back(other.terms[j].first, other.terms[j].second * scale);
            ++j;
        } else {
            int c = terms[i].second + other.terms[j].second * scale;
            if (c != 0) merged.emplace_back(terms[i].first, c);
            ++i;
            ++j;
        }
    }
    terms = std::move(merged);
    constant += other.constant * scale;
    return *this;
}

LinExpr LinExpr::plus(const LinExpr& other) const {
    LinExpr r = *this;
    r.add(other);
    return r;
}

LinExpr LinExpr::minus(const LinExpr& other) const {
    LinExpr r = *this;
    r.add(other, -1);
    return r;
}

long LinExpr::eval(const Valuation& valuation) const {
    long acc = constant;
    for (auto& [v, c] : terms) {
        auto it = valuation.find(v);
        if (it == valuation.end()) throw MissingVariable("no value for variable id " + std::to_string(v));
        acc += static_cast<long>(c) * it->second;
    }
    return acc;
}

std::string lin_format(const LinExpr& e, const VarTable& vars) {
    if (e.terms.empty() && e.constant == 0) return "0";
    std::string out;
    bool first = true;
    for (auto& [v, c] : e.terms) {
        if (c >= 0 && !first) out += "+";
        if (c == -1) out += "-";
        else if (c != 1) out += std::to_string(c) + "*";
        out += vars.name(v);
        first = false;
    }
    if (e.constant != 0) {
        if (e.constant > 0 && !first) out += "+";
        out += std::to_string(e.constant);
    }
    return out;
}

//--------------------------------------------------------------------------

EalPtr eal_atom(LinExpr expo, std::string atom) {
    auto t = std::make_shared<EalType>();
    t->expo = std::move(expo);
    t->atom = std::move(atom);
    return t;
}

EalPtr eal_arrow(LinExpr expo, EalPtr left, EalPtr right) {
    auto t = std::make_shared<EalType>();
    t->expo = std::move(expo);
    t->is_arrow = true;
    t->left = std::move(left);
    t->right = std::move(right);
    return t;
}

EalPtr eal_bang(const LinExpr& e, const EalPtr& t) {
    auto r = std::make_shared<EalType>(*t);
    r->expo = t->expo.plus(e);
    return r;
}

bool eal_eq(const EalPtr& a, const EalPtr& b) {
    if (a->is_arrow != b->is_arrow || !(a->expo == b->expo)) return false;
    if (!a->is_arrow) return a->atom == b->atom;
    return eal_eq(a->left, b->left) && eal_eq(a->right, b->right);
}

EalPtr proc_P(const STPtr& sigma, VarTable& vars) {
    LinExpr p = LinExpr::var(vars.fresh(VarOrigin::P));
    if (sigma->kind == SimpleType::Kind::Arrow) {
        EalPtr l = proc_P(sigma->left, vars);
        EalPtr r = proc_P(sigma->right, vars);
        return eal_arrow(std::move(p), std::move(l), std::move(r));
    }
    return eal_atom(std::move(p), sigma->name);
}

STPtr erase_type(const EalPtr& theta) {
    if (!theta->is_arrow)
        return theta->atom == "o" ? st_base() : st_var(theta->atom);
    return st_arrow(erase_type(theta->left), erase_type(theta->right));
}

namespace {

void unify_rec(const std::vector<EalPtr>& types, std::vector<LinExpr>& rows) {
    for (size_t i = 0; i + 1 < types.size(); ++i) {
        if (types[i]->is_arrow != types[i + 1]->is_arrow ||
            (!types[i]->is_arrow && types[i]->atom != types[i + 1]->atom))
            throw ShapeMismatch("unification over distinct shapes");
        rows.push_back(types[i]->expo.minus(types[i + 1]->expo));
    }
    if (types[0]->is_arrow) {
        std::vector<EalPtr> lefts, rights;
        for (auto& t : types) {
            lefts.push_back(t->left);
            rights.push_back(t->right);
        }
        unify_rec(lefts, rows);
        unify_rec(rights, rows);
    }
}

}  // namespace

std::vector<LinExpr> unify_rows(const std::vector<EalPtr>& types) {
    if (types.size() < 2) throw std::logic_error("unify_rows needs >= 2 types");
    std::vector<LinExpr> rows;
    unify_rec(types, rows);
    return rows;
}

ContractionRows contract_C(const std::vector<EalPtr>& types) {
    ContractionRows out;
    if (types.size() <= 1) return out;
    out.has_ge1 = true;
    out.ge1 = types[0]->expo;
    out.eq0 = unify_rows(types);
    return out;
}

EalPtr instantiate(const EalPtr& theta, const Valuation& x) {
    long v = theta->expo.eval(x);
    if (v < 0) throw std::runtime_error("negative exponent under valuation");
    if (!theta->is_arrow) return eal_atom(LinExpr::of_constant(v), theta->atom);
    return eal_arrow(LinExpr::of_constant(v), instantiate(theta->left, x),
                     instantiate(theta->right, x));
}

bool is_concrete(const EalPtr& t) {
    if (!t->expo.empty_vars() || t->expo.constant < 0) return false;
    if (!t->is_arrow) return true;
    return is_concrete(t->left) && is_concrete(t->right);
}

void vars_of(const EalPtr& t, std::vector<VarId>& out) {
    for (auto& [v, c] : t->expo.terms) out.push_back(v);
    if (t->is_arrow) {
        vars_of(t->left, out);
        vars_of(t->right, out);
    }
}

//--------------------------------------------------------------------------
// Formatting and parsing

namespace {

std::string format_inner(const EalPtr& t, const VarTable* vars) {
    std::string expo;
    if (!t->expo.is_zero()) {
        if (vars) {
            expo = "!^{" + lin_format(t->expo, *vars) + "}";
        } else {
            for (long i = 0; i < t->expo.constant; ++i) expo += "!";
        }
    }
    if (!t->is_arrow) return expo + t->atom;
    std::string l = format_inner(t->left, vars);
    std::string r = format_inner(t->right, vars);
    return expo + "(" + l + " -o " + r + ")";
}

}  // namespace

std::string eal_format(const EalPtr& t, const VarTable& vars) {
    std::string s = format_inner(t, &vars);
    // drop redundant outermost parentheses of an unbanged arrow
    if (t->is_arrow && t->expo.is_zero())
        return s.substr(1, s.size() - 2);
    return s;
}

std::string eal_format_concrete(const EalPtr& t) {
    std::string s = format_inner(t, nullptr);
    if (t->is_arrow && t->expo.is_zero())
        return s.substr(1, s.size() - 2);
    return s;
}

namespace {

struct EalParser {
    const std::string& src;
    size_t pos = 0;

    void skip_ws() { while (pos < src.size() && src[pos] == ' ') ++pos; }

    long bangs() {
        long n = 0;
        for (;;) {
            skip_ws();
            if (pos < src.size() && src[pos] == '!') {
                ++pos;
                if (pos < src.size() && src[pos] == '^') {
                    ++pos;
                    skip_ws();
                    size_t start = pos;
                    while (pos < src.size() && isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
                    if (start == pos) throw SyntaxError("expected integer after !^", pos);
                    n += std::stol(src.substr(start, pos - start));
                } else {
                    n += 1;
                }
            } else {
                return n;
            }
        }
    }

    EalPtr atom_or_group() {
        skip_ws();
        long n = bangs();
        skip_ws();
        if (pos >= src.size()) throw SyntaxError("expected EAL type", pos);
        EalPtr t;
        if (src[pos] == '(') {
            ++pos;
            t = arrow();
            skip_ws();
            if (pos >= src.size() || src[pos] != ')') throw SyntaxError("unbalanced '('", pos);
            ++pos;
        } else {
            size_t start = pos;
            while (pos < src.size() &&
                   (isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
                ++pos;
            if (start == pos) throw SyntaxError("expected type atom", pos);
            std::string name = src.substr(start, pos - start);
            t = eal_atom(LinExpr{}, name);
        }
        return n ? eal_bang(LinExpr::of_constant(n), t) : t;
    }

    EalPtr arrow() {
        EalPtr lhs = atom_or_group();
        skip_ws();
        if (pos + 1 < src.size() && src[pos] == '-' && src[pos + 1] == 'o') {
            pos += 2;
            return eal_arrow(LinExpr{}, lhs, arrow());
        }
        return lhs;
    }
};

}  // namespace

EalPtr parse_concrete_eal(const std::string& text) {
    EalParser p{text};
    EalPtr t = p.arrow();
    p.skip_ws();
    if (p.pos != text.size()) throw SyntaxError("trailing input in EAL type", p.pos);
    return t;
}

//--------------------------------------------------------------------------
// General form: !^{n1+n5}(A -o B)

namespace {

struct GeneralParser {
    const std::string& src;
    const std::map<std::string, VarId>& names;
    size_t pos = 0;

    void skip_ws() { while (pos < src.size() && src[pos] == ' ') ++pos; }

    LinExpr expr_in_braces() {
        LinExpr e;
        for (;;) {
            skip_ws();
            int sign = 1;
            if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) {
                sign = src[pos] == '-' ? -1 : 1;
                ++pos;
                skip_ws();
            }
            size_t start = pos;
            if (pos < src.size() && isdigit(static_cast<unsigned char>(src[pos]))) {
                while (pos < src.size() && isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
                e.constant += sign * std::stol(src.substr(start, pos - start));
            } else {
                while (pos < src.size() &&
                       (isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
                    ++pos;
                if (start == pos) throw SyntaxError("expected variable in exponent", pos);
                std::string nm = src.substr(start, pos - start);
                auto it = names.find(nm);
                if (it == names.end()) throw SyntaxError("unknown box variable " + nm, start);
                LinExpr v = LinExpr::var(it->second);
                e.add(v, sign);
            }
            skip_ws();
            if (pos >= src.size() || (src[pos] != '+' && src[pos] != '-')) return e;
        }
    }

    LinExpr bangs() {
        LinExpr n;
        for (;;) {
            skip_ws();
            if (pos >= src.size() || src[pos] != '!') return n;
            ++pos;
            if (pos < src.size() && src[pos] == '^') {
                ++pos;
                skip_ws();
                if (pos < src.size() && src[pos] == '{') {
                    ++pos;
                    n.add(expr_in_braces());
                    skip_ws();
                    if (pos >= src.size() || src[pos] != '}')
                        throw SyntaxError("unbalanced '{'", pos);
                    ++pos;
                } else {
                    size_t start = pos;
                    while (pos < src.size() && isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
                    if (start == pos) throw SyntaxError("expected exponent after !^", pos);
                    n.constant += std::stol(src.substr(start, pos - start));
                }
            } else {
                n.constant += 1;
            }
        }
    }

    EalPtr atom_or_group() {
        LinExpr n = bangs();
        skip_ws();
        if (pos >= src.size()) throw SyntaxError("expected EAL type", pos);
        EalPtr t;
        if (src[pos] == '(') {
            ++pos;
            t = arrow();
            skip_ws();
            if (pos >= src.size() || src[pos] != ')') throw SyntaxError("unbalanced '('", pos);
            ++pos;
        } else {
            size_t start = pos;
            while (pos < src.size() &&
                   (isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
                ++pos;
            if (start == pos) throw SyntaxError("expected type atom", pos);
            t = eal_atom(LinExpr{}, src.substr(start, pos - start));
        }
        return eal_bang(n, t);
    }

    EalPtr arrow() {
        EalPtr lhs = atom_or_group();
        skip_ws();
        if (pos + 1 < src.size() && src[pos] == '-' && src[pos + 1] == 'o') {
            pos += 2;
            return eal_arrow(LinExpr{}, lhs, arrow());
        }
        return lhs;
    }
};

}  // namespace

EalPtr parse_general_eal(const std::string& text, const std::map<std::string, VarId>& names) {
    GeneralParser p{text, names};
    EalPtr t = p.arrow();
    p.skip_ws();
    if (p.pos != text.size()) throw SyntaxError("trailing input in EAL type", p.pos);
    return t;
}

std::map<std::string, VarId> name_map(const VarTable& vars) {
    std::map<std::string, VarId> out;
    for (VarId v = 0; v < vars.count(); ++v) out.emplace(vars.name(v), v);
    return out;
}

std::string eal_format_trace(const EalPtr& t, const VarTable& vars) {
    if (!t->is_arrow) return lin_format(t->expo, vars);
    std::string outer = t->expo.is_zero() ? "" : lin_format(t->expo, vars);
    return outer + "(" + eal_format_trace(t->left, vars) + " -o " +
           eal_format_trace(t->right, vars) + ")";
}

}  // namespace eal
