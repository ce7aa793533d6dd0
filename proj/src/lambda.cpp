#include "ealinfer/lambda.hpp"

#include <map>
#include <optional>
#include <set>

namespace eal {

TermPtr mk_var(std::string name) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Var;
    t->name = std::move(name);
    return t;
}

TermPtr mk_abs(std::string binder, TermPtr body) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Abs;
    t->name = std::move(binder);
    t->sub1 = std::move(body);
    return t;
}

TermPtr mk_app(TermPtr fun, TermPtr arg) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::App;
    t->sub1 = std::move(fun);
    t->sub2 = std::move(arg);
    return t;
}

//--------------------------------------------------------------------------
// Parsing

namespace {

struct Parser {
    const std::string& src;
    size_t pos = 0;

    explicit Parser(const std::string& s) : src(s) {}

    void skip_ws() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' ||
                                    src[pos] == '\n' || src[pos] == '\r'))
            ++pos;
    }

    bool at_lambda() {
        if (pos < src.size() && src[pos] == '\\') return true;
        // utf-8 lambda = 0xCE 0xBB
        return pos + 1 < src.size() &&
               static_cast<unsigned char>(src[pos]) == 0xCE &&
               static_cast<unsigned char>(src[pos + 1]) == 0xBB;
    }

    void eat_lambda() {
        if (src[pos] == '\\') { ++pos; return; }
        pos += 2;
    }

    static bool ident_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool ident_char(char c) {
        return ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
    }

    std::string ident() {
        skip_ws();
        if (pos >= src.size() || !ident_start(src[pos]))
            throw SyntaxError("expected identifier", pos);
        size_t start = pos;
        while (pos < src.size() && ident_char(src[pos])) ++pos;
        return src.substr(start, pos - start);
    }

    // item := ident | '(' seq ')' | lambda
    // The lambda body is the next single item (the paper's minimal-scope rule).
    TermPtr item() {
        skip_ws();
        if (pos >= src.size()) throw SyntaxError("unexpected end of input", pos);
        if (at_lambda()) {
            eat_lambda();
            std::string binder = ident();
            skip_ws();
            if (pos >= src.size() || src[pos] != '.')
                throw SyntaxError("expected '.' after binder", pos);
            ++pos;
            return mk_abs(binder, item());
        }
        if (src[pos] == '(') {
            size_t open = pos;
            ++pos;
            TermPtr inner = seq();
            skip_ws();
            if (pos >= src.size() || src[pos] != ')')
                throw SyntaxError("unbalanced '('", open);
            ++pos;
            return inner;
        }
        return mk_var(ident());
    }

    // seq := item+  (left-associative application)
    TermPtr seq() {
        TermPtr acc = item();
        for (;;) {
            skip_ws();
            if (pos >= src.size() || src[pos] == ')') return acc;
            acc = mk_app(acc, item());
        }
    }
};

TermPtr renumber_rec(const TermPtr& t, const std::string& path) {
    switch (t->kind) {
        case Term::Kind::Var: {
            auto v = mk_var(t->name);
            const_cast<Term*>(v.get())->occ = OccId{path};
            return v;
        }
        case Term::Kind::Abs:
            return mk_abs(t->name, renumber_rec(t->sub1, path + "b"));
        case Term::Kind::App:
            return mk_app(renumber_rec(t->sub1, path + "f"),
                          renumber_rec(t->sub2, path + "a"));
    }
    throw std::logic_error("bad term kind");
}

}  // namespace

TermPtr renumber(const TermPtr& t) { return renumber_rec(t, ""); }

TermPtr parse_term(const std::string& text) {
    Parser p(text);
    TermPtr t = p.seq();
    p.skip_ws();
    if (p.pos != text.size()) throw SyntaxError("trailing input", p.pos);
    return renumber(t);
}

std::string format(const TermPtr& t) {
    switch (t->kind) {
        case Term::Kind::Var: return t->name;
        case Term::Kind::Abs: return "\\" + t->name + "." + format(t->sub1);
        case Term::Kind::App: return "(" + format(t->sub1) + " " + format(t->sub2) + ")";
    }
    throw std::logic_error("bad term kind");
}

//--------------------------------------------------------------------------
// Occurrences and substitution

namespace {

void fvo_rec(const TermPtr& t, std::vector<std::pair<std::string, OccId>>& out) {
    switch (t->kind) {
        case Term::Kind::Var:
            out.emplace_back(t->name, t->occ);
            return;
        case Term::Kind::Abs: {
            std::vector<std::pair<std::string, OccId>> inner;
            fvo_rec(t->sub1, inner);
            for (auto& p : inner)
                if (p.first != t->name) out.push_back(std::move(p));
            return;
        }
        case Term::Kind::App:
            fvo_rec(t->sub1, out);
            fvo_rec(t->sub2, out);
            return;
    }
}

}  // namespace

std::vector<std::pair<std::string, OccId>> fvo(const TermPtr& t) {
    std::vector<std::pair<std::string, OccId>> out;
    fvo_rec(t, out);
    return out;
}

std::vector<std::string> free_vars(const TermPtr& t) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (auto& [name, occ] : fvo(t))
        if (seen.insert(name).second) out.push_back(name);
    return out;
}

namespace {

void collect_names(const TermPtr& t, std::set<std::string>& out) {
    switch (t->kind) {
        case Term::Kind::Var: out.insert(t->name); return;
        case Term::Kind::Abs:
            out.insert(t->name);
            collect_names(t->sub1, out);
            return;
        case Term::Kind::App:
            collect_names(t->sub1, out);
            collect_names(t->sub2, out);
            return;
    }
}

std::string fresh_name(const std::string& base, std::set<std::string>& used) {
    std::string cand = base + "'";
    while (used.count(cand)) cand += "'";
    used.insert(cand);
    return cand;
}

TermPtr subst_rec(const TermPtr& body, const std::string& name, const TermPtr& repl,
                  const std::set<std::string>& repl_fv, std::set<std::string>& used) {
    switch (body->kind) {
        case Term::Kind::Var:
            return body->name == name ? repl : body;
        case Term::Kind::Abs: {
            if (body->name == name) return body;
            if (repl_fv.count(body->name)) {
                // rename the binder away from the replacement's free variables
                std::string nn = fresh_name(body->name, used);
                TermPtr renamed = subst_rec(body->sub1, body->name, mk_var(nn),
                                            std::set<std::string>{nn}, used);
                return mk_abs(nn, subst_rec(renamed, name, repl, repl_fv, used));
            }
            return mk_abs(body->name, subst_rec(body->sub1, name, repl, repl_fv, used));
        }
        case Term::Kind::App:
            return mk_app(subst_rec(body->sub1, name, repl, repl_fv, used),
                          subst_rec(body->sub2, name, repl, repl_fv, used));
    }
    throw std::logic_error("bad term kind");
}

}  // namespace

TermPtr subst(const TermPtr& body, const std::string& name, const TermPtr& replacement) {
    std::set<std::string> used;
    collect_names(body, used);
    collect_names(replacement, used);
    std::set<std::string> repl_fv;
    for (auto& n : free_vars(replacement)) repl_fv.insert(n);
    return renumber(subst_rec(body, name, replacement, repl_fv, used));
}

namespace {

TermPtr subst_multi_rec(const TermPtr& body, const std::map<std::string, TermPtr>& repl,
                        const std::set<std::string>& repl_fv, std::set<std::string>& used) {
    switch (body->kind) {
        case Term::Kind::Var: {
            auto it = repl.find(body->name);
            return it != repl.end() ? it->second : body;
        }
        case Term::Kind::Abs: {
            std::map<std::string, TermPtr> inner = repl;
            inner.erase(body->name);
            if (inner.empty()) return body;
            if (repl_fv.count(body->name)) {
                std::string nn = fresh_name(body->name, used);
                TermPtr renamed = subst_rec(body->sub1, body->name, mk_var(nn),
                                            std::set<std::string>{nn}, used);
                return mk_abs(nn, subst_multi_rec(renamed, inner, repl_fv, used));
            }
            return mk_abs(body->name, subst_multi_rec(body->sub1, inner, repl_fv, used));
        }
        case Term::Kind::App:
            return mk_app(subst_multi_rec(body->sub1, repl, repl_fv, used),
                          subst_multi_rec(body->sub2, repl, repl_fv, used));
    }
    throw std::logic_error("bad term kind");
}

}  // namespace

TermPtr subst_multi(const TermPtr& body, const std::map<std::string, TermPtr>& repl) {
    std::set<std::string> used;
    collect_names(body, used);
    std::set<std::string> repl_fv;
    for (auto& [n, t] : repl) {
        collect_names(t, used);
        for (auto& f : free_vars(t)) repl_fv.insert(f);
    }
    return renumber(subst_multi_rec(body, repl, repl_fv, used));
}

namespace {

bool alpha_rec(const TermPtr& a, const TermPtr& b,
               std::map<std::string, std::string>& ab,
               std::map<std::string, std::string>& ba, int& counter) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Term::Kind::Var: {
            auto ia = ab.find(a->name);
            auto ib = ba.find(b->name);
            if (ia == ab.end() && ib == ba.end()) return a->name == b->name;  // both free
            if (ia == ab.end() || ib == ba.end()) return false;
            return ia->second == ib->second;
        }
        case Term::Kind::Abs: {
            std::string tag = "#" + std::to_string(counter++);
            auto sa = ab.find(a->name) != ab.end() ? std::optional(ab[a->name]) : std::nullopt;
            auto sb = ba.find(b->name) != ba.end() ? std::optional(ba[b->name]) : std::nullopt;
            ab[a->name] = tag;
            ba[b->name] = tag;
            bool ok = alpha_rec(a->sub1, b->sub1, ab, ba, counter);
            if (sa) ab[a->name] = *sa; else ab.erase(a->name);
            if (sb) ba[b->name] = *sb; else ba.erase(b->name);
            return ok;
        }
        case Term::Kind::App:
            return alpha_rec(a->sub1, b->sub1, ab, ba, counter) &&
                   alpha_rec(a->sub2, b->sub2, ab, ba, counter);
    }
    return false;
}

}  // namespace

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
    std::map<std::string, std::string> ab, ba;
    int counter = 0;
    return alpha_rec(a, b, ab, ba, counter);
}

TermPtr subterm_at(const TermPtr& t, const OccId& node) {
    TermPtr cur = t;
    for (char c : node.path) {
        switch (c) {
            case 'b': case 'f': cur = cur->sub1; break;
            case 'a': cur = cur->sub2; break;
            default: throw std::logic_error("bad path step");
        }
        if (!cur) throw std::logic_error("path walks off the term");
    }
    return cur;
}

int term_size(const TermPtr& t) {
    switch (t->kind) {
        case Term::Kind::Var: return 1;
        case Term::Kind::Abs: return 1 + term_size(t->sub1);
        case Term::Kind::App: return 1 + term_size(t->sub1) + term_size(t->sub2);
    }
    return 0;
}

}  // namespace eal
