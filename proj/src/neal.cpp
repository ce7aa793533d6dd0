#include "ealinfer/neal.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace eal {

NealPtr nv(std::string name) {
    auto t = std::make_shared<NealTerm>();
    t->kind = NealTerm::Kind::Var;
    t->name = std::move(name);
    return t;
}

NealPtr nabs(std::string binder, NealPtr body, EalPtr annot) {
    auto t = std::make_shared<NealTerm>();
    t->kind = NealTerm::Kind::Abs;
    t->name = std::move(binder);
    t->annot = std::move(annot);
    t->sub1 = std::move(body);
    return t;
}

NealPtr napp(NealPtr fun, NealPtr arg) {
    auto t = std::make_shared<NealTerm>();
    t->kind = NealTerm::Kind::App;
    t->sub1 = std::move(fun);
    t->sub2 = std::move(arg);
    return t;
}

NealPtr npromote(NealPtr body, std::vector<std::pair<NealPtr, std::string>> subs) {
    auto t = std::make_shared<NealTerm>();
    t->kind = NealTerm::Kind::Promote;
    t->sub1 = std::move(body);
    t->subs = std::move(subs);
    return t;
}

NealPtr ncontract(NealPtr body, NealPtr shared, std::string x, std::string y) {
    auto t = std::make_shared<NealTerm>();
    t->kind = NealTerm::Kind::Contract;
    t->sub1 = std::move(body);
    t->sub2 = std::move(shared);
    t->c1 = std::move(x);
    t->c2 = std::move(y);
    return t;
}

std::set<std::string> neal_fv(const NealPtr& p) {
    switch (p->kind) {
        case NealTerm::Kind::Var: return {p->name};
        case NealTerm::Kind::Abs: {
            auto fv = neal_fv(p->sub1);
            fv.erase(p->name);
            return fv;
        }
        case NealTerm::Kind::App: {
            auto fv = neal_fv(p->sub1);
            for (auto& n : neal_fv(p->sub2)) fv.insert(n);
            return fv;
        }
        case NealTerm::Kind::Promote: {
            auto fv = neal_fv(p->sub1);
            for (auto& [arg, binder] : p->subs) fv.erase(binder);
            for (auto& [arg, binder] : p->subs)
                for (auto& n : neal_fv(arg)) fv.insert(n);
            return fv;
        }
        case NealTerm::Kind::Contract: {
            auto fv = neal_fv(p->sub1);
            fv.erase(p->c1);
            fv.erase(p->c2);
            for (auto& n : neal_fv(p->sub2)) fv.insert(n);
            return fv;
        }
    }
    return {};
}

namespace {

bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
    for (auto& x : a)
        if (b.count(x)) return false;
    return true;
}

}  // namespace

bool neal_legal(const NealPtr& p, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    switch (p->kind) {
        case NealTerm::Kind::Var: return true;
        case NealTerm::Kind::Abs: return neal_legal(p->sub1, why);
        case NealTerm::Kind::App:
            if (!neal_legal(p->sub1, why) || !neal_legal(p->sub2, why)) return false;
            if (!disjoint(neal_fv(p->sub1), neal_fv(p->sub2)))
                return fail("application parts share a free variable");
            return true;
        case NealTerm::Kind::Promote: {
            if (!neal_legal(p->sub1, why)) return false;
            std::set<std::string> binders;
            for (auto& [arg, binder] : p->subs) {
                if (!neal_legal(arg, why)) return false;
                if (!binders.insert(binder).second)
                    return fail("duplicate promote binder " + binder);
            }
            if (neal_fv(p->sub1) != binders)
                return fail("promote body free variables differ from its binders");
            for (size_t i = 0; i < p->subs.size(); ++i)
                for (size_t j = i + 1; j < p->subs.size(); ++j)
                    if (!disjoint(neal_fv(p->subs[i].first), neal_fv(p->subs[j].first)))
                        return fail("promote arguments share a free variable");
            return true;
        }
        case NealTerm::Kind::Contract:
            if (!neal_legal(p->sub1, why) || !neal_legal(p->sub2, why)) return false;
            if (p->c1 == p->c2) return fail("contraction binds one name twice");
            if (!disjoint(neal_fv(p->sub1), neal_fv(p->sub2)))
                return fail("contraction body and shared part share a free variable");
            return true;
    }
    return false;
}

//--------------------------------------------------------------------------
// Substitution

namespace {

void all_names(const NealPtr& p, std::set<std::string>& out) {
    switch (p->kind) {
        case NealTerm::Kind::Var: out.insert(p->name); return;
        case NealTerm::Kind::Abs:
            out.insert(p->name);
            all_names(p->sub1, out);
            return;
        case NealTerm::Kind::App:
            all_names(p->sub1, out);
            all_names(p->sub2, out);
            return;
        case NealTerm::Kind::Promote:
            all_names(p->sub1, out);
            for (auto& [arg, binder] : p->subs) {
                out.insert(binder);
                all_names(arg, out);
            }
            return;
        case NealTerm::Kind::Contract:
            out.insert(p->c1);
            out.insert(p->c2);
            all_names(p->sub1, out);
            all_names(p->sub2, out);
            return;
    }
}

struct Gensym {
    std::set<std::string> used;

    explicit Gensym(const NealPtr& scope) { all_names(scope, used); }
    Gensym(const NealPtr& a, const NealPtr& b) {
        all_names(a, used);
        all_names(b, used);
    }

    std::string fresh(const std::string& base) {
        std::string cand = base + "'";
        while (used.count(cand)) cand += "'";
        used.insert(cand);
        return cand;
    }
};

NealPtr rename_free(const NealPtr& p, const std::string& from, const std::string& to) {
    return neal_subst(p, from, nv(to));
}

NealPtr subst_rec(const NealPtr& p, const std::string& x, const NealPtr& m,
                  const std::set<std::string>& mfv, Gensym& gen) {
    switch (p->kind) {
        case NealTerm::Kind::Var:
            return p->name == x ? m : p;
        case NealTerm::Kind::Abs: {
            if (p->name == x) return p;
            if (mfv.count(p->name)) {
                std::string z = gen.fresh(p->name);
                NealPtr body = subst_rec(p->sub1, p->name, nv(z), {z}, gen);
                return nabs(z, subst_rec(body, x, m, mfv, gen), p->annot);
            }
            return nabs(p->name, subst_rec(p->sub1, x, m, mfv, gen), p->annot);
        }
        case NealTerm::Kind::App:
            return napp(subst_rec(p->sub1, x, m, mfv, gen),
                        subst_rec(p->sub2, x, m, mfv, gen));
        case NealTerm::Kind::Promote: {
            bool binds_x = false;
            for (auto& [arg, binder] : p->subs)
                if (binder == x) binds_x = true;
            std::vector<std::pair<NealPtr, std::string>> subs;
            if (binds_x) {
                for (auto& [arg, binder] : p->subs)
                    subs.emplace_back(subst_rec(arg, x, m, mfv, gen), binder);
                return npromote(p->sub1, std::move(subs));
            }
            NealPtr body = p->sub1;
            for (auto& [arg, binder] : p->subs) {
                std::string nb = binder;
                if (mfv.count(binder)) {
                    nb = gen.fresh(binder);
                    body = subst_rec(body, binder, nv(nb), {nb}, gen);
                }
                subs.emplace_back(subst_rec(arg, x, m, mfv, gen), nb);
            }
            return npromote(subst_rec(body, x, m, mfv, gen), std::move(subs));
        }
        case NealTerm::Kind::Contract: {
            if (p->c1 == x || p->c2 == x)
                return ncontract(p->sub1, subst_rec(p->sub2, x, m, mfv, gen), p->c1, p->c2);
            NealPtr body = p->sub1;
            std::string y = p->c1, z = p->c2;
            if (mfv.count(y)) {
                std::string ny = gen.fresh(y);
                body = subst_rec(body, y, nv(ny), {ny}, gen);
                y = ny;
            }
            if (mfv.count(z)) {
                std::string nz = gen.fresh(z);
                body = subst_rec(body, z, nv(nz), {nz}, gen);
                z = nz;
            }
            return ncontract(subst_rec(body, x, m, mfv, gen),
                             subst_rec(p->sub2, x, m, mfv, gen), y, z);
        }
    }
    throw std::logic_error("bad neal kind");
}

}  // namespace

NealPtr neal_subst(const NealPtr& p, const std::string& x, const NealPtr& m) {
    Gensym gen(p, m);
    std::set<std::string> mfv = neal_fv(m);
    return subst_rec(p, x, m, mfv, gen);
}

TermPtr erase_star(const NealPtr& p) {
    switch (p->kind) {
        case NealTerm::Kind::Var: return mk_var(p->name);
        case NealTerm::Kind::Abs: return mk_abs(p->name, erase_star(p->sub1));
        case NealTerm::Kind::App:
            return mk_app(erase_star(p->sub1), erase_star(p->sub2));
        case NealTerm::Kind::Promote: {
            std::map<std::string, TermPtr> repl;
            for (auto& [arg, binder] : p->subs) repl[binder] = erase_star(arg);
            return subst_multi(erase_star(p->sub1), repl);
        }
        case NealTerm::Kind::Contract: {
            TermPtr shared = erase_star(p->sub2);
            std::map<std::string, TermPtr> repl{{p->c1, shared}, {p->c2, shared}};
            return subst_multi(erase_star(p->sub1), repl);
        }
    }
    throw std::logic_error("bad neal kind");
}

//--------------------------------------------------------------------------
// Typechecking (Fig. 9 system, weakening implicit)

namespace {

EalPtr peel_bang(const EalPtr& t) {
    if (t->expo.constant < 1) return nullptr;
    auto r = std::make_shared<EalType>(*t);
    r->expo = LinExpr::of_constant(t->expo.constant - 1);
    return r;
}

EalPtr infer(const NealBasis& basis, const NealPtr& p);

void check(const NealBasis& basis, const NealPtr& p, const EalPtr& expected) {
    switch (p->kind) {
        case NealTerm::Kind::Abs: {
            if (!expected->is_arrow || expected->expo.constant != 0)
                throw IllTyped("abstraction checked against non-arrow type " +
                               eal_format_concrete(expected));
            if (p->annot && !eal_eq(p->annot, expected->left))
                throw IllTyped("binder annotation " + eal_format_concrete(p->annot) +
                               " clashes with expected domain " +
                               eal_format_concrete(expected->left));
            NealBasis inner = basis;
            inner[p->name] = expected->left;
            check(inner, p->sub1, expected->right);
            return;
        }
        case NealTerm::Kind::Promote: {
            EalPtr body_ty = peel_bang(expected);
            if (!body_ty)
                throw IllTyped("promotion checked against unbanged type " +
                               eal_format_concrete(expected));
            NealBasis inner;
            for (auto& [arg, binder] : p->subs) {
                EalPtr t = infer(basis, arg);
                EalPtr peeled = peel_bang(t);
                if (!peeled)
                    throw IllTyped("promote argument for " + binder + " has unbanged type " +
                                   eal_format_concrete(t));
                inner[binder] = peeled;
            }
            check(inner, p->sub1, body_ty);
            return;
        }
        case NealTerm::Kind::Contract: {
            EalPtr shared_ty = infer(basis, p->sub2);
            if (shared_ty->expo.constant < 1)
                throw IllTyped("contraction shares the unbanged type " +
                               eal_format_concrete(shared_ty));
            NealBasis inner = basis;
            inner[p->c1] = shared_ty;
            inner[p->c2] = shared_ty;
            check(inner, p->sub1, expected);
            return;
        }
        default: {
            EalPtr got = infer(basis, p);
            if (!eal_eq(got, expected))
                throw IllTyped("term has type " + eal_format_concrete(got) + ", expected " +
                               eal_format_concrete(expected));
        }
    }
}

EalPtr infer(const NealBasis& basis, const NealPtr& p) {
    switch (p->kind) {
        case NealTerm::Kind::Var: {
            auto it = basis.find(p->name);
            if (it == basis.end()) throw IllTyped("variable " + p->name + " not in basis");
            return it->second;
        }
        case NealTerm::Kind::Abs: {
            if (!p->annot)
                throw IllTyped("cannot infer the domain of \\" + p->name +
                               " without an annotation");
            NealBasis inner = basis;
            inner[p->name] = p->annot;
            return eal_arrow(LinExpr{}, p->annot, infer(inner, p->sub1));
        }
        case NealTerm::Kind::App: {
            EalPtr f = infer(basis, p->sub1);
            if (!f->is_arrow || f->expo.constant != 0)
                throw IllTyped("application of a term of non-arrow type " +
                               eal_format_concrete(f));
            check(basis, p->sub2, f->left);
            return f->right;
        }
        case NealTerm::Kind::Promote: {
            NealBasis inner;
            for (auto& [arg, binder] : p->subs) {
                EalPtr t = infer(basis, arg);
                EalPtr peeled = peel_bang(t);
                if (!peeled)
                    throw IllTyped("promote argument for " + binder + " has unbanged type " +
                                   eal_format_concrete(t));
                inner[binder] = peeled;
            }
            EalPtr b = infer(inner, p->sub1);
            return eal_bang(LinExpr::of_constant(1), b);
        }
        case NealTerm::Kind::Contract: {
            EalPtr shared_ty = infer(basis, p->sub2);
            if (shared_ty->expo.constant < 1)
                throw IllTyped("contraction shares the unbanged type " +
                               eal_format_concrete(shared_ty));
            NealBasis inner = basis;
            inner[p->c1] = shared_ty;
            inner[p->c2] = shared_ty;
            return infer(inner, p->sub1);
        }
    }
    throw std::logic_error("bad neal kind");
}

}  // namespace

EalPtr neal_typecheck(const NealBasis& basis, const NealPtr& p) {
    std::string why;
    if (!neal_legal(p, &why)) throw NotLegal(why);
    return infer(basis, p);
}

void neal_check(const NealBasis& basis, const NealPtr& p, const EalPtr& expected) {
    std::string why;
    if (!neal_legal(p, &why)) throw NotLegal(why);
    check(basis, p, expected);
}

//--------------------------------------------------------------------------
// Reductions

const char* rule_name(Rule r) {
    switch (r) {
        case Rule::Beta: return "beta";
        case Rule::Dup: return "dup";
        case Rule::BangBang: return "!-!";
        case Rule::AppC: return "@-c";
        case Rule::BangC: return "!-c";
        case Rule::CC: return "c-c";
        case Rule::LamC: return "lam-c";
    }
    return "?";
}

std::vector<Rule> all_rules() {
    return {Rule::Beta, Rule::Dup, Rule::BangBang, Rule::AppC, Rule::BangC, Rule::CC,
            Rule::LamC};
}

std::vector<Rule> nonbeta_rules() {
    return {Rule::Dup, Rule::BangBang, Rule::AppC, Rule::BangC, Rule::CC, Rule::LamC};
}

bool redex_matches(const NealPtr& p, Rule r) {
    switch (r) {
        case Rule::Beta:
            return p->kind == NealTerm::Kind::App && p->sub1->kind == NealTerm::Kind::Abs;
        case Rule::Dup:
            return p->kind == NealTerm::Kind::Contract &&
                   p->sub2->kind == NealTerm::Kind::Promote;
        case Rule::BangBang:
            if (p->kind != NealTerm::Kind::Promote) return false;
            for (auto& [arg, binder] : p->subs)
                if (arg->kind == NealTerm::Kind::Promote) return true;
            return false;
        case Rule::AppC:
            return p->kind == NealTerm::Kind::App &&
                   (p->sub1->kind == NealTerm::Kind::Contract ||
                    p->sub2->kind == NealTerm::Kind::Contract);
        case Rule::BangC:
            if (p->kind != NealTerm::Kind::Promote) return false;
            for (auto& [arg, binder] : p->subs)
                if (arg->kind == NealTerm::Kind::Contract) return true;
            return false;
        case Rule::CC:
            return p->kind == NealTerm::Kind::Contract &&
                   p->sub2->kind == NealTerm::Kind::Contract;
        case Rule::LamC:
            return p->kind == NealTerm::Kind::Abs &&
                   p->sub1->kind == NealTerm::Kind::Contract &&
                   !neal_fv(p->sub1->sub2).count(p->name);
    }
    return false;
}

namespace {

NealPtr rewrite(const NealPtr& p, Rule r, Gensym& gen) {
    switch (r) {
        case Rule::Beta:
            return neal_subst(p->sub1->sub1, p->sub1->name, p->sub2);

        case Rule::Dup: {
            const NealPtr& prom = p->sub2;  // !(M)[M1/x1,...,Mn/xn]
            const NealPtr& n_body = p->sub1;
            size_t n = prom->subs.size();
            std::vector<std::string> xp(n), yp(n), yb(n);
            for (size_t i = 0; i < n; ++i) {
                xp[i] = gen.fresh(prom->subs[i].second);
                yp[i] = gen.fresh(prom->subs[i].second);
                yb[i] = gen.fresh(prom->subs[i].second);
            }
            std::vector<std::pair<NealPtr, std::string>> lsubs, rsubs;
            NealPtr mprime = prom->sub1;
            for (size_t i = 0; i < n; ++i) {
                lsubs.emplace_back(nv(xp[i]), prom->subs[i].second);
                mprime = rename_free(mprime, prom->subs[i].second, yb[i]);
            }
            for (size_t i = 0; i < n; ++i) rsubs.emplace_back(nv(yp[i]), yb[i]);
            NealPtr left = npromote(prom->sub1, std::move(lsubs));
            NealPtr right = npromote(mprime, std::move(rsubs));
            NealPtr core = neal_subst(neal_subst(n_body, p->c1, left), p->c2, right);
            // the contraction over M1 ends up outermost
            for (size_t i = n; i-- > 0;)
                core = ncontract(core, prom->subs[i].first, xp[i], yp[i]);
            return core;
        }

        case Rule::BangBang: {
            size_t i = 0;
            while (p->subs[i].first->kind != NealTerm::Kind::Promote) ++i;
            const NealPtr& inner = p->subs[i].first;
            NealPtr body = neal_subst(p->sub1, p->subs[i].second, inner->sub1);
            std::vector<std::pair<NealPtr, std::string>> subs;
            for (size_t j = 0; j < p->subs.size(); ++j) {
                if (j == i)
                    for (auto& e : inner->subs) subs.push_back(e);
                else
                    subs.push_back(p->subs[j]);
            }
            return npromote(std::move(body), std::move(subs));
        }

        case Rule::AppC: {
            bool left = p->sub1->kind == NealTerm::Kind::Contract;
            const NealPtr& contr = left ? p->sub1 : p->sub2;
            std::string x1 = gen.fresh(contr->c1), x2 = gen.fresh(contr->c2);
            NealPtr body = rename_free(rename_free(contr->sub1, contr->c1, x1), contr->c2, x2);
            NealPtr app = left ? napp(body, p->sub2) : napp(p->sub1, body);
            return ncontract(std::move(app), contr->sub2, x1, x2);
        }

        case Rule::BangC: {
            size_t i = 0;
            while (p->subs[i].first->kind != NealTerm::Kind::Contract) ++i;
            const NealPtr& contr = p->subs[i].first;
            std::string y1 = gen.fresh(contr->c1), y2 = gen.fresh(contr->c2);
            NealPtr arg = rename_free(rename_free(contr->sub1, contr->c1, y1), contr->c2, y2);
            std::vector<std::pair<NealPtr, std::string>> subs = p->subs;
            subs[i].first = arg;
            return ncontract(npromote(p->sub1, std::move(subs)), contr->sub2, y1, y2);
        }

        case Rule::CC: {
            const NealPtr& inner = p->sub2;  // N[P/y1,y2]
            std::string y1 = gen.fresh(inner->c1), y2 = gen.fresh(inner->c2);
            NealPtr shared =
                rename_free(rename_free(inner->sub1, inner->c1, y1), inner->c2, y2);
            return ncontract(ncontract(p->sub1, shared, p->c1, p->c2), inner->sub2, y1, y2);
        }

        case Rule::LamC: {
            const NealPtr& contr = p->sub1;
            return ncontract(nabs(p->name, contr->sub1, p->annot), contr->sub2, contr->c1,
                             contr->c2);
        }
    }
    throw std::logic_error("bad rule");
}

NealPtr reduce_at(const NealPtr& p, Rule r, const NealPath& where, size_t idx, Gensym& gen) {
    if (idx == where.size()) {
        if (!redex_matches(p, r))
            throw NoRedex(std::string("no ") + rule_name(r) + " redex at the given position");
        return rewrite(p, r, gen);
    }
    int step = where[idx];
    auto t = std::make_shared<NealTerm>(*p);
    switch (p->kind) {
        case NealTerm::Kind::Var:
            throw NoRedex("path walks into a variable");
        case NealTerm::Kind::Abs:
            if (step != 0) throw NoRedex("bad path step");
            t->sub1 = reduce_at(p->sub1, r, where, idx + 1, gen);
            return t;
        case NealTerm::Kind::App:
            if (step == 0) t->sub1 = reduce_at(p->sub1, r, where, idx + 1, gen);
            else if (step == 1) t->sub2 = reduce_at(p->sub2, r, where, idx + 1, gen);
            else throw NoRedex("bad path step");
            return t;
        case NealTerm::Kind::Promote:
            if (step == 0) t->sub1 = reduce_at(p->sub1, r, where, idx + 1, gen);
            else if (step >= 1 && static_cast<size_t>(step) <= p->subs.size())
                t->subs[static_cast<size_t>(step) - 1].first =
                    reduce_at(p->subs[static_cast<size_t>(step) - 1].first, r, where, idx + 1, gen);
            else throw NoRedex("bad path step");
            return t;
        case NealTerm::Kind::Contract:
            if (step == 0) t->sub1 = reduce_at(p->sub1, r, where, idx + 1, gen);
            else if (step == 1) t->sub2 = reduce_at(p->sub2, r, where, idx + 1, gen);
            else throw NoRedex("bad path step");
            return t;
    }
    throw std::logic_error("bad neal kind");
}

bool find_rec(const NealPtr& p, Rule r, NealPath& path) {
    if (redex_matches(p, r)) return true;
    auto descend = [&](const NealPtr& child, int step) {
        path.push_back(step);
        if (find_rec(child, r, path)) return true;
        path.pop_back();
        return false;
    };
    switch (p->kind) {
        case NealTerm::Kind::Var: return false;
        case NealTerm::Kind::Abs: return descend(p->sub1, 0);
        case NealTerm::Kind::App: return descend(p->sub1, 0) || descend(p->sub2, 1);
        case NealTerm::Kind::Promote: {
            if (descend(p->sub1, 0)) return true;
            for (size_t i = 0; i < p->subs.size(); ++i)
                if (descend(p->subs[i].first, static_cast<int>(i) + 1)) return true;
            return false;
        }
        case NealTerm::Kind::Contract:
            return descend(p->sub1, 0) || descend(p->sub2, 1);
    }
    return false;
}

}  // namespace

NealPtr reduce_step(const NealPtr& p, Rule r, const NealPath& where) {
    Gensym gen(p);
    return reduce_at(p, r, where, 0, gen);
}

std::optional<NealPath> find_redex(const NealPtr& p, Rule r) {
    NealPath path;
    if (find_rec(p, r, path)) return path;
    return std::nullopt;
}

NealPtr normalize_nonbeta(const NealPtr& p) {
    NealPtr cur = p;
    for (int steps = 0; steps < 200000; ++steps) {
        bool fired = false;
        for (Rule r : nonbeta_rules()) {
            if (auto pos = find_redex(cur, r)) {
                cur = reduce_step(cur, r, *pos);
                fired = true;
                break;
            }
        }
        if (!fired) return cur;
    }
    throw std::logic_error("non-beta normalization did not terminate");
}

int neal_length(const NealPtr& p) {
    switch (p->kind) {
        case NealTerm::Kind::Var: return 0;
        case NealTerm::Kind::Abs: return 1 + neal_length(p->sub1);
        case NealTerm::Kind::App: return 1 + neal_length(p->sub1) + neal_length(p->sub2);
        case NealTerm::Kind::Promote: {
            int acc = neal_length(p->sub1);
            for (auto& [arg, binder] : p->subs) acc += neal_length(arg);
            return acc;
        }
        case NealTerm::Kind::Contract:
            return neal_length(p->sub1) + neal_length(p->sub2);
    }
    return 0;
}

namespace {

int pure_length(const TermPtr& t) {
    switch (t->kind) {
        case Term::Kind::Var: return 0;
        case Term::Kind::Abs: return 1 + pure_length(t->sub1);
        case Term::Kind::App: return 1 + pure_length(t->sub1) + pure_length(t->sub2);
    }
    return 0;
}

bool scan(const NealPtr& p, const std::function<bool(const NealPtr&)>& pred) {
    if (pred(p)) return true;
    switch (p->kind) {
        case NealTerm::Kind::Var: return false;
        case NealTerm::Kind::Abs: return scan(p->sub1, pred);
        case NealTerm::Kind::App: return scan(p->sub1, pred) || scan(p->sub2, pred);
        case NealTerm::Kind::Promote: {
            if (scan(p->sub1, pred)) return true;
            for (auto& [arg, binder] : p->subs)
                if (scan(arg, pred)) return true;
            return false;
        }
        case NealTerm::Kind::Contract:
            return scan(p->sub1, pred) || scan(p->sub2, pred);
    }
    return false;
}

}  // namespace

bool is_candidate(const NealPtr& p, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    for (Rule r : nonbeta_rules())
        if (find_redex(p, r))
            return fail(std::string("not in non-beta normal form: ") + rule_name(r) +
                        " redex present");
    if (scan(p, [](const NealPtr& q) {
            return q->kind == NealTerm::Kind::Contract &&
                   !erase_star(q->sub2)->is_var();
        }))
        return fail("a contraction shares a non-variable");
    if (neal_length(p) != pure_length(erase_star(p)))
        return fail("erasure changes the term length");
    if (scan(p, [](const NealPtr& q) {
            if (q->kind != NealTerm::Kind::Contract) return false;
            auto fv = neal_fv(q->sub1);
            return !fv.count(q->c1) || !fv.count(q->c2);
        }))
        return fail("a contraction binds a variable not free in its body");
    if (scan(p, [](const NealPtr& q) {
            return q->kind == NealTerm::Kind::Promote && q->sub1->kind == NealTerm::Kind::Var;
        }))
        return fail("a promotion has a bare variable body");
    return true;
}

//--------------------------------------------------------------------------
// Formatting and parsing

std::string neal_format(const NealPtr& p) {
    switch (p->kind) {
        case NealTerm::Kind::Var: return p->name;
        case NealTerm::Kind::Abs: {
            std::string head = "\\" + p->name;
            if (p->annot) head += ":" + eal_format_concrete(p->annot);
            return head + "." + neal_format(p->sub1);
        }
        case NealTerm::Kind::App:
            return "(" + neal_format(p->sub1) + " " + neal_format(p->sub2) + ")";
        case NealTerm::Kind::Promote: {
            std::string out = "!(" + neal_format(p->sub1) + ")[";
            for (size_t i = 0; i < p->subs.size(); ++i) {
                if (i) out += ", ";
                out += neal_format(p->subs[i].first) + "/" + p->subs[i].second;
            }
            return out + "]";
        }
        case NealTerm::Kind::Contract: {
            std::string body = neal_format(p->sub1);
            if (p->sub1->kind == NealTerm::Kind::Abs) body = "(" + body + ")";
            return body + "[" + neal_format(p->sub2) + "/" + p->c1 + "," + p->c2 + "]";
        }
    }
    throw std::logic_error("bad neal kind");
}

namespace {

struct NealParser {
    const std::string& src;
    size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\n'))
            ++pos;
    }

    bool at_lambda() {
        if (pos < src.size() && src[pos] == '\\') return true;
        return pos + 1 < src.size() && static_cast<unsigned char>(src[pos]) == 0xCE &&
               static_cast<unsigned char>(src[pos + 1]) == 0xBB;
    }

    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < src.size() &&
               (isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_' ||
                src[pos] == '\''))
            ++pos;
        if (start == pos) throw SyntaxError("expected identifier", pos);
        return src.substr(start, pos - start);
    }

    void expect(char c) {
        skip_ws();
        if (pos >= src.size() || src[pos] != c)
            throw SyntaxError(std::string("expected '") + c + "'", pos);
        ++pos;
    }

    NealPtr item() {
        skip_ws();
        if (pos >= src.size()) throw SyntaxError("unexpected end of input", pos);
        NealPtr t;
        if (at_lambda()) {
            if (src[pos] == '\\') ++pos; else pos += 2;
            std::string binder = ident();
            EalPtr annot;
            skip_ws();
            if (pos < src.size() && src[pos] == ':') {
                ++pos;
                size_t dot = src.find('.', pos);
                if (dot == std::string::npos) throw SyntaxError("expected '.'", pos);
                annot = parse_concrete_eal(src.substr(pos, dot - pos));
                pos = dot;
            }
            expect('.');
            t = nabs(binder, item(), annot);
        } else if (src[pos] == '!') {
            ++pos;
            long layers = 1;
            skip_ws();
            if (pos < src.size() && src[pos] == '^') {
                ++pos;
                skip_ws();
                size_t start = pos;
                while (pos < src.size() && isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
                if (start == pos) throw SyntaxError("expected integer after !^", pos);
                layers = std::stol(src.substr(start, pos - start));
                if (layers < 1) throw SyntaxError("promotion needs at least one layer", start);
            }
            expect('(');
            NealPtr body = term();
            expect(')');
            std::vector<std::pair<NealPtr, std::string>> subs;
            skip_ws();
            if (pos < src.size() && src[pos] == '[') {
                ++pos;
                skip_ws();
                if (pos < src.size() && src[pos] != ']') {
                    for (;;) {
                        NealPtr arg = term();
                        expect('/');
                        std::string binder = ident();
                        subs.emplace_back(std::move(arg), std::move(binder));
                        skip_ws();
                        if (pos < src.size() && src[pos] == ',') { ++pos; continue; }
                        break;
                    }
                }
                expect(']');
            }
            // identity entries for the remaining free variables of the body
            std::set<std::string> bound;
            for (auto& [arg, binder] : subs) bound.insert(binder);
            for (auto& fv : neal_fv(body))
                if (!bound.count(fv)) subs.emplace_back(nv(fv), fv);
            t = npromote(body, std::move(subs));
            for (long i = 1; i < layers; ++i) {
                std::vector<std::pair<NealPtr, std::string>> lift;
                for (auto& fv : neal_fv(t)) lift.emplace_back(nv(fv), fv);
                t = npromote(t, std::move(lift));
            }
        } else if (src[pos] == '(') {
            ++pos;
            t = term();
            for (;;) {
                skip_ws();
                if (pos >= src.size() || src[pos] == ')') break;
                t = napp(t, term());
            }
            expect(')');
        } else {
            t = nv(ident());
        }
        // contraction postfix: [N/x,y]
        for (;;) {
            skip_ws();
            if (pos >= src.size() || src[pos] != '[') return t;
            ++pos;
            NealPtr shared = term();
            expect('/');
            std::string x = ident();
            expect(',');
            std::string y = ident();
            expect(']');
            t = ncontract(t, shared, x, y);
        }
    }

    NealPtr term() { return item(); }
};

}  // namespace

NealPtr parse_neal(const std::string& text) {
    NealParser p{text};
    NealPtr t = p.term();
    p.skip_ws();
    if (p.pos != text.size()) throw SyntaxError("trailing input", p.pos);
    return t;
}

namespace {

bool alpha_rec(const NealPtr& a, const NealPtr& b, std::map<std::string, std::string>& ab,
               std::map<std::string, std::string>& ba, int& counter) {
    if (a->kind != b->kind) return false;
    auto with_binding = [&](const std::string& na, const std::string& nb, auto&& k) {
        std::string tag = "#" + std::to_string(counter++);
        auto sa = ab.count(na) ? std::optional(ab[na]) : std::nullopt;
        auto sb = ba.count(nb) ? std::optional(ba[nb]) : std::nullopt;
        ab[na] = tag;
        ba[nb] = tag;
        bool ok = k();
        if (sa) ab[na] = *sa; else ab.erase(na);
        if (sb) ba[nb] = *sb; else ba.erase(nb);
        return ok;
    };
    switch (a->kind) {
        case NealTerm::Kind::Var: {
            auto ia = ab.find(a->name);
            auto ib = ba.find(b->name);
            if (ia == ab.end() && ib == ba.end()) return a->name == b->name;
            if (ia == ab.end() || ib == ba.end()) return false;
            return ia->second == ib->second;
        }
        case NealTerm::Kind::Abs:
            return with_binding(a->name, b->name,
                                [&] { return alpha_rec(a->sub1, b->sub1, ab, ba, counter); });
        case NealTerm::Kind::App:
            return alpha_rec(a->sub1, b->sub1, ab, ba, counter) &&
                   alpha_rec(a->sub2, b->sub2, ab, ba, counter);
        case NealTerm::Kind::Promote: {
            if (a->subs.size() != b->subs.size()) return false;
            for (size_t i = 0; i < a->subs.size(); ++i)
                if (!alpha_rec(a->subs[i].first, b->subs[i].first, ab, ba, counter))
                    return false;
            std::function<bool(size_t)> bind = [&](size_t i) -> bool {
                if (i == a->subs.size()) return alpha_rec(a->sub1, b->sub1, ab, ba, counter);
                return with_binding(a->subs[i].second, b->subs[i].second,
                                    [&] { return bind(i + 1); });
            };
            return bind(0);
        }
        case NealTerm::Kind::Contract: {
            if (!alpha_rec(a->sub2, b->sub2, ab, ba, counter)) return false;
            return with_binding(a->c1, b->c1, [&] {
                return with_binding(a->c2, b->c2,
                                    [&] { return alpha_rec(a->sub1, b->sub1, ab, ba, counter); });
            });
        }
    }
    return false;
}

}  // namespace

bool neal_alpha_eq(const NealPtr& a, const NealPtr& b) {
    std::map<std::string, std::string> ab, ba;
    int counter = 0;
    return alpha_rec(a, b, ab, ba, counter);
}

}  // namespace eal
