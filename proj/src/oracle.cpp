#include "ealinfer/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace eal {

std::string OracleJudgment::format() const {
    std::string out = "{";
    for (size_t i = 0; i < basis.size(); ++i) {
        if (i) out += ", ";
        out += basis[i].first + ": " + eal_format_concrete(basis[i].second);
    }
    out += "} |- " + eal_format_concrete(type);
    return out;
}

std::vector<EalPtr> decorations(const STPtr& sigma, int bound) {
    std::vector<EalPtr> out;
    if (sigma->kind == SimpleType::Kind::Arrow) {
        auto lefts = decorations(sigma->left, bound);
        auto rights = decorations(sigma->right, bound);
        for (int n = 0; n <= bound; ++n)
            for (auto& l : lefts)
                for (auto& r : rights)
                    out.push_back(eal_arrow(LinExpr::of_constant(n), l, r));
    } else {
        for (int n = 0; n <= bound; ++n)
            out.push_back(eal_atom(LinExpr::of_constant(n), sigma->name));
    }
    return out;
}

//--------------------------------------------------------------------------
// Candidate enumeration

namespace {

struct CandidateGen {
    const DecorationBudget& budget;
    std::map<std::string, std::string> occ_rename;
    std::set<std::string> used_names;
    long produced = 0;

    std::string fresh(const std::string& base) {
        std::string cand = base;
        while (used_names.count(cand)) cand += "'";
        used_names.insert(cand);
        return cand;
    }

    void bump() {
        if (++produced > budget.node_limit)
            throw BudgetExceeded("candidate enumeration exceeded the node limit");
    }

    NealPtr contract_chain(NealPtr body, const std::string& share,
                           const std::vector<std::string>& names) {
        std::vector<std::string> pending = names;
        int aux = 0;
        while (pending.size() > 2) {
            std::string g = share + "_g" + std::to_string(++aux);
            body = ncontract(std::move(body), nv(g), pending[0], pending[1]);
            pending.erase(pending.begin());
            pending[0] = g;
        }
        return ncontract(std::move(body), nv(share), pending[0], pending[1]);
    }

    // all sets of pairwise-disjoint application-subterm paths (proper,
    // at most one per root-to-leaf path)
    std::vector<std::vector<OccId>> pullouts(const TermPtr& t) {
        std::vector<OccId> apps;
        std::function<void(const TermPtr&, const std::string&)> walk =
            [&](const TermPtr& node, const std::string& path) {
                if (!path.empty() && node->is_app()) apps.push_back(OccId{path});
                switch (node->kind) {
                    case Term::Kind::Var: return;
                    case Term::Kind::Abs: walk(node->sub1, path + "b"); return;
                    case Term::Kind::App:
                        walk(node->sub1, path + "f");
                        walk(node->sub2, path + "a");
                        return;
                }
            };
        walk(t, "");
        std::vector<std::vector<OccId>> out{{}};
        for (auto& a : apps) {
            size_t n = out.size();
            for (size_t i = 0; i < n; ++i) {
                bool clash = false;
                for (auto& chosen : out[i])
                    if (chosen.is_prefix_of(a) || a.is_prefix_of(chosen)) clash = true;
                if (!clash) {
                    auto extended = out[i];
                    extended.push_back(a);
                    out.push_back(std::move(extended));
                }
            }
        }
        return out;
    }

    TermPtr replace_at(const TermPtr& t, const OccId& where, const TermPtr& repl,
                       const std::string& path = "") {
        if (path == where.path) return repl;
        switch (t->kind) {
            case Term::Kind::Var: return t;
            case Term::Kind::Abs:
                return mk_abs(t->name, replace_at(t->sub1, where, repl, path + "b"));
            case Term::Kind::App:
                return mk_app(replace_at(t->sub1, where, repl, path + "f"),
                              replace_at(t->sub2, where, repl, path + "a"));
        }
        return t;
    }

    std::vector<NealPtr> gen(const TermPtr& t, int edge_budget, int total_budget) {
        std::vector<NealPtr> results = core(t, total_budget);
        if (t->is_var() || edge_budget <= 0 || total_budget <= 0) return results;
        // box this node, optionally pulling application subterms out
        for (auto& holes : pullouts(t)) {
            TermPtr ctx = t;
            std::vector<std::pair<OccId, std::string>> pulled;
            for (auto& h : holes) {
                std::string ph = fresh("h" + std::to_string(pulled.size() + 1) + "_");
                ctx = replace_at(ctx, h, mk_var(ph));
                pulled.emplace_back(h, ph);
            }
            if (ctx->is_var()) continue;
            for (auto& inner : gen(ctx, edge_budget - 1, total_budget - 1)) {
                // budget the pulled arguments jointly
                std::function<void(size_t, int, std::vector<std::pair<NealPtr, std::string>>)>
                    assemble = [&](size_t i, int left,
                                   std::vector<std::pair<NealPtr, std::string>> args) {
                        if (i == pulled.size()) {
                            std::set<std::string> bound;
                            for (auto& [arg, binder] : args) bound.insert(binder);
                            for (auto& f : neal_fv(inner))
                                if (!bound.count(f)) args.emplace_back(nv(f), f);
                            bump();
                            results.push_back(npromote(inner, std::move(args)));
                            return;
                        }
                        TermPtr sub = subterm_at(t, OccId{pulled[i].first.path});
                        for (auto& parg :
                             gen(sub, budget.max_boxes_per_edge, left)) {
                            int used = count_promotes(parg);
                            if (used > left) continue;
                            auto next = args;
                            next.emplace_back(parg, pulled[i].second);
                            assemble(i + 1, left - used, std::move(next));
                        }
                    };
                assemble(0, total_budget - 1 - count_promotes(inner), {});
            }
        }
        return results;
    }

    static int count_promotes(const NealPtr& p) {
        switch (p->kind) {
            case NealTerm::Kind::Var: return 0;
            case NealTerm::Kind::Abs: return count_promotes(p->sub1);
            case NealTerm::Kind::App:
                return count_promotes(p->sub1) + count_promotes(p->sub2);
            case NealTerm::Kind::Promote: {
                int acc = 1 + count_promotes(p->sub1);
                for (auto& [arg, binder] : p->subs) acc += count_promotes(arg);
                return acc;
            }
            case NealTerm::Kind::Contract:
                return count_promotes(p->sub1) + count_promotes(p->sub2);
        }
        return 0;
    }

    std::vector<NealPtr> core(const TermPtr& t, int total_budget) {
        switch (t->kind) {
            case Term::Kind::Var: {
                auto it = occ_rename.find(t->occ.path);
                bump();
                return {nv(it != occ_rename.end() ? it->second : t->name)};
            }
            case Term::Kind::Abs: {
                std::vector<std::string> names;
                for (auto& [n, occ] : fvo(t->sub1))
                    if (n == t->name) {
                        auto it = occ_rename.find(occ.path);
                        names.push_back(it != occ_rename.end() ? it->second : n);
                    }
                std::vector<NealPtr> out;
                for (auto& body : gen(t->sub1, budget.max_boxes_per_edge, total_budget)) {
                    NealPtr b = body;
                    if (names.size() >= 2) b = contract_chain(std::move(b), t->name, names);
                    bump();
                    out.push_back(nabs(t->name, std::move(b)));
                }
                return out;
            }
            case Term::Kind::App: {
                std::vector<NealPtr> out;
                for (auto& f : gen(t->sub1, budget.max_boxes_per_edge, total_budget))
                    for (auto& a : gen(t->sub2, budget.max_boxes_per_edge,
                                       total_budget - count_promotes(f))) {
                        bump();
                        out.push_back(napp(f, a));
                    }
                return out;
            }
        }
        return {};
    }
};

}  // namespace

std::vector<NealPtr> enumerate_candidates(const TermPtr& t, const DecorationBudget& budget) {
    CandidateGen gen{budget};
    // rename repeated occurrences so contraction insertion is canonical
    std::function<void(const TermPtr&)> names = [&](const TermPtr& node) {
        switch (node->kind) {
            case Term::Kind::Var: gen.used_names.insert(node->name); return;
            case Term::Kind::Abs:
                gen.used_names.insert(node->name);
                names(node->sub1);
                return;
            case Term::Kind::App: names(node->sub1); names(node->sub2); return;
        }
    };
    names(t);
    std::function<void(const TermPtr&)> walk = [&](const TermPtr& node) {
        switch (node->kind) {
            case Term::Kind::Var: return;
            case Term::Kind::Abs: {
                std::vector<OccId> occs;
                for (auto& [n, occ] : fvo(node->sub1))
                    if (n == node->name) occs.push_back(occ);
                if (occs.size() >= 2)
                    for (size_t i = 0; i < occs.size(); ++i)
                        gen.occ_rename[occs[i].path] =
                            gen.fresh(node->name + "_" + std::to_string(i + 1));
                walk(node->sub1);
                return;
            }
            case Term::Kind::App: walk(node->sub1); walk(node->sub2); return;
        }
    };
    walk(t);
    std::map<std::string, std::vector<OccId>> groups;
    for (auto& [n, occ] : fvo(t)) groups[n].push_back(occ);
    for (auto& [n, occs] : groups)
        if (occs.size() >= 2)
            for (size_t i = 0; i < occs.size(); ++i)
                gen.occ_rename[occs[i].path] = gen.fresh(n + "_" + std::to_string(i + 1));

    std::vector<NealPtr> raw =
        gen.gen(t, budget.max_boxes_per_edge, budget.max_total_boxes);
    std::vector<NealPtr> out;
    std::set<std::string> seen;
    for (auto& p : raw) {
        NealPtr q = p;
        for (auto& [n, occs] : groups) {
            if (occs.size() < 2) continue;
            std::vector<std::string> nm;
            for (auto& occ : occs) nm.push_back(gen.occ_rename.at(occ.path));
            q = gen.contract_chain(std::move(q), n, nm);
        }
        if (seen.insert(neal_format(q)).second) out.push_back(std::move(q));
    }
    return out;
}

//--------------------------------------------------------------------------
// Derivation search in the term assignment system

namespace {

struct DerivationChecker {
    std::vector<EalPtr> pool;         // candidate types for cut positions
    std::vector<EalPtr> banged_pool;  // pool entries with at least one bang
    long node_limit;
    long spent = 0;
    std::map<std::string, bool> memo;
    std::map<const NealTerm*, std::set<std::string>> fv_cache;

    void bump() {
        if (++spent > node_limit)
            throw BudgetExceeded("derivation search exceeded the node limit");
    }

    const std::set<std::string>& fv(const NealPtr& p) {
        auto it = fv_cache.find(p.get());
        if (it != fv_cache.end()) return it->second;
        return fv_cache.emplace(p.get(), neal_fv(p)).first->second;
    }

    bool derivable(const NealBasis& basis, const NealPtr& p, const EalPtr& expected) {
        bump();
        std::string key = std::to_string(reinterpret_cast<uintptr_t>(p.get())) + "|" +
                          eal_format_concrete(expected) + "|";
        for (auto& f : fv(p)) {
            auto it = basis.find(f);
            key += f + ":" + (it == basis.end() ? "?" : eal_format_concrete(it->second)) + ";";
        }
        auto hit = memo.find(key);
        if (hit != memo.end()) return hit->second;
        bool ok = derive(basis, p, expected);
        memo[key] = ok;
        return ok;
    }

    bool derive(const NealBasis& basis, const NealPtr& p, const EalPtr& expected) {
        switch (p->kind) {
            case NealTerm::Kind::Var: {
                auto it = basis.find(p->name);
                return it != basis.end() && eal_eq(it->second, expected);
            }
            case NealTerm::Kind::Abs: {
                if (!expected->is_arrow || expected->expo.constant != 0) return false;
                NealBasis inner = basis;
                inner[p->name] = expected->left;
                return derivable(inner, p->sub1, expected->right);
            }
            case NealTerm::Kind::App: {
                for (auto& s : pool) {
                    if (!derivable(basis, p->sub2, s)) continue;
                    EalPtr arrow = eal_arrow(LinExpr{}, s, expected);
                    if (derivable(basis, p->sub1, arrow)) return true;
                }
                return false;
            }
            case NealTerm::Kind::Promote: {
                if (expected->expo.constant < 1) return false;
                auto body_ty = std::make_shared<EalType>(*expected);
                body_ty->expo = LinExpr::of_constant(expected->expo.constant - 1);
                std::function<bool(size_t, NealBasis)> pick = [&](size_t i,
                                                                  NealBasis inner) -> bool {
                    if (i == p->subs.size())
                        return derivable(inner, p->sub1, body_ty);
                    for (auto& s : banged_pool) {
                        if (!derivable(basis, p->subs[i].first, s)) continue;
                        auto peeled = std::make_shared<EalType>(*s);
                        peeled->expo = LinExpr::of_constant(s->expo.constant - 1);
                        NealBasis next = inner;
                        next[p->subs[i].second] = peeled;
                        if (pick(i + 1, std::move(next))) return true;
                    }
                    return false;
                };
                return pick(0, NealBasis{});
            }
            case NealTerm::Kind::Contract: {
                for (auto& s : banged_pool) {
                    if (!derivable(basis, p->sub2, s)) continue;
                    NealBasis inner = basis;
                    inner[p->c1] = s;
                    inner[p->c2] = s;
                    if (derivable(inner, p->sub1, expected)) return true;
                }
                return false;
            }
        }
        return false;
    }
};

}  // namespace

std::set<OracleJudgment> enumerate_judgments(const TermPtr& t, const STPtr& sigma,
                                             const DecorationBudget& budget) {
    std::set<OracleJudgment> out;
    auto candidates = enumerate_candidates(t, budget);
    int bang = budget.type_bang_bound >= 0 ? budget.type_bang_bound
                                           : budget.max_boxes_per_edge;

    // distinct simple types of the subterms and binders of t at sigma
    TypedTree tree = annotate(t, sigma);
    std::set<std::string> shapes_seen;
    std::vector<STPtr> shapes;
    std::function<void(const TypedTree&)> walk = [&](const TypedTree& n) {
        for (const STPtr* s : {&n.type, &n.binder_type})
            if (*s && shapes_seen.insert(st_format(*s)).second) shapes.push_back(*s);
        for (auto& c : n.children) walk(c);
    };
    walk(tree);

    DerivationChecker checker;
    checker.node_limit = budget.node_limit;
    std::set<std::string> pool_seen;
    for (auto& shape : shapes)
        for (auto& ty : decorations(shape, bang))
            if (pool_seen.insert(eal_format_concrete(ty)).second) {
                checker.pool.push_back(ty);
                if (ty->expo.constant >= 1) checker.banged_pool.push_back(ty);
            }

    // free variables and their simple types under sigma
    std::map<std::string, STPtr> var_types;
    std::function<void(const TypedTree&)> leaves = [&](const TypedTree& n) {
        if (n.node->is_var() && !var_types.count(n.node->name))
            var_types[n.node->name] = n.type;
        for (auto& c : n.children) leaves(c);
    };
    leaves(tree);
    std::vector<std::string> free_names = free_vars(t);
    std::sort(free_names.begin(), free_names.end());

    auto result_types = decorations(sigma, bang);
    for (auto& cand : candidates) {
        std::function<void(size_t, NealBasis, std::vector<std::pair<std::string, EalPtr>>)>
            sweep = [&](size_t i, NealBasis basis,
                        std::vector<std::pair<std::string, EalPtr>> chosen) {
                if (i == free_names.size()) {
                    for (auto& ty : result_types) {
                        OracleJudgment j{chosen, ty};
                        if (out.count(j)) continue;
                        if (checker.derivable(basis, cand, ty)) out.insert(std::move(j));
                    }
                    return;
                }
                for (auto& ty : decorations(var_types.at(free_names[i]), bang)) {
                    NealBasis next = basis;
                    next[free_names[i]] = ty;
                    auto ch = chosen;
                    ch.emplace_back(free_names[i], ty);
                    sweep(i + 1, std::move(next), std::move(ch));
                }
            };
        sweep(0, NealBasis{}, {});
    }
    return out;
}

}  // namespace eal
