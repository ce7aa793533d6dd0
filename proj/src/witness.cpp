#include "ealinfer/witness.hpp"

#include <algorithm>
#include <functional>

namespace eal {

namespace {

struct InstBox {
    OccId subject;
    std::vector<OccId> holes;
    long count;  // instantiated multiplicity

    bool contains(const OccId& node) const {
        if (!subject.is_prefix_of(node)) return false;
        for (auto& h : holes)
            if (h.is_prefix_of(node)) return false;
        return true;
    }
};

void collect_paths(const TermPtr& t, const std::string& path, std::vector<std::string>& out) {
    out.push_back(path);
    switch (t->kind) {
        case Term::Kind::Var: return;
        case Term::Kind::Abs: collect_paths(t->sub1, path + "b", out); return;
        case Term::Kind::App:
            collect_paths(t->sub1, path + "f", out);
            collect_paths(t->sub2, path + "a", out);
            return;
    }
}

std::vector<InstBox> instantiated_boxes(const InferSession& s, const Valuation& x) {
    std::vector<InstBox> boxes;
    for (auto& ev : s.events) {
        auto it = x.find(ev.var);
        long count = it == x.end() ? 0 : it->second;
        if (count > 0) boxes.push_back(InstBox{ev.subject, ev.holes, count});
    }
    return boxes;
}

void collect_term_names(const TermPtr& t, std::set<std::string>& out) {
    switch (t->kind) {
        case Term::Kind::Var: out.insert(t->name); return;
        case Term::Kind::Abs:
            out.insert(t->name);
            collect_term_names(t->sub1, out);
            return;
        case Term::Kind::App:
            collect_term_names(t->sub1, out);
            collect_term_names(t->sub2, out);
            return;
    }
}

}  // namespace

std::map<std::string, long> box_levels(const TermPtr& term, const InferSession& s,
                                       const Valuation& x) {
    std::vector<std::string> paths;
    collect_paths(term, "", paths);
    auto boxes = instantiated_boxes(s, x);
    std::map<std::string, long> levels;
    for (auto& p : paths) {
        long lvl = 0;
        for (auto& b : boxes)
            if (b.contains(OccId{p})) lvl += b.count;
        levels[p] = lvl;
    }
    return levels;
}

namespace {

struct Builder {
    const TermPtr& root;
    const InferSession& session;
    const Valuation& x;
    std::vector<InstBox> boxes;
    std::map<std::string, long> levels;
    std::set<std::string> used_names;

    // occurrence path -> leaf name after contraction renaming
    std::map<std::string, std::string> occ_rename;
    // placeholder name -> (hole path, exit level)
    std::map<std::string, std::pair<std::string, long>> pending_holes;
    int hole_counter = 0;

    long level(const std::string& path) const { return levels.at(path); }

    long shared_level(const OccId& parent, const OccId& child) const {
        long shared = 0;
        for (auto& b : boxes)
            if (b.contains(parent) && b.contains(child)) shared += b.count;
        return shared;
    }

    bool is_hole(const OccId& parent, const OccId& child) const {
        for (auto& b : boxes)
            if (b.contains(parent) && !b.contains(child)) return true;
        return false;
    }

    std::string fresh(const std::string& base) {
        std::string cand = base;
        while (used_names.count(cand)) cand += "'";
        used_names.insert(cand);
        return cand;
    }

    EalPtr binder_annot(const std::string& path) const {
        auto it = session.abs_domain.find(path);
        if (it == session.abs_domain.end())
            throw InternalInvariantViolation("no recorded domain for abstraction at '" +
                                             path + "'");
        return instantiate(it->second, x);
    }

    NealPtr child_or_hole(const TermPtr& child, const OccId& parent, const OccId& cpath) {
        if (is_hole(parent, cpath)) {
            if (!child->is_app())
                throw InternalInvariantViolation("box border below a non-application node");
            std::string ph = fresh("_h" + std::to_string(++hole_counter));
            pending_holes[ph] = {cpath.path, shared_level(parent, cpath)};
            return nv(ph);
        }
        return emit(child, cpath, level(parent.path));
    }

    NealPtr emit(const TermPtr& t, const OccId& path, long ctx_level) {
        long lvl = level(path.path);
        if (lvl < ctx_level)
            throw InternalInvariantViolation("node below its context level");
        NealPtr core = emit_core(t, path);
        // one promotion per level, resolving holes at their exit layer
        for (long layer = lvl - 1; layer >= ctx_level; --layer) {
            std::vector<std::string> fvs(neal_fv(core).begin(), neal_fv(core).end());
            std::vector<std::pair<NealPtr, std::string>> subs;
            for (auto& f : fvs) {
                auto it = pending_holes.find(f);
                if (it != pending_holes.end() && it->second.second == layer) {
                    OccId hp{it->second.first};
                    pending_holes.erase(it);
                    subs.emplace_back(emit(subterm_at(root, hp), hp, layer), f);
                } else {
                    subs.emplace_back(nv(f), f);
                }
            }
            core = npromote(core, std::move(subs));
        }
        return core;
    }

    NealPtr emit_core(const TermPtr& t, const OccId& path) {
        switch (t->kind) {
            case Term::Kind::Var: {
                auto it = occ_rename.find(path.path);
                return nv(it != occ_rename.end() ? it->second : t->name);
            }
            case Term::Kind::Abs: {
                OccId bpath{path.path + "b"};
                NealPtr body = child_or_hole(t->sub1, path, bpath);
                std::vector<std::string> names;
                for (auto& [n, occ] : fvo(t->sub1))
                    if (n == t->name) {
                        auto it = occ_rename.find(occ.path);
                        names.push_back(it != occ_rename.end() ? it->second : n);
                    }
                if (names.size() >= 2)
                    body = contract_chain(std::move(body), t->name, names);
                return nabs(t->name, std::move(body), binder_annot(path.path));
            }
            case Term::Kind::App: {
                NealPtr fun = child_or_hole(t->sub1, path, OccId{path.path + "f"});
                NealPtr arg = child_or_hole(t->sub2, path, OccId{path.path + "a"});
                return napp(std::move(fun), std::move(arg));
            }
        }
        throw std::logic_error("bad term kind");
    }

    // k occurrence names collapse through k-1 contractions of `share`.
    NealPtr contract_chain(NealPtr body, const std::string& share,
                           const std::vector<std::string>& names) {
        std::vector<std::string> pending = names;
        while (pending.size() > 2) {
            std::string aux = fresh(share + "_g");
            body = ncontract(std::move(body), nv(aux), pending[0], pending[1]);
            pending.erase(pending.begin());
            pending[0] = aux;
        }
        return ncontract(std::move(body), nv(share), pending[0], pending[1]);
    }

    void prepare_renames() {
        // bound occurrences, per abstraction
        std::function<void(const TermPtr&, const std::string&)> walk =
            [&](const TermPtr& t, const std::string& path) {
                switch (t->kind) {
                    case Term::Kind::Var: return;
                    case Term::Kind::Abs: {
                        std::vector<OccId> occs;
                        for (auto& [n, occ] : fvo(t->sub1))
                            if (n == t->name) occs.push_back(occ);
                        if (occs.size() >= 2)
                            for (size_t i = 0; i < occs.size(); ++i)
                                occ_rename[occs[i].path] =
                                    fresh(t->name + "_" + std::to_string(i + 1));
                        walk(t->sub1, path + "b");
                        return;
                    }
                    case Term::Kind::App:
                        walk(t->sub1, path + "f");
                        walk(t->sub2, path + "a");
                        return;
                }
            };
        walk(root, "");
        // free variables of the whole term
        std::map<std::string, std::vector<OccId>> groups;
        for (auto& [n, occ] : fvo(root)) groups[n].push_back(occ);
        for (auto& [n, occs] : groups)
            if (occs.size() >= 2)
                for (size_t i = 0; i < occs.size(); ++i)
                    occ_rename[occs[i].path] = fresh(n + "_" + std::to_string(i + 1));
    }

    NealPtr build() {
        prepare_renames();
        NealPtr p = emit(root, OccId{}, 0);
        if (!pending_holes.empty())
            throw InternalInvariantViolation("unresolved box hole after reconstruction");
        // top-level contractions for repeated free variables
        std::map<std::string, std::vector<OccId>> groups;
        for (auto& [n, occ] : fvo(root)) groups[n].push_back(occ);
        for (auto& [n, occs] : groups) {
            if (occs.size() < 2) continue;
            std::vector<std::string> names;
            for (auto& occ : occs) names.push_back(occ_rename.at(occ.path));
            p = contract_chain(std::move(p), n, names);
        }
        return p;
    }
};

}  // namespace

NealPtr build_witness(const TermPtr& term, const InferSession& s, const Valuation& x,
                      const EalPtr& final_type, const Base& final_base,
                      WitnessChecks* checks) {
    Builder builder{term, s, x};
    builder.boxes = instantiated_boxes(s, x);
    builder.levels = box_levels(term, s, x);
    collect_term_names(term, builder.used_names);

    NealPtr p = builder.build();
    p = normalize_nonbeta(p);

    std::string why;
    if (!neal_legal(p, &why))
        throw InternalInvariantViolation("witness is not a legal term: " + why);

    WitnessChecks local;
    local.erasure_ok = alpha_eq(erase_star(p), term);
    if (!local.erasure_ok)
        throw InternalInvariantViolation("witness erasure differs from the subject term");

    NealBasis basis;
    for (auto& entry : final_base) basis[entry.name] = instantiate(entry.type, x);
    neal_check(basis, p, instantiate(final_type, x));
    local.typed = true;

    local.candidate = is_candidate(p, &why);
    if (!local.candidate)
        throw InternalInvariantViolation("witness is not a candidate term: " + why);

    if (checks) *checks = local;
    return p;
}

}  // namespace eal
