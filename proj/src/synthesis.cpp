#include "ealinfer/synthesis.hpp"

#include <algorithm>
#include <ostream>
#include <functional>
#include <set>
#include <sstream>

namespace eal {

namespace {

Slice canonical(Slice sl) {
    std::sort(sl.begin(), sl.end(),
              [](const SliceElem& a, const SliceElem& b) { return a.cid < b.cid; });
    sl.erase(std::unique(sl.begin(), sl.end()), sl.end());
    return sl;
}

Slice slice_union(const Slice& a, const Slice& b) {
    Slice u = a;
    u.insert(u.end(), b.begin(), b.end());
    return canonical(std::move(u));
}

bool slice_eq(const Slice& a, const Slice& b) { return a == b; }

void push_unique(SliceSet& set, Slice sl) {
    for (auto& s : set)
        if (slice_eq(s, sl)) return;
    set.push_back(std::move(sl));
}

}  // namespace

SliceSet product_union(const SliceSet& c1, const SliceSet& c2) {
    if (c1.empty()) return c2;
    if (c2.empty()) return c1;
    SliceSet out;
    // {sl, sl u sl_1, ..., sl u sl_n2} u (rest ⊔⊔ c2)
    for (size_t i = 0; i < c1.size(); ++i) {
        push_unique(out, c1[i]);
        for (auto& sl2 : c2) push_unique(out, slice_union(c1[i], sl2));
    }
    for (auto& sl2 : c2) push_unique(out, sl2);
    return out;
}

//--------------------------------------------------------------------------
// Trace helpers

namespace {

struct Tracer {
    InferSession& s;
    int depth = 0;

    bool on() const { return s.trace != nullptr; }

    void line(const std::string& text) {
        if (!on()) return;
        for (int i = 0; i < depth; ++i) *s.trace << "| ";
        *s.trace << text << "\n";
    }

    std::string occ_name(const std::string& name, const OccId& occ) const {
        auto it = s.occ_label.find(occ.path);
        if (it == s.occ_label.end()) return name;
        return it->second.first + "^(" + std::to_string(it->second.second) + ")";
    }

    std::string base_str(const Base& base) const {
        std::string out = "{";
        for (size_t i = 0; i < base.size(); ++i) {
            if (i) out += ", ";
            out += occ_name(base[i].name, base[i].occ) + ": " +
                   eal_format_trace(base[i].type, s.vars);
        }
        return out + "}";
    }

    std::string ids_str(const std::vector<ConstraintId>& ids) const {
        std::string out = "{";
        for (size_t i = 0; i < ids.size(); ++i) {
            if (i) out += ", ";
            out += "C" + std::to_string(ids[i]);
        }
        return out + "}";
    }

    std::string slice_str(const Slice& sl) const {
        std::string out = "{";
        for (size_t i = 0; i < sl.size(); ++i) {
            if (i) out += ", ";
            const Constraint& row = s.store.get(sl[i].cid);
            out += "(" + ConstraintStore::dump_row(row, s.vars) + ", [";
            for (size_t j = 0; j < sl[i].fvos.size(); ++j) {
                if (j) out += ", ";
                out += occ_name(sl[i].fvos[j].first, sl[i].fvos[j].second);
            }
            out += "])";
        }
        return out + "}";
    }

    std::string cpts_str(const SliceSet& cpts) const {
        std::string out = "{";
        for (size_t i = 0; i < cpts.size(); ++i) {
            if (i) out += ", ";
            out += slice_str(cpts[i]);
        }
        return out + "}";
    }

    void result(const SynthResult& r) {
        if (!on()) return;
        line("= <" + eal_format_trace(r.type, s.vars) + ", " + base_str(r.base) + ", " +
             ids_str(r.constraint_ids) + ", " + cpts_str(r.cpts) + ">");
    }
};

std::string sigma_of(const TypedTree& node) { return st_format(node.type); }

void assert_slice_paths(const SynthResult& r, const InferSession& s) {
    for (auto& sl : r.cpts)
        for (size_t i = 0; i < sl.size(); ++i)
            for (size_t j = 0; j < sl.size(); ++j)
                if (i != j && sl[i].node.is_prefix_of(sl[j].node))
                    throw InternalInvariantViolation(
                        "two critical points of one slice on one root-to-leaf path");
}

bool occ_in_slice(const OccId& occ, const Slice& sl) {
    for (auto& elem : sl)
        for (auto& [n, o] : elem.fvos)
            if (o == occ) return true;
    return false;
}

std::vector<ConstraintId> merge_ids(std::vector<ConstraintId> a,
                                    const std::vector<ConstraintId>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

void box_script_B(Base& base, EalPtr& gamma, const SliceSet& cpts, const OccId& subject,
                  InferSession& s) {
    // deterministic order: by smallest constraint id of the slice
    SliceSet ordered = cpts;
    std::sort(ordered.begin(), ordered.end(), [](const Slice& a, const Slice& b) {
        return a.front().cid < b.front().cid;
    });
    Tracer tr{s, s.trace_depth};
    for (auto& sl : ordered) {
        VarId c = s.vars.fresh(VarOrigin::C);
        LinExpr ce = LinExpr::var(c);
        for (auto& entry : base)
            if (!occ_in_slice(entry.occ, sl)) entry.type = eal_bang(ce, entry.type);
        gamma = eal_bang(ce, gamma);
        std::set<ConstraintId> cids;
        for (auto& elem : sl) cids.insert(elem.cid);
        for (ConstraintId cid : cids) s.store.subtract_var(cid, c);
        BoxEvent ev{c, subject, {}};
        for (auto& elem : sl) ev.holes.push_back(elem.node);
        s.events.push_back(std::move(ev));
        if (tr.on()) {
            std::string mods;
            for (ConstraintId cid : cids) {
                if (!mods.empty()) mods += ", ";
                mods += ConstraintStore::dump_row(s.store.get(cid), s.vars);
            }
            tr.line("B: slice " + tr.slice_str(sl) + " boxed by " + s.vars.name(c) +
                    "; rows now " + mods);
        }
    }
}

void boxing_wrapper(const TermPtr& subject_term, const OccId& subject, Base& base,
                    EalPtr& gamma, const SliceSet& cpts, InferSession& s) {
    Tracer tr{s, s.trace_depth};
    if (subject_term->is_var()) {
        tr.line("BB (" + format(subject_term) + ") = identity");
        return;
    }
    std::optional<BoxingAudit> audit;
    if (s.audit_boxing) {
        audit.emplace();
        audit->pre_store = s.store;
        audit->pre_base = base;
        audit->pre_gamma = gamma;
    }
    int pre_vars = s.vars.count();
    box_script_B(base, gamma, cpts, subject, s);
    VarId b = s.vars.fresh(VarOrigin::B);
    LinExpr be = LinExpr::var(b);
    for (auto& entry : base) entry.type = eal_bang(be, entry.type);
    gamma = eal_bang(be, gamma);
    s.events.push_back(BoxEvent{b, subject, {}});
    tr.line("BB (" + format(subject_term) + ") boxed by " + s.vars.name(b) + ": type " +
            eal_format_trace(gamma, s.vars) + ", base " + tr.base_str(base));
    if (audit) {
        audit->post_store = s.store;
        audit->post_base = base;
        audit->post_gamma = gamma;
        for (VarId v = pre_vars; v < s.vars.count(); ++v) audit->new_vars.push_back(v);
        s.audits.push_back(std::move(*audit));
    }
}

namespace {

struct Synthesizer {
    InferSession& s;

    SynthResult run(const TypedTree& node, const OccId& path) {
        Tracer tr{s, s.trace_depth};
        tr.line("S (" + format(node.node) + " : " + sigma_of(node) + ")");
        ++s.trace_depth;
        SynthResult r = dispatch(node, path);
        --s.trace_depth;
        Tracer{s, s.trace_depth + 1}.result(r);
        if (s.check_invariants) assert_slice_paths(r, s);
        s.node_type[path.path] = r.type;
        return r;
    }

    SynthResult dispatch(const TypedTree& node, const OccId& path) {
        switch (node.node->kind) {
            case Term::Kind::Var: return var_case(node, path);
            case Term::Kind::Abs: return abs_case(node, path);
            case Term::Kind::App: return app_case(node, path);
        }
        throw std::logic_error("bad term kind");
    }

    SynthResult var_case(const TypedTree& node, const OccId& path) {
        Tracer tr{s, s.trace_depth};
        EalPtr theta = proc_P(node.type, s.vars);
        tr.line("P (" + sigma_of(node) + ") = " + eal_format_trace(theta, s.vars));
        SynthResult r;
        r.type = theta;
        r.base.push_back(BaseEntry{node.node->name, path, theta});
        return r;
    }

    SynthResult abs_case(const TypedTree& node, const OccId& path) {
        Tracer tr{s, s.trace_depth};
        const TypedTree& body = node.children.at(0);
        OccId body_path{path.path + "b"};
        SynthResult rec = run(body, body_path);

        // occurrences bound by this lambda
        std::set<std::string> bound_occs;
        for (auto& [name, occ] : fvo(body.node))
            if (name == node.node->name) bound_occs.insert(occ.path);

        if (!bound_occs.empty()) {
            // first abstraction case: consume the slices having x in every list
            SliceSet passed, all = rec.cpts;
            std::vector<bool> consumed(all.size(), false);
            for (size_t i = 0; i < all.size(); ++i) {
                size_t lists_with_x = 0;
                for (auto& elem : all[i]) {
                    bool has = false;
                    for (auto& [n, o] : elem.fvos)
                        if (bound_occs.count(o.path)) { has = true; break; }
                    if (has) ++lists_with_x;
                }
                if (lists_with_x == all[i].size())
                    consumed[i] = true;
                else if (lists_with_x > 0)
                    ++s.partial_binder_slices;
            }
            for (size_t i = 0; i < all.size(); ++i)
                if (!consumed[i]) passed.push_back(all[i]);

            Base base = rec.base;
            EalPtr gamma = rec.type;
            boxing_wrapper(body.node, body_path, base, gamma, all, s);

            Base rest;
            std::vector<EalPtr> xs;
            for (auto& entry : base) {
                if (entry.name == node.node->name) xs.push_back(entry.type);
                else rest.push_back(entry);
            }
            SynthResult r;
            r.constraint_ids = rec.constraint_ids;
            ContractionRows cr = contract_C(xs);
            if (cr.has_ge1) {
                ConstraintId id = s.store.add(cr.ge1, CKind::Ge1);
                r.constraint_ids.push_back(id);
                tr.line("C: add " + ConstraintStore::dump_row(s.store.get(id), s.vars));
                for (auto& row : cr.eq0) {
                    ConstraintId eid = s.store.add(row, CKind::Eq0);
                    r.constraint_ids.push_back(eid);
                    tr.line("C: add " + ConstraintStore::dump_row(s.store.get(eid), s.vars));
                }
            } else {
                tr.line("C (single type) = {}");
            }
            s.abs_domain[path.path] = xs.front();
            r.type = eal_arrow(LinExpr{}, xs.front(), gamma);
            r.base = std::move(rest);
            r.cpts = std::move(passed);
            return r;
        }

        if (body.node->is_app()) {
            // second abstraction case: x not free, body an application
            Base base = rec.base;
            EalPtr gamma = rec.type;
            boxing_wrapper(body.node, body_path, base, gamma, rec.cpts, s);
            EalPtr theta = proc_P(node.type->left, s.vars);
            tr.line("P (" + st_format(node.type->left) + ") = " +
                    eal_format_trace(theta, s.vars));
            VarId n = s.vars.fresh(VarOrigin::N);
            LinExpr row = gamma->expo.minus(LinExpr::var(n));
            ConstraintId cid = s.store.add(row, CKind::Eq0);
            tr.line("add " + ConstraintStore::dump_row(s.store.get(cid), s.vars));
            EalPtr core = std::make_shared<EalType>(*gamma);
            const_cast<EalType*>(core.get())->expo = LinExpr::var(n);
            SynthResult r;
            r.constraint_ids = merge_ids(rec.constraint_ids, {cid});
            r.cpts = rec.cpts;
            r.cpts.push_back(canonical(Slice{SliceElem{cid, fvo(body.node), body_path}}));
            s.abs_domain[path.path] = theta;
            r.type = eal_arrow(LinExpr{}, theta, core);
            r.base = std::move(base);
            tr.line("cpt at body: " + tr.cpts_str({r.cpts.back()}));
            return r;
        }

        // third abstraction case: x not free, body not an application
        Base base = rec.base;
        EalPtr gamma = rec.type;
        boxing_wrapper(body.node, body_path, base, gamma, rec.cpts, s);
        EalPtr theta = proc_P(node.type->left, s.vars);
        tr.line("P (" + st_format(node.type->left) + ") = " + eal_format_trace(theta, s.vars));
        SynthResult r;
        r.constraint_ids = rec.constraint_ids;
        r.cpts = rec.cpts;
        s.abs_domain[path.path] = theta;
        r.type = eal_arrow(LinExpr{}, theta, gamma);
        r.base = std::move(base);
        return r;
    }

    SynthResult app_case(const TypedTree& node, const OccId& path) {
        Tracer tr{s, s.trace_depth};
        const TypedTree& fun = node.children.at(0);
        const TypedTree& arg = node.children.at(1);
        OccId fun_path{path.path + "f"};
        OccId arg_path{path.path + "a"};
        SynthResult mres = run(fun, fun_path);
        SynthResult nres = run(arg, arg_path);

        Base arg_base = nres.base;
        EalPtr theta3 = nres.type;
        boxing_wrapper(arg.node, arg_path, arg_base, theta3, nres.cpts, s);

        if (!mres.type->is_arrow)
            throw InternalInvariantViolation("function part synthesized a non-arrow type");
        EalPtr theta1 = mres.type->left;
        EalPtr gamma = mres.type->right;

        // the function type must not be exponential
        ConstraintId cid_fun = s.store.add(mres.type->expo, CKind::Eq0);
        tr.line("add " + ConstraintStore::dump_row(s.store.get(cid_fun), s.vars));

        // unify argument against the domain; the first row is the outer one
        bool arg_is_app = arg.node->is_app();
        std::vector<LinExpr> rows = arg_is_app ? unify_rows({theta3, theta1})
                                               : unify_rows({theta1, theta3});
        std::vector<ConstraintId> urow_ids;
        for (auto& row : rows) {
            ConstraintId id = s.store.add(row, CKind::Eq0);
            urow_ids.push_back(id);
            tr.line("U: add " + ConstraintStore::dump_row(s.store.get(id), s.vars));
        }

        SliceSet left_cpts = mres.cpts;
        if (fun.node->is_app())
            left_cpts.push_back(
                canonical(Slice{SliceElem{cid_fun, fvo(fun.node), fun_path}}));
        SliceSet right_cpts = nres.cpts;
        if (arg_is_app)
            right_cpts.push_back(
                canonical(Slice{SliceElem{urow_ids.front(), fvo(arg.node), arg_path}}));

        SynthResult r;
        r.type = gamma;
        r.base = mres.base;
        r.base.insert(r.base.end(), arg_base.begin(), arg_base.end());
        r.constraint_ids = merge_ids(mres.constraint_ids, nres.constraint_ids);
        r.constraint_ids.push_back(cid_fun);
        r.constraint_ids = merge_ids(std::move(r.constraint_ids), urow_ids);
        r.cpts = product_union(left_cpts, right_cpts);
        if (s.trace) tr.line("cpts = " + tr.cpts_str(r.cpts));
        return r;
    }
};

void label_occurrences(const TermPtr& t, InferSession& s) {
    std::map<std::string, int> counts;
    std::function<void(const TermPtr&)> walk = [&](const TermPtr& node) {
        switch (node->kind) {
            case Term::Kind::Var:
                s.occ_label[node->occ.path] = {node->name, ++counts[node->name]};
                return;
            case Term::Kind::Abs: walk(node->sub1); return;
            case Term::Kind::App: walk(node->sub1); walk(node->sub2); return;
        }
    };
    walk(t);
}

}  // namespace

SynthResult synth(const TypedTree& node, const OccId& path, InferSession& s) {
    return Synthesizer{s}.run(node, path);
}

TopResult synth_top(const TypedTree& tree, InferSession& s) {
    label_occurrences(tree.node, s);
    s.trace_depth = 0;
    Tracer tr{s, 0};
    SynthResult rec = synth(tree, OccId{}, s);

    Base base = rec.base;
    EalPtr theta = rec.type;
    boxing_wrapper(tree.node, OccId{}, base, theta, rec.cpts, s);

    // contract every repeated free variable, keeping its first entry
    std::vector<std::string> order;
    std::map<std::string, std::vector<EalPtr>> groups;
    for (auto& entry : base) {
        if (!groups.count(entry.name)) order.push_back(entry.name);
        groups[entry.name].push_back(entry.type);
    }
    TopResult out;
    out.type = theta;
    for (auto& name : order) {
        ContractionRows cr = contract_C(groups[name]);
        if (cr.has_ge1) {
            ConstraintId id = s.store.add(cr.ge1, CKind::Ge1);
            tr.line("C(" + name + "): add " + ConstraintStore::dump_row(s.store.get(id), s.vars));
            for (auto& row : cr.eq0) {
                ConstraintId eid = s.store.add(row, CKind::Eq0);
                tr.line("C(" + name + "): add " +
                        ConstraintStore::dump_row(s.store.get(eid), s.vars));
            }
        }
        for (auto& entry : base) {
            if (entry.name == name) {
                out.base.push_back(entry);
                break;
            }
        }
    }
    tr.line("top = <" + eal_format_trace(theta, s.vars) + ", " + tr.base_str(out.base) + ">");
    return out;
}

}  // namespace eal
