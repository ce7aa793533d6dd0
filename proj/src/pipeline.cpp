#include "ealinfer/pipeline.hpp"

#include <sstream>

namespace eal {

int exit_code(Outcome o) {
    switch (o) {
        case Outcome::Sat: return 0;
        case Outcome::Unsat: return 1;
        case Outcome::Unknown: return 2;
        case Outcome::NotSimplyTypable: return 3;
    }
    return 2;
}

namespace {

void pin_type_rows(ConstraintStore& store, const EalPtr& general, const EalPtr& target) {
    if (!st_eq(erase_type(general), erase_type(target)))
        throw NotAnInstance("pinned EAL type erases to " + st_format(erase_type(target)) +
                            " but the term is typed at " + st_format(erase_type(general)));
    for (auto& row : unify_rows({general, target})) store.add(row, CKind::Eq0);
}

}  // namespace

InferenceRun run_inference(const std::string& term_text, const InferOptions& opts) {
    InferenceRun run;
    run.input = term_text;
    run.term = parse_term(term_text);

    EalPtr pin;
    if (opts.pin_eal) pin = parse_concrete_eal(*opts.pin_eal);

    try {
        if (opts.simple_type) {
            run.sigma = parse_simple_type(*opts.simple_type);
            run.tree = annotate(run.term, run.sigma);
        } else if (pin) {
            run.sigma = erase_type(pin);
            run.tree = annotate(run.term, run.sigma);
        } else {
            auto [sigma, tree] = principal_type(run.term);
            run.sigma = sigma;
            run.tree = tree;
        }
    } catch (const NotSimplyTypable& e) {
        run.outcome = Outcome::NotSimplyTypable;
        run.diagnostic = e.what();
        return run;
    } catch (const NotAnInstance& e) {
        run.outcome = Outcome::NotSimplyTypable;
        run.diagnostic = e.what();
        return run;
    }

    std::ostringstream trace;
    if (opts.want_trace) run.session.trace = &trace;
    run.session.audit_boxing = opts.audit_boxing;

    run.top = synth_top(run.tree, run.session);
    run.session.trace = nullptr;
    run.trace_text = trace.str();

    if (pin) pin_type_rows(run.session.store, run.top.type, pin);

    run.solve_outcome = solve(run.session.store, run.session.vars, opts.bound, opts.solutions);
    switch (run.solve_outcome.kind) {
        case SolveOutcome::Kind::Unsat:
            run.outcome = Outcome::Unsat;
            run.diagnostic = run.solve_outcome.reason;
            return run;
        case SolveOutcome::Kind::Unknown:
            run.outcome = Outcome::Unknown;
            return run;
        case SolveOutcome::Kind::Sat: break;
    }
    run.outcome = Outcome::Sat;

    for (auto& x : run.solve_outcome.solutions) {
        Solution sol;
        sol.valuation = x;
        sol.concrete_type = instantiate(run.top.type, x);
        for (auto& entry : run.top.base)
            sol.concrete_base.emplace_back(entry.name, instantiate(entry.type, x));
        if (opts.build_witnesses)
            sol.witness = build_witness(run.term, run.session, x, run.top.type, run.top.base);
        run.solutions.push_back(std::move(sol));
    }
    return run;
}

SolveOutcome pinned_solve(const InferenceRun& run, const EalPtr& target_type,
                          const std::vector<std::pair<std::string, EalPtr>>* target_basis,
                          long bound, size_t max_solutions) {
    ConstraintStore store = run.session.store;
    pin_type_rows(store, run.top.type, target_type);
    if (target_basis) {
        for (auto& [name, ty] : *target_basis) {
            for (auto& entry : run.top.base)
                if (entry.name == name)
                    for (auto& row : unify_rows({entry.type, ty})) store.add(row, CKind::Eq0);
        }
    }
    return solve(store, run.session.vars, bound, max_solutions);
}

}  // namespace eal
