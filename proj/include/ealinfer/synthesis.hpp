#pragma once

#include <iosfwd>
#include <optional>

#include "ealinfer/lambda.hpp"
#include "ealinfer/simple_types.hpp"
#include "ealinfer/solver.hpp"

namespace eal {

// One critical point: a constraint row together with the free variable
// occurrences of the application subterm it sits at.
struct SliceElem {
    ConstraintId cid;
    std::vector<std::pair<std::string, OccId>> fvos;
    OccId node;  // root of the application the point marks

    bool operator==(const SliceElem& o) const { return cid == o.cid && node == o.node; }
};

// A slice is a set of critical points crossed jointly by one potential box;
// kept sorted by constraint id.
using Slice = std::vector<SliceElem>;
using SliceSet = std::vector<Slice>;

SliceSet product_union(const SliceSet& c1, const SliceSet& c2);

struct BaseEntry {
    std::string name;
    OccId occ;
    EalPtr type;
};
using Base = std::vector<BaseEntry>;

struct SynthResult {
    EalPtr type;
    Base base;
    std::vector<ConstraintId> constraint_ids;
    SliceSet cpts;
};

// A box added by the boxing functions: `var` boxes around the subtree at
// `subject`, except the subtrees hanging below the slice's critical points.
struct BoxEvent {
    VarId var;
    OccId subject;
    std::vector<OccId> holes;
};

struct BoxingAudit {
    ConstraintStore pre_store;
    Base pre_base;
    EalPtr pre_gamma;
    ConstraintStore post_store;
    Base post_base;
    EalPtr post_gamma;
    std::vector<VarId> new_vars;
};

class InternalInvariantViolation : public std::logic_error {
public:
    explicit InternalInvariantViolation(const std::string& msg) : std::logic_error(msg) {}
};

// One inference session: fresh variables, the constraint store, and the
// instrumentation the witness builder consumes. Confine to one thread.
struct InferSession {
    VarTable vars;
    ConstraintStore store;
    std::vector<BoxEvent> events;
    std::map<std::string, EalPtr> abs_domain;  // abs path -> domain type
    std::map<std::string, EalPtr> node_type;   // path -> type at synthesis time
    std::map<std::string, std::pair<std::string, int>> occ_label;  // occ path -> (name, index)

    std::ostream* trace = nullptr;
    int trace_depth = 0;
    bool check_invariants = true;
    bool audit_boxing = false;
    std::vector<BoxingAudit> audits;

    // diagnostics for the spec's open questions
    int partial_binder_slices = 0;
    int extra_outer_rows = 0;
};

// The boxing function for one subterm: processes every slice (fresh c each,
// banging the base entries outside the slice and the running type, and
// subtracting c from the slice's rows), in order of smallest constraint id.
void box_script_B(Base& base, EalPtr& gamma, const SliceSet& cpts, const OccId& subject,
                  InferSession& s);

// The wrapper: identity on variables, otherwise box_script_B followed by a
// fresh b around base and type.
void boxing_wrapper(const TermPtr& subject_term, const OccId& subject, Base& base,
                    EalPtr& gamma, const SliceSet& cpts, InferSession& s);

// Syntax-directed synthesis over a simply-typed tree.
SynthResult synth(const TypedTree& node, const OccId& path, InferSession& s);

struct TopResult {
    EalPtr type;
    Base base;  // one entry per free variable
};

// Top level: synth, box the whole term through the remaining critical points,
// drop them, and contract repeated free variables.
TopResult synth_top(const TypedTree& tree, InferSession& s);

}  // namespace eal
