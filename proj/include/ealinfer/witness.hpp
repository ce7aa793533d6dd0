#pragma once

#include "ealinfer/neal.hpp"
#include "ealinfer/synthesis.hpp"

namespace eal {

// Number of instantiated boxes containing each node of the term, from the
// session's box events: a b-event boxes its whole subject subtree, a c-event
// boxes its subject minus the subtrees under its slice's critical points.
std::map<std::string, long> box_levels(const TermPtr& term, const InferSession& s,
                                       const Valuation& x);

struct WitnessChecks {
    bool typed = false;
    bool candidate = false;
    bool erasure_ok = false;
};

// Builds the NEAL witness for one solution: assigns box levels, recarves the
// instantiated boxes into nested promotions (holes at critical points become
// explicit-substitution arguments), inserts contractions for repeated
// variables at their binder (top level for free variables), and removes the
// promote-in-argument redexes the restack can leave behind. The result is
// machine-checked: legal, candidate, erases back to the term, and typechecks
// at the instantiated basis and type.
NealPtr build_witness(const TermPtr& term, const InferSession& s, const Valuation& x,
                      const EalPtr& final_type, const Base& final_base,
                      WitnessChecks* checks = nullptr);

}  // namespace eal
