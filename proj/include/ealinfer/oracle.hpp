#pragma once

#include "ealinfer/neal.hpp"
#include "ealinfer/simple_types.hpp"

namespace eal {

struct DecorationBudget {
    int max_boxes_per_edge = 2;   // stacked promotions at one position
    int max_total_boxes = 8;      // promotions in one candidate
    int type_bang_bound = -1;     // bang count per type position; -1 = per-edge bound
    long node_limit = 5'000'000;  // search-space guard
};

class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

struct OracleJudgment {
    std::vector<std::pair<std::string, EalPtr>> basis;  // sorted by name
    EalPtr type;

    std::string format() const;
    bool operator<(const OracleJudgment& o) const { return format() < o.format(); }
};

// All bang-decorations of a simple type with per-position counts in
// [0, bound].
std::vector<EalPtr> decorations(const STPtr& sigma, int bound);

// Candidate decorated terms: promotions on non-variable subterms (stacked up
// to the per-edge budget, optionally pulling application subterms out as
// explicit-substitution arguments), contractions canonically at the binder
// (top level for free variables).
std::vector<NealPtr> enumerate_candidates(const TermPtr& t, const DecorationBudget& budget);

// Ground truth for the main theorems at desk scale: every derivable judgment
// (within the budgeted type universe) over every candidate decoration of t.
// Checking is derivation search in the term assignment system; it does not
// touch the synthesis or solver modules.
std::set<OracleJudgment> enumerate_judgments(const TermPtr& t, const STPtr& sigma,
                                             const DecorationBudget& budget);

}  // namespace eal
