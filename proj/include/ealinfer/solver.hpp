#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ealinfer/eal_types.hpp"

namespace eal {

using ConstraintId = int;

enum class CKind { Eq0, Ge1 };

struct Constraint {
    ConstraintId id;
    LinExpr expr;
    CKind kind;
};

// Ordered collection with stable ids. Boxing mutates rows in place by
// subtracting a fresh box variable; ids are never reused.
class ConstraintStore {
public:
    ConstraintId add(LinExpr expr, CKind kind) {
        ConstraintId id = static_cast<ConstraintId>(rows_.size());
        rows_.push_back(Constraint{id, std::move(expr), kind});
        return id;
    }

    // The boxing rule A^j - c.
    void subtract_var(ConstraintId id, VarId c) {
        rows_.at(static_cast<size_t>(id)).expr.add(LinExpr::var(c), -1);
    }

    const Constraint& get(ConstraintId id) const { return rows_.at(static_cast<size_t>(id)); }
    const std::vector<Constraint>& rows() const { return rows_; }
    size_t size() const { return rows_.size(); }

    // One line per constraint: `C<id>: +n1 -n2 = 0` / `C<id>: +b6 +b5 >= 1`.
    std::string dump(const VarTable& vars) const;
    static std::string dump_row(const Constraint& c, const VarTable& vars);

private:
    std::vector<Constraint> rows_;
};

struct EliminationResult {
    // eliminated variable -> expression over free variables (may have constant)
    std::map<VarId, LinExpr> substitution;
    std::vector<Constraint> residual;
    bool contradiction = false;
    std::pair<ConstraintId, ConstraintId> certificate{-1, -1};
    std::string reason;
};

// Pivots on +-1 coefficients in Eq0 rows, propagates forced zeros (an Eq0 row
// whose variable coefficients share one sign pins them all), and reports
// contradictions bound-independently.
EliminationResult eliminate_equalities(const ConstraintStore& store);

struct SolveOutcome {
    enum class Kind { Sat, Unsat, Unknown };
    Kind kind;
    Valuation witness;                              // Sat
    std::vector<Valuation> solutions;               // Sat: up to `max_solutions`, ordered
    std::pair<ConstraintId, ConstraintId> certificate{-1, -1};  // Unsat
    std::string reason;                             // Unsat narrative
    long bound = 0;                                 // Unknown
};

// Bounded feasibility search over the residual system; witnesses are ordered
// by total sum of all variables, ties broken lexicographically by variable id.
SolveOutcome solve(const ConstraintStore& store, const VarTable& vars, long bound,
                   size_t max_solutions = 1);

bool check_solution(const ConstraintStore& store, const Valuation& x);

}  // namespace eal
