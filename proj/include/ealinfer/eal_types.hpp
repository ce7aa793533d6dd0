#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ealinfer/simple_types.hpp"

namespace eal {

using VarId = int;

// p: processing (type skeleton), b: outer box, c: critical-point box,
// n: decoration variable (abstraction over a non-occurring binder).
enum class VarOrigin { P, B, C, N };

// Session-scoped fresh-variable supply. Pretty names p1, b1, c1, n1 number
// each origin independently, like the paper's traces.
class VarTable {
public:
    VarId fresh(VarOrigin origin);
    VarOrigin origin(VarId v) const { return info_.at(static_cast<size_t>(v)).first; }
    std::string name(VarId v) const;
    int count() const { return static_cast<int>(info_.size()); }

private:
    std::vector<std::pair<VarOrigin, int>> info_;
    int counters_[4] = {0, 0, 0, 0};
};

// Sum of box variables with integer coefficients (the paper's rules only ever
// produce +-1) plus an integer constant used by pin rows; type exponents keep
// the constant at zero.
struct LinExpr {
    std::vector<std::pair<VarId, int>> terms;  // sorted by VarId, no zero coeffs
    long constant = 0;

    static LinExpr var(VarId v) { return LinExpr{{{v, 1}}, 0}; }
    static LinExpr of_constant(long k) { return LinExpr{{}, k}; }

    bool is_zero() const { return terms.empty() && constant == 0; }
    bool empty_vars() const { return terms.empty(); }
    int coeff(VarId v) const;

    LinExpr& add(const LinExpr& other, int scale = 1);
    LinExpr plus(const LinExpr& other) const;
    LinExpr minus(const LinExpr& other) const;

    long eval(const std::map<VarId, long>& valuation) const;

    bool operator==(const LinExpr& o) const { return terms == o.terms && constant == o.constant; }
};

std::string lin_format(const LinExpr& e, const VarTable& vars);

using Valuation = std::map<VarId, long>;

struct EalType;
using EalPtr = std::shared_ptr<const EalType>;

// General EAL-type: a simple-type shape where every position carries a linear
// expression of box variables. Nested bangs merge eagerly, so the expo here is
// the whole sum at this position.
struct EalType {
    LinExpr expo;
    bool is_arrow = false;
    std::string atom;   // base position: "o" or a schema variable name
    EalPtr left, right; // arrow position
};

EalPtr eal_atom(LinExpr expo, std::string atom);
EalPtr eal_arrow(LinExpr expo, EalPtr left, EalPtr right);
// !^e t, merging with t's own outer exponent.
EalPtr eal_bang(const LinExpr& e, const EalPtr& t);

bool eal_eq(const EalPtr& a, const EalPtr& b);

class ShapeMismatch : public std::runtime_error {
public:
    explicit ShapeMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

class MissingVariable : public std::runtime_error {
public:
    explicit MissingVariable(const std::string& msg) : std::runtime_error(msg) {}
};

// P: fresh p exponents at every position of the simple type.
EalPtr proc_P(const STPtr& sigma, VarTable& vars);

STPtr erase_type(const EalPtr& theta);

// U: equality rows (as expressions meaning expr = 0) making all types
// syntactically identical under any satisfying valuation. Rows are emitted
// outermost-first: the first row is always the outer-exponent equality of the
// whole types.
std::vector<LinExpr> unify_rows(const std::vector<EalPtr>& types);

// C: for a single type, nothing; otherwise the unification rows plus the
// requirement that the first type's outer exponent is >= 1 (returned
// separately).
struct ContractionRows {
    bool has_ge1 = false;
    LinExpr ge1;                // outer exponent of the first type
    std::vector<LinExpr> eq0;   // unification rows
};
ContractionRows contract_C(const std::vector<EalPtr>& types);

// Every exponent replaced by its (nonnegative) value; result has
// constant-only exponents.
EalPtr instantiate(const EalPtr& theta, const Valuation& x);

bool is_concrete(const EalPtr& t);
void vars_of(const EalPtr& t, std::vector<VarId>& out);

// `!^{n1+n5}(A -o B)` / `!!o` / `!^2 o`; concrete types print with repeated
// bangs, general ones with !^{...}; (n -o m) shorthand is accepted on input.
std::string eal_format(const EalPtr& t, const VarTable& vars);
std::string eal_format_concrete(const EalPtr& t);

// Parses a concrete EAL type (integer bang counts only).
EalPtr parse_concrete_eal(const std::string& text);

// Parses the general form `!^{n1+n5}(A -o B)`; variable names must be present
// in `names`. Integer bang counts are also accepted.
EalPtr parse_general_eal(const std::string& text, const std::map<std::string, VarId>& names);

std::map<std::string, VarId> name_map(const VarTable& vars);

// Trace shorthand in the paper's style: (n -o m) for (!^n o -o !^m o), outer
// exponents printed without the !^ mark.
std::string eal_format_trace(const EalPtr& t, const VarTable& vars);

}  // namespace eal
