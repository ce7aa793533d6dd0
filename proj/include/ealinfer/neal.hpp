#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ealinfer/eal_types.hpp"
#include "ealinfer/lambda.hpp"

namespace eal {

struct NealTerm;
using NealPtr = std::shared_ptr<const NealTerm>;

// Elementary affine terms: var / abs / app / promote with explicit
// substitutions !(M)[M1/x1,...,Mn/xn] / contraction M[N/x,y].
struct NealTerm {
    enum class Kind { Var, Abs, App, Promote, Contract };

    Kind kind;
    std::string name;   // Var name; Abs binder
    EalPtr annot;       // optional concrete annotation on an Abs binder
    NealPtr sub1;       // Abs body; App fun; Promote body; Contract body
    NealPtr sub2;       // App arg; Contract shared
    std::vector<std::pair<NealPtr, std::string>> subs;  // Promote: (arg, binder)
    std::string c1, c2;  // Contract: the two bound names
};

NealPtr nv(std::string name);
NealPtr nabs(std::string binder, NealPtr body, EalPtr annot = nullptr);
NealPtr napp(NealPtr fun, NealPtr arg);
NealPtr npromote(NealPtr body, std::vector<std::pair<NealPtr, std::string>> subs);
NealPtr ncontract(NealPtr body, NealPtr shared, std::string x, std::string y);

class NotLegal : public std::runtime_error {
public:
    explicit NotLegal(const std::string& msg) : std::runtime_error(msg) {}
};

class IllTyped : public std::runtime_error {
public:
    explicit IllTyped(const std::string& msg) : std::runtime_error(msg) {}
};

class NoRedex : public std::runtime_error {
public:
    explicit NoRedex(const std::string& msg) : std::runtime_error(msg) {}
};

std::set<std::string> neal_fv(const NealPtr& p);

// Legal-term conditions: application parts have disjoint FV, a promote's body
// has exactly the sub binders free and its arguments pairwise disjoint FV,
// contraction body and shared part have disjoint FV.
bool neal_legal(const NealPtr& p, std::string* why = nullptr);

// Capture-avoiding substitution p{M/x} with the fresh renamings the calculus
// prescribes for promote and contract binders.
NealPtr neal_subst(const NealPtr& p, const std::string& x, const NealPtr& m);

// (.)* : forget the exponential structure.
TermPtr erase_star(const NealPtr& p);

using NealBasis = std::map<std::string, EalPtr>;

// Syntax-directed checking in the term assignment system; weakening is
// implicit. Lambda binders in inference position need annotations.
EalPtr neal_typecheck(const NealBasis& basis, const NealPtr& p);
void neal_check(const NealBasis& basis, const NealPtr& p, const EalPtr& expected);

enum class Rule { Beta, Dup, BangBang, AppC, BangC, CC, LamC };

const char* rule_name(Rule r);
std::vector<Rule> all_rules();
std::vector<Rule> nonbeta_rules();

// Child indices: Abs 0=body; App 0=fun 1=arg; Promote 0=body, 1+i=arg i;
// Contract 0=body 1=shared.
using NealPath = std::vector<int>;

bool redex_matches(const NealPtr& p, Rule r);

// Rewrites the redex at `where` (which must match), introducing fresh
// variables where the rules demand them.
NealPtr reduce_step(const NealPtr& p, Rule r, const NealPath& where);

// Leftmost-outermost position where `r` matches, if any.
std::optional<NealPath> find_redex(const NealPtr& p, Rule r);

// Exhausts {dup, !-!, @-c, !-c, c-c, lam-c}.
NealPtr normalize_nonbeta(const NealPtr& p);

// L: abstractions and applications count one, the rest are transparent.
int neal_length(const NealPtr& p);

// Candidate EAL-terms: non-beta normal, simple (contracts only variables and
// L is preserved by erasure), live contraction variables, non-variable
// promote bodies.
bool is_candidate(const NealPtr& p, std::string* why = nullptr);

std::string neal_format(const NealPtr& p);
NealPtr parse_neal(const std::string& text);

bool neal_alpha_eq(const NealPtr& a, const NealPtr& b);

}  // namespace eal
