#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ealinfer/lambda.hpp"

namespace eal {

struct SimpleType;
using STPtr = std::shared_ptr<const SimpleType>;

// Base("o") is the ground base type; Var carries a schema variable name.
struct SimpleType {
    enum class Kind { Base, Var, Arrow };
    Kind kind;
    std::string name;   // Base / Var
    STPtr left, right;  // Arrow
};

STPtr st_base();
STPtr st_var(std::string name);
STPtr st_arrow(STPtr left, STPtr right);

bool st_eq(const STPtr& a, const STPtr& b);
std::string st_format(const STPtr& t);

// `o`, identifiers as schema vars, `->` right-associative, parentheses.
STPtr parse_simple_type(const std::string& text);

class NotSimplyTypable : public std::runtime_error {
public:
    explicit NotSimplyTypable(const std::string& msg) : std::runtime_error(msg) {}
};

class NotAnInstance : public std::runtime_error {
public:
    explicit NotAnInstance(const std::string& msg) : std::runtime_error(msg) {}
};

// The input term with every node carrying its simple type.
struct TypedTree {
    TermPtr node;
    STPtr type;
    STPtr binder_type;                // Abs nodes: type of the bound variable
    std::vector<TypedTree> children;  // Abs: [body]; App: [fun, arg]
};

// Most general simple typing; schema variables named a, b, c, ... in order of
// first appearance. Free variables of the term are typed in the tree's leaves
// (all occurrences of one name unified).
std::pair<STPtr, TypedTree> principal_type(const TermPtr& t);

// TypedTree specialized to `target`, which must be an instance of the
// principal schema (schema vars map to arbitrary simple types; `o` is rigid).
TypedTree annotate(const TermPtr& t, const STPtr& target);

// Local typing rules hold at every node (instance property check).
bool check_typed_tree(const TypedTree& tree);

// First-order matching oracle: does a substitution S on schema vars exist
// with S(schema) = target?
bool is_instance_of(const STPtr& schema, const STPtr& target);

}  // namespace eal
