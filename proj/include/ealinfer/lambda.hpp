#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eal {

// Occurrence identity: the path from the root of the syntax tree.
// Steps: 'b' = into an abstraction body, 'f' = function part, 'a' = argument part.
struct OccId {
    std::string path;

    bool operator==(const OccId& o) const { return path == o.path; }
    bool operator!=(const OccId& o) const { return path != o.path; }
    bool operator<(const OccId& o) const { return path < o.path; }

    // true iff this node lies on the path from the root to `other` (inclusive)
    bool is_prefix_of(const OccId& other) const {
        return other.path.size() >= path.size() &&
               other.path.compare(0, path.size(), path) == 0;
    }
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

// Type-free lambda term. Immutable; safe to share across threads.
struct Term {
    enum class Kind { Var, Abs, App };

    Kind kind;
    std::string name;   // Var: variable name; Abs: binder name
    OccId occ;          // valid for Var nodes (assigned by tree path)
    TermPtr sub1;       // Abs: body; App: function
    TermPtr sub2;       // App: argument

    bool is_app() const { return kind == Kind::App; }
    bool is_var() const { return kind == Kind::Var; }
    bool is_abs() const { return kind == Kind::Abs; }
};

TermPtr mk_var(std::string name);
TermPtr mk_abs(std::string binder, TermPtr body);
TermPtr mk_app(TermPtr fun, TermPtr arg);

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
    size_t position;
};

// Surface grammar: identifiers; `\x.` or utf-8 `λx.` binds the minimal item
// after the dot; application by juxtaposition (left-associative) or explicit
// parentheses, so `(\x.M N)` reads ((\x.M) N).
TermPtr parse_term(const std::string& text);

// Paper form: applications fully parenthesized, `\` for lambda.
std::string format(const TermPtr& t);

// Re-assigns OccIds by tree path (root = empty path).
TermPtr renumber(const TermPtr& t);

// Free variable occurrences, in the defining clause order:
// FVO(x)=[x]; FVO(\x.M)=FVO(M)-x; FVO((M N))=FVO(M)::FVO(N).
std::vector<std::pair<std::string, OccId>> fvo(const TermPtr& t);

std::vector<std::string> free_vars(const TermPtr& t);

// Capture-avoiding substitution body{replacement/name}; OccIds are fresh in
// the result.
TermPtr subst(const TermPtr& body, const std::string& name, const TermPtr& replacement);

// Simultaneous capture-avoiding substitution.
TermPtr subst_multi(const TermPtr& body, const std::map<std::string, TermPtr>& repl);

bool alpha_eq(const TermPtr& a, const TermPtr& b);

// Locates the subterm at the given root path.
TermPtr subterm_at(const TermPtr& t, const OccId& node);

int term_size(const TermPtr& t);

}  // namespace eal
