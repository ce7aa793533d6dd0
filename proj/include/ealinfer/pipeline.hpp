#pragma once

#include <optional>

#include "ealinfer/synthesis.hpp"
#include "ealinfer/witness.hpp"

namespace eal {

struct InferOptions {
    std::optional<std::string> simple_type;  // pin the skeleton
    std::optional<std::string> pin_eal;      // pin the resulting EAL type
    long bound = 8;
    size_t solutions = 1;
    bool want_trace = false;
    bool audit_boxing = false;
    bool build_witnesses = true;
};

struct Solution {
    Valuation valuation;
    EalPtr concrete_type;
    std::vector<std::pair<std::string, EalPtr>> concrete_base;
    NealPtr witness;
};

enum class Outcome { Sat, Unsat, Unknown, NotSimplyTypable };

struct InferenceRun {
    std::string input;
    TermPtr term;
    STPtr sigma;
    TypedTree tree;
    InferSession session;
    TopResult top;
    SolveOutcome solve_outcome{};
    std::vector<Solution> solutions;
    std::string trace_text;
    Outcome outcome = Outcome::Unknown;
    std::string diagnostic;
};

// parse -> principal/annotate -> synth_top -> (pin) -> solve -> witnesses
InferenceRun run_inference(const std::string& term_text, const InferOptions& opts);

// Re-solves a finished run's system on a copy with the result type (and
// optionally the base) pinned to concrete targets.
SolveOutcome pinned_solve(const InferenceRun& run, const EalPtr& target_type,
                          const std::vector<std::pair<std::string, EalPtr>>* target_basis,
                          long bound, size_t max_solutions = 1);

int exit_code(Outcome o);

}  // namespace eal
