#pragma once

#include "ealinfer/pipeline.hpp"

namespace eal {

// Stable fields: term, simple_type, eal_type, base, constraints[], outcome,
// solutions[] {valuation, concrete_type, witness}; deterministic ordering.
std::string export_json(const InferenceRun& run);

// Parses a report back, revalidating it: term and types re-parse, witness
// entries typecheck against their recorded basis and type. Returns the
// normalized re-export (equal to the input for exporter output).
std::string reexport_json(const std::string& text);

// DOT digraph of the decorated syntax tree under one solution: nodes carry
// instantiated types, boxes render as nested clusters by level.
std::string export_dot(const InferenceRun& run, const Valuation& x);

// Light structural validity check used by the tests: brace balance, node and
// edge statement shapes, unique cluster names.
bool dot_is_valid(const std::string& dot, std::string* why = nullptr);

}  // namespace eal
