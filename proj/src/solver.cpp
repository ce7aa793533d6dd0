#include "ealinfer/solver.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace eal {

std::string ConstraintStore::dump_row(const Constraint& c, const VarTable& vars) {
    std::string line = "C" + std::to_string(c.id) + ":";
    for (auto& [v, coeff] : c.expr.terms) {
        line += " ";
        line += coeff >= 0 ? "+" : "-";
        if (coeff != 1 && coeff != -1) line += std::to_string(std::abs(coeff)) + "*";
        line += vars.name(v);
    }
    if (c.expr.constant != 0 || c.expr.terms.empty()) {
        line += " ";
        line += c.expr.constant >= 0 ? "+" : "-";
        line += std::to_string(std::abs(c.expr.constant));
    }
    line += c.kind == CKind::Eq0 ? " = 0" : " >= 1";
    return line;
}

std::string ConstraintStore::dump(const VarTable& vars) const {
    std::string out;
    for (auto& c : rows_) {
        out += dump_row(c, vars);
        out += "\n";
    }
    return out;
}

namespace {

long gcd_l(long a, long b) { return std::gcd(a, b); }

// Returns false on an unsatisfiable row (non-divisible constant).
bool gcd_normalize(LinExpr& e) {
    if (e.terms.empty()) return true;
    long g = 0;
    for (auto& [v, c] : e.terms) g = gcd_l(g, std::labs(c));
    if (g <= 1) return true;
    if (e.constant % g != 0) return false;
    for (auto& [v, c] : e.terms) c /= static_cast<int>(g);
    e.constant /= g;
    return true;
}

void substitute(LinExpr& e, VarId v, const LinExpr& rhs) {
    int c = e.coeff(v);
    if (c == 0) return;
    e.add(LinExpr::var(v), -c);
    e.add(rhs, c);
}

}  // namespace

EliminationResult eliminate_equalities(const ConstraintStore& store) {
    EliminationResult out;
    std::vector<Constraint> rows = store.rows();
    std::vector<ConstraintId> last_touch(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) last_touch[i] = rows[i].id;

    auto fail = [&](size_t row_idx, const std::string& why) {
        out.contradiction = true;
        out.certificate = {rows[row_idx].id, last_touch[row_idx]};
        out.reason = why;
    };

    std::vector<bool> dead(rows.size(), false);

    auto apply_sub = [&](VarId v, const LinExpr& rhs, ConstraintId source) {
        for (size_t i = 0; i < rows.size(); ++i) {
            if (dead[i] || rows[i].expr.coeff(v) == 0) continue;
            substitute(rows[i].expr, v, rhs);
            last_touch[i] = source;
        }
        for (auto& [ev, eexpr] : out.substitution) substitute(eexpr, v, rhs);
        out.substitution[v] = rhs;
    };

    bool changed = true;
    while (changed && !out.contradiction) {
        changed = false;
        for (size_t i = 0; i < rows.size() && !out.contradiction; ++i) {
            if (dead[i]) continue;
            Constraint& row = rows[i];
            if (row.kind == CKind::Eq0) {
                if (!gcd_normalize(row.expr)) {
                    fail(i, "equality has no integer solution");
                    break;
                }
                if (row.expr.terms.empty()) {
                    if (row.expr.constant != 0) { fail(i, "equality reduces to nonzero constant"); break; }
                    dead[i] = true;
                    continue;
                }
                bool all_pos = std::all_of(row.expr.terms.begin(), row.expr.terms.end(),
                                           [](auto& t) { return t.second > 0; });
                bool all_neg = std::all_of(row.expr.terms.begin(), row.expr.terms.end(),
                                           [](auto& t) { return t.second < 0; });
                if ((all_pos && row.expr.constant >= 0) || (all_neg && row.expr.constant <= 0)) {
                    if (row.expr.constant != 0) {
                        fail(i, "sum of nonnegative variables forced negative");
                        break;
                    }
                    // every variable in the row is forced to zero
                    auto terms = row.expr.terms;
                    dead[i] = true;
                    for (auto& [v, c] : terms) apply_sub(v, LinExpr::of_constant(0), row.id);
                    changed = true;
                    continue;
                }
                // pivot on a +-1 coefficient: prefer the highest variable id
                VarId pivot = -1;
                int pivot_coeff = 0;
                for (auto& [v, c] : row.expr.terms)
                    if (c == 1 || c == -1) { pivot = v; pivot_coeff = c; }
                if (pivot >= 0) {
                    // c*v + rest = 0  =>  v = -rest/c, expressed as -c*expr + v
                    LinExpr rhs;
                    rhs.add(row.expr, -pivot_coeff);
                    rhs.add(LinExpr::var(pivot), 1);
                    dead[i] = true;
                    apply_sub(pivot, rhs, row.id);
                    changed = true;
                }
            } else {  // Ge1
                if (row.expr.terms.empty()) {
                    if (row.expr.constant >= 1) { dead[i] = true; continue; }
                    fail(i, "contraction requirement reduces to " +
                                std::to_string(row.expr.constant) + " >= 1");
                    break;
                }
                bool no_pos = std::all_of(row.expr.terms.begin(), row.expr.terms.end(),
                                          [](auto& t) { return t.second < 0; });
                if (no_pos && row.expr.constant < 1) {
                    fail(i, "contraction requirement cannot reach 1");
                    break;
                }
            }
        }
    }

    if (!out.contradiction)
        for (size_t i = 0; i < rows.size(); ++i)
            if (!dead[i]) out.residual.push_back(rows[i]);
    return out;
}

namespace {

struct Candidate {
    long total;
    std::vector<long> values;  // by VarId, the full valuation
};

bool candidate_less(const Candidate& a, const Candidate& b) {
    if (a.total != b.total) return a.total < b.total;
    return a.values < b.values;
}

}  // namespace

bool check_solution(const ConstraintStore& store, const Valuation& x) {
    for (auto& [v, val] : x)
        if (val < 0) return false;
    for (auto& row : store.rows()) {
        long val;
        try {
            val = row.expr.eval(x);
        } catch (const MissingVariable&) {
            return false;
        }
        if (row.kind == CKind::Eq0 ? val != 0 : val < 1) return false;
    }
    return true;
}

SolveOutcome solve(const ConstraintStore& store, const VarTable& vars, long bound,
                   size_t max_solutions) {
    SolveOutcome out;
    EliminationResult elim = eliminate_equalities(store);
    if (elim.contradiction) {
        out.kind = SolveOutcome::Kind::Unsat;
        out.certificate = elim.certificate;
        out.reason = elim.reason;
        return out;
    }

    // Variables that still matter: those in residual rows or in substitution
    // right-hand sides. Everything else minimizes at zero.
    std::set<VarId> relevant_set;
    for (auto& row : elim.residual)
        for (auto& [v, c] : row.expr.terms)
            if (!elim.substitution.count(v)) relevant_set.insert(v);
    for (auto& [ev, rhs] : elim.substitution)
        for (auto& [v, c] : rhs.terms)
            if (!elim.substitution.count(v)) relevant_set.insert(v);
    std::vector<VarId> relevant(relevant_set.begin(), relevant_set.end());
    const size_t k = relevant.size();
    const int total_vars = vars.count();

    auto expand = [&](const std::vector<long>& assign) -> std::optional<Candidate> {
        Valuation val;
        for (size_t i = 0; i < k; ++i) val[relevant[i]] = assign[i];
        for (auto& [ev, rhs] : elim.substitution) {
            long v = rhs.eval(val);
            if (v < 0) return std::nullopt;
            val[ev] = v;
        }
        for (auto& row : elim.residual) {
            long value = row.expr.eval(val);
            if (row.kind == CKind::Eq0 ? value != 0 : value < 1) return std::nullopt;
        }
        Candidate c;
        c.values.assign(static_cast<size_t>(total_vars), 0);
        c.total = 0;
        for (auto& [v, value] : val) {
            c.values[static_cast<size_t>(v)] = value;
            c.total += value;
        }
        return c;
    };

    std::vector<Candidate> best;
    auto offer = [&](Candidate&& c) {
        best.push_back(std::move(c));
        std::sort(best.begin(), best.end(), candidate_less);
        if (best.size() > max_solutions) best.resize(max_solutions);
    };

    const long max_level = bound * static_cast<long>(k);
    const long long budget = 50'000'000;  // guard against pathological systems
    long long spent = 0;
    std::vector<long> assign(k, 0);
    for (long level = 0; level <= max_level && spent < budget; ++level) {
        // stop when nothing at this level can improve the kept set
        if (best.size() == max_solutions && best.back().total < level) break;
        if (k == 0) {
            if (level == 0)
                if (auto c = expand(assign)) offer(std::move(*c));
            continue;
        }
        // enumerate assignments with sum == level, each value in [0, bound],
        // lexicographically by variable id
        std::function<void(size_t, long)> rec = [&](size_t idx, long remaining) {
            if (spent >= budget) return;
            if (idx + 1 == k) {
                if (remaining <= bound) {
                    assign[idx] = remaining;
                    ++spent;
                    if (auto c = expand(assign)) offer(std::move(*c));
                }
                return;
            }
            for (long v = 0; v <= std::min(bound, remaining); ++v) {
                assign[idx] = v;
                rec(idx + 1, remaining - v);
            }
        };
        rec(0, level);
    }

    if (best.empty()) {
        out.kind = SolveOutcome::Kind::Unknown;
        out.bound = bound;
        return out;
    }
    out.kind = SolveOutcome::Kind::Sat;
    for (auto& c : best) {
        Valuation v;
        for (int i = 0; i < total_vars; ++i) v[i] = c.values[static_cast<size_t>(i)];
        out.solutions.push_back(std::move(v));
    }
    out.witness = out.solutions.front();
    return out;
}

}  // namespace eal
