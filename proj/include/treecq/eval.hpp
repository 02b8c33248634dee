#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "treecq/query.hpp"
#include "treecq/tree.hpp"

namespace treecq {

// Node assigned to each variable, indexed by variable.
using Valuation = std::vector<int>;
// Distinct head tuples of node ids, sorted ascending.
using AnswerSet = std::vector<std::vector<int>>;

struct BudgetExceeded : std::runtime_error {
    BudgetExceeded() : std::runtime_error("evaluation budget exceeded") {}
};

constexpr std::uint64_t kNoBudget = std::numeric_limits<std::uint64_t>::max();

enum class AcEngine { SupportCounting, Recompute };

// Per-variable candidate sets after the arc-consistency fixpoint: in[x][v]
// is nonzero when node v remains possible for variable x. `empty` is set
// when some variable lost every candidate (the query is unsatisfiable).
// The fixpoint is the unique subset-maximal arc-consistent pre-valuation,
// so both engines must agree exactly.
struct PreValuation {
    std::vector<std::vector<char>> in;
    bool empty = false;
};

// Fixpoint of unary filtering plus per-atom support pruning, optionally
// from restricted initial domains (one candidate list per variable;
// nullptr means unrestricted). SupportCounting is incremental;
// Recompute is the quadratic re-scanning oracle.
PreValuation arc_consistency(
    const Tree& t, const ConjunctiveQuery& q,
    AcEngine engine = AcEngine::SupportCounting,
    const std::vector<std::vector<int>>* restrict_to = nullptr);

// Boolean evaluation for signatures whose axes are all crossing-free
// w.r.t. `order`: if the arc-consistency fixpoint is nonempty, its
// order-minimum choice per variable is a satisfying valuation. The head
// is ignored. Throws std::invalid_argument unless classify(signature)
// reports exactly this order.
std::optional<Valuation> eval_xbar(const Tree& t, const ConjunctiveQuery& q,
                                   OrderTag order);
// Same, with the order chosen by classify; throws when intractable.
std::optional<Valuation> eval_xbar(const Tree& t, const ConjunctiveQuery& q);

// Complete search: arc consistency maintained through chronological
// backtracking (smallest domain first, node ids ascending). Returns every
// answer. `budget` caps value trials per search and throws BudgetExceeded.
AnswerSet eval_backtracking(const Tree& t, const ConjunctiveQuery& q,
                            std::uint64_t budget = kNoBudget);

// Independent slow oracle: assignment odometer with prefix pruning and no
// propagation. `budget` caps value trials.
AnswerSet eval_bruteforce(const Tree& t, const ConjunctiveQuery& q,
                          std::uint64_t budget = kNoBudget);

// Does the tuple (one node per head position) satisfy the query? Pins the
// head variables to it and decides the resulting Boolean query, via the
// crossing-free route when the signature allows and search otherwise.
bool check_tuple(const Tree& t, const ConjunctiveQuery& q,
                 const std::vector<int>& tuple,
                 std::uint64_t budget = kNoBudget);

// All answers: candidate tuples are read off the arc-consistent head
// domains, each confirmed with check_tuple.
AnswerSet enumerate_answers(const Tree& t, const ConjunctiveQuery& q,
                            std::uint64_t budget = kNoBudget);
AnswerSet enumerate_answers(const Tree& t, const PositiveQuery& p,
                            std::uint64_t budget = kNoBudget);

// Boolean satisfiability, ignoring the head: arc consistency alone decides
// crossing-free or acyclic queries; everything else falls back to search.
bool satisfiable(const Tree& t, const ConjunctiveQuery& q,
                 std::uint64_t budget = kNoBudget);
bool satisfiable(const Tree& t, const PositiveQuery& p,
                 std::uint64_t budget = kNoBudget);

// A satisfying valuation by the fastest applicable route, or nullopt.
std::optional<Valuation> find_witness(const Tree& t,
                                      const ConjunctiveQuery& q,
                                      std::uint64_t budget = kNoBudget);

// True when the full valuation satisfies every atom of the query.
bool models(const Tree& t, const ConjunctiveQuery& q, const Valuation& val);

}  // namespace treecq
