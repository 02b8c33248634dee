#pragma once

#include <array>
#include <string>
#include <vector>

#include "treecq/query.hpp"
#include "treecq/rng.hpp"
#include "treecq/tree.hpp"

namespace treecq {

// Positive 1-in-3 satisfiability instance: each clause is an ordered
// triple of distinct variable indices (0-based). A satisfying assignment
// makes exactly one variable of every clause true.
struct OneInThreeInstance {
    int num_vars = 0;
    std::vector<std::array<int, 3>> clauses;
};

// Text form: one clause per line, three 1-based variable numbers separated
// by whitespace. Blank lines are skipped. Throws std::invalid_argument on
// malformed lines, numbers < 1, or a repeated variable within a clause.
OneInThreeInstance parse_instance(const std::string& text);
std::string serialize_instance(const OneInThreeInstance& inst);

// Exhaustive check over all 2^num_vars assignments. Decision oracle for
// the reductions; throws std::invalid_argument beyond 24 variables.
bool brute_1in3(const OneInThreeInstance& inst);

// Data tree plus Boolean query produced by a reduction, tagged with the
// axis set the query draws from ("child, child+" and the like).
struct GadgetOutput {
    Tree tree;
    ConjunctiveQuery query;
    std::string signature_tag;
};

// Fixed 78-node single-label tree; query uses child plus child+ edges
// (star=false) or child plus child* edges (star=true). The query is
// satisfiable on the tree iff the instance is 1-in-3 satisfiable.
GadgetOutput reduce_tau45(const OneInThreeInstance& inst, bool star);

// Fixed 96-node multi-label tree; query uses child and following edges.
// Satisfiable iff the instance is.
GadgetOutput reduce_tau6(const OneInThreeInstance& inst);

// Instance-dependent single-label tree; query uses nextsib and following
// edges. One direction holds unconditionally: a satisfiable query implies
// a satisfiable instance. The converse can fail: each cross-clause
// consistency constraint is a pair of sibling-distance thresholds, which
// forbid an interval-closed set of selection pairs rather than exactly the
// intended ones. Per-clause slot permutations are searched to dodge the
// collateral exclusions, but no consistent assignment exists for every
// instance (the smallest known miss is three clauses pairwise sharing two
// variables, e.g. "1 2 3 / 1 2 4 / 1 3 4").
GadgetOutput reduce_tau15(const OneInThreeInstance& inst);

// One fresh unlabeled node in the middle of every edge: sizes N -> 2N-1,
// every original node's depth doubles, labels stay put.
Tree subdivide_edges(const Tree& t);

// Chain length that encodes "not both positions selected" between literal
// positions k and l (1-based) in a following-chain wiring scheme; row
// data (10,13,18 / 5,8,13 / 2,5,10). Throws std::invalid_argument outside
// 1..3.
int nand_following(int k, int l);

// All instances with up to max_clauses clauses over up to max_vars
// variables, deduplicated up to variable renaming and clause order
// (within-clause order is significant). Each comes back in canonical
// form: variables numbered by first occurrence in the sorted clause list.
std::vector<OneInThreeInstance> enumerate_instances(int max_clauses,
                                                    int max_vars);

// Uniform random clauses (ordered triples of distinct variables).
OneInThreeInstance random_instance(Rng& rng, int num_vars, int num_clauses);

}  // namespace treecq
