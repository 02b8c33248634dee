#pragma once

// Path-structure experiment lab: diamond queries, scattered path
// generators, variable- and label-paths, the block-concatenation
// counterexample builder, and the union-blowup measurement.

#include <cstdint>
#include <string>
#include <vector>

#include "treecq/query.hpp"
#include "treecq/rewrite.hpp"
#include "treecq/tree.hpp"

namespace treecq {

// One label set per node, top to bottom; entries may be empty.
using LabelPath = std::vector<std::vector<std::string>>;

// A tree whose child graph is a single path. Node i sits at depth i.
struct PathStructure {
    LabelPath labels;

    int size() const { return static_cast<int>(labels.size()); }
    Tree to_tree() const;
};

// Renders as dot-joined node entries: "_" for unlabeled, the label when
// single, "A+B" (sorted) when a node carries several.
std::string serialize_path(const PathStructure& ps);

// Boolean query with variables y1..y{n+1}, x1..xn, xp1..xpn, labels
// Y1..Y{n+1}, X1..Xn, Xp1..Xpn, and the four child+ atoms per tier
// y_i -> x_i -> y_{i+1}, y_i -> xp_i -> y_{i+1}. Throws on n < 1.
ConjunctiveQuery gen_diamond(int n);

// Path structure  s Y1 s A1 s B1 s Y2 ... s Yn s An s Bn s Y{n+1} s
// where s is a run of p unlabeled nodes and (A_i, B_i) is (X_i, Xp_i)
// when bits[i-1] is false and swapped when true. Size is
// (3n+1) + (3n+2)*p. Throws on n < 1, p < 1, or a bits length mismatch.
PathStructure gen_ps(int n, int p, const std::vector<bool>& bits);

// True iff the structure has at least k nodes, every node carries at
// most one label, labels are pairwise distinct, and every labeled node
// is at distance >= k from the top node, the bottom node, and every
// other labeled node.
bool is_k_scattered(const PathStructure& ps, int k);

// All maximal directed source-to-sink paths in the query graph, as
// variable-id sequences in lexicographic order. An isolated variable is
// a length-1 path. Parallel edges are collapsed. Throws
// std::invalid_argument when the query graph has a directed cycle.
std::vector<std::vector<int>> variable_paths(const ConjunctiveQuery& q);

// The label-path of one variable path: per variable, its sorted label
// set (node atoms contribute nothing).
LabelPath label_path_for(const ConjunctiveQuery& q,
                         const std::vector<int>& path);

// label_path_for mapped over variable_paths(q), in the same order.
std::vector<LabelPath> label_paths(const ConjunctiveQuery& q);

// Block-concatenation structure  LC(!E1).LC(E1 & !E2)...(E1..E{m-1} & !Em)
// over q's label-paths, where LC(psi) concatenates the label-paths of the
// variable paths satisfying psi in lexicographic order of their rendered
// form. Requires: q uses only child+/child* axes, has at least one
// variable and no directed cycle, gamma is nonempty, and no variable
// path of q carries all labels of gamma. The result is a model of q by
// construction; callers verify with the evaluator.
PathStructure lemma73_structure(const ConjunctiveQuery& q,
                                const std::vector<std::string>& gamma);

struct BlowupRow {
    int n = 0;
    int disjuncts = 0;
    int disjuncts_before_merge = 0;
    int total_atoms = 0;
    int max_atoms = 0;
    bool equivalent = false;  // sampled check against the diamond query
};

// For n = 1..n_max: rewrite gen_diamond(n) under `mode`, record union
// sizes, and verify sampled equivalence (enumerated small trees, random
// trees, and all 2^n generated path structures with p in {1, 2}).
// Throws when n_max is outside 1..6.
std::vector<BlowupRow> blowup_experiment(int n_max, RewriteMode mode,
                                         int trials = 10,
                                         std::uint64_t seed = 0);

}  // namespace treecq
