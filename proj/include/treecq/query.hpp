#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treecq/tree.hpp"

namespace treecq {

// label == "" encodes the built-in node(x) predicate (true everywhere).
struct UnaryAtom {
    int var;
    std::string label;
    friend bool operator==(const UnaryAtom&, const UnaryAtom&) = default;
    friend auto operator<=>(const UnaryAtom&, const UnaryAtom&) = default;
};

struct BinaryAtom {
    Axis axis;
    int src;
    int dst;
    friend bool operator==(const BinaryAtom&, const BinaryAtom&) = default;
    friend auto operator<=>(const BinaryAtom&, const BinaryAtom&) = default;
};

// Conjunctive query over the tree axes. Variables are indexed densely;
// var_names holds their surface names. Unary atoms are kept sorted and
// duplicate-free; binary atoms form a multiset in insertion order.
struct ConjunctiveQuery {
    std::string name = "q";
    std::vector<int> head;
    std::vector<std::string> var_names;
    std::vector<UnaryAtom> unary;
    std::vector<BinaryAtom> binary;

    int num_vars() const { return static_cast<int>(var_names.size()); }
    int add_var(const std::string& name);
    // Index of an existing variable by name, if any.
    std::optional<int> find_var(const std::string& name) const;
    // Adds a variable named after `hint`, suffixed as needed for uniqueness.
    int fresh_var(const std::string& hint);

    // Distinct axes used, in canonical axis order.
    std::vector<Axis> signature() const;

    // True when the undirected multigraph of binary atoms is a forest
    // (parallel edges and self-loops count as cycles).
    bool is_acyclic() const;

    void sort_unary();
};

// Replaces every occurrence of variable `from` by `to`, in the head too.
void substitute_var(ConjunctiveQuery& q, int from, int to);

// Drops variables that occur in no atom and not in the head, renumbering the
// rest. Variable order is preserved.
void compact_vars(ConjunctiveQuery& q);

// Text form: `name(x,y) :- child(x,y), A(x).` A missing or empty body is
// written `name(x).`; `name(x) :- .` is accepted on input.
ConjunctiveQuery parse_query(const std::string& text);
std::string serialize_query(const ConjunctiveQuery& q);

bool is_axis_name(const std::string& s);
std::optional<Axis> axis_from_name(const std::string& s);

// Some directed cycle of the binary-atom multigraph, as the atom sequence
// along it, or nullopt. Deterministic: the cycle whose variable-name
// sequence is lexicographically least (rotated to start at its least
// variable; parallel atoms resolved by atom order).
std::optional<std::vector<BinaryAtom>> find_directed_cycle(
    const ConjunctiveQuery& q);

// A join point for breaking an undirected cycle: variable z plus the indices
// of two distinct binary atoms R(x,z), S(y,z) that lie on a common cycle.
struct JoinPoint {
    int z;
    int in1, in2;  // indices into q.binary, in1 < in2
};

// Chooses z among the variables on undirected cycles as one with no directed
// path to another such variable (ties by variable name), then the first atom
// index pair among its in-edges that shares a cycle. Absent iff the shadow
// graph is a forest. Throws std::invalid_argument if a directed cycle exists.
std::optional<JoinPoint> find_undirected_cycle(const ConjunctiveQuery& q);

// Free-function views of the member analyses.
std::vector<Axis> signature(const ConjunctiveQuery& q);
bool is_acyclic(const ConjunctiveQuery& q);

// Union of conjunctive queries sharing one head arity. An empty disjunct
// list is the constant-false query of the given arity.
struct PositiveQuery {
    int arity = 0;
    std::vector<ConjunctiveQuery> disjuncts;
};

// Distinct axes used by any disjunct, in canonical axis order.
std::vector<Axis> signature(const PositiveQuery& p);

// Text form: one rule per line, all with the same predicate name and arity.
// A line `name/k.` alone declares an empty (constant-false) union.
PositiveQuery parse_positive_query(const std::string& text);
std::string serialize_positive_query(const PositiveQuery& p);

}  // namespace treecq
