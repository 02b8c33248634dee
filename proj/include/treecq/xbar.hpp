#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treecq/tree.hpp"

namespace treecq {

// An axis or its inverse, viewed as a binary relation on tree nodes.
struct AxisRel {
    Axis axis;
    bool inverse = false;
};

bool rel_holds(const Tree& t, AxisRel r, int u, int v);

// Crossing-freeness of a relation R w.r.t. a node order: for every n0 < n1
// and n2 < n3 (two independent pairs), R(n1,n2) and R(n0,n3) imply R(n0,n2).
// Returns the first violating quadruple (n0,n1,n2,n3), scanning rank tuples
// (r0,r1,r2,r3) lexicographically, or nullopt when the condition holds.
std::optional<std::array<int, 4>> check_xbar(const Tree& t, Axis a,
                                             OrderTag o);
std::optional<std::array<int, 4>> check_xbar(const Tree& t, AxisRel r,
                                             OrderTag o);

// Restricted scans over n0 < n1 <= n2 < n3 only. For a relation contained in
// <= (of the order) the forward form is equivalent to the full condition; for
// one contained in >= the mirrored form checks R(n2,n1) and R(n3,n0) imply
// R(n2,n0) and is the equivalent criterion.
std::optional<std::array<int, 4>> check_xbar_forward(const Tree& t, AxisRel r,
                                                     OrderTag o);
std::optional<std::array<int, 4>> check_xbar_mirrored(const Tree& t, AxisRel r,
                                                      OrderTag o);

// Whether a specific quadruple (n0,n1,n2,n3) witnesses a violation of the
// respective condition, including its rank-order side constraints.
bool violates_xbar(const Tree& t, AxisRel r, OrderTag o,
                   const std::array<int, 4>& q);
bool violates_mirrored(const Tree& t, AxisRel r, OrderTag o,
                       const std::array<int, 4>& q);

// The axes that are crossing-free w.r.t. the given order, canonical order.
const std::vector<Axis>& family(OrderTag o);

struct Classification {
    bool tractable;
    OrderTag order = OrderTag::Bflr;       // set when tractable
    std::pair<Axis, Axis> offending = {};  // set when intractable
    std::string ref;                       // verdict tag, e.g. "4.4", "5.1"
};

// Decides whether conjunctive queries over exactly these axes evaluate in
// polynomial time (all axes crossing-free w.r.t. one common order) or are
// NP-hard (some pair shares no order). Families are tried in the fixed
// priority Bflr, Pre, Post; the offending pair is the first pair in
// canonical axis order that no family covers.
Classification classify(const std::vector<Axis>& sig);

struct TableEntry {
    bool ptime;
    std::string ref;
};

// Verdict for the two-axis grid cell {a, b}.
TableEntry table1_entry(Axis a, Axis b);

// Grid cell text: "in P (4.4)" or "NP-hard (5.1)".
std::string table1_cell(Axis a, Axis b);

}  // namespace treecq
