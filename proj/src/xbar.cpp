#include "treecq/xbar.hpp"

#include <stdexcept>

namespace treecq {

bool rel_holds(const Tree& t, AxisRel r, int u, int v) {
    return r.inverse ? axis_holds(t, r.axis, v, u)
                     : axis_holds(t, r.axis, u, v);
}

namespace {

// Nodes listed by ascending rank in the given order.
std::vector<int> by_rank(const Tree& t, OrderTag o) {
    std::vector<int> ord(t.size());
    for (int v = 0; v < t.size(); ++v) ord[t.rank(o, v)] = v;
    return ord;
}

}  // namespace

std::optional<std::array<int, 4>> check_xbar(const Tree& t, AxisRel r,
                                             OrderTag o) {
    const std::vector<int> ord = by_rank(t, o);
    const int n = t.size();
    for (int r0 = 0; r0 < n; ++r0) {
        const int n0 = ord[r0];
        for (int r1 = r0 + 1; r1 < n; ++r1) {
            const int n1 = ord[r1];
            for (int r2 = 0; r2 < n; ++r2) {
                const int n2 = ord[r2];
                if (!rel_holds(t, r, n1, n2) || rel_holds(t, r, n0, n2))
                    continue;
                for (int r3 = r2 + 1; r3 < n; ++r3) {
                    const int n3 = ord[r3];
                    if (rel_holds(t, r, n0, n3))
                        return std::array<int, 4>{n0, n1, n2, n3};
                }
            }
        }
    }
    return std::nullopt;
}

std::optional<std::array<int, 4>> check_xbar(const Tree& t, Axis a,
                                             OrderTag o) {
    return check_xbar(t, AxisRel{a, false}, o);
}

std::optional<std::array<int, 4>> check_xbar_forward(const Tree& t, AxisRel r,
                                                     OrderTag o) {
    const std::vector<int> ord = by_rank(t, o);
    const int n = t.size();
    for (int r0 = 0; r0 < n; ++r0) {
        const int n0 = ord[r0];
        for (int r1 = r0 + 1; r1 < n; ++r1) {
            const int n1 = ord[r1];
            for (int r2 = r1; r2 < n; ++r2) {
                const int n2 = ord[r2];
                if (!rel_holds(t, r, n1, n2) || rel_holds(t, r, n0, n2))
                    continue;
                for (int r3 = r2 + 1; r3 < n; ++r3) {
                    const int n3 = ord[r3];
                    if (rel_holds(t, r, n0, n3))
                        return std::array<int, 4>{n0, n1, n2, n3};
                }
            }
        }
    }
    return std::nullopt;
}

std::optional<std::array<int, 4>> check_xbar_mirrored(const Tree& t, AxisRel r,
                                                      OrderTag o) {
    const std::vector<int> ord = by_rank(t, o);
    const int n = t.size();
    for (int r0 = 0; r0 < n; ++r0) {
        const int n0 = ord[r0];
        for (int r1 = r0 + 1; r1 < n; ++r1) {
            const int n1 = ord[r1];
            for (int r2 = r1; r2 < n; ++r2) {
                const int n2 = ord[r2];
                if (!rel_holds(t, r, n2, n1) || rel_holds(t, r, n2, n0))
                    continue;
                for (int r3 = r2 + 1; r3 < n; ++r3) {
                    const int n3 = ord[r3];
                    if (rel_holds(t, r, n3, n0))
                        return std::array<int, 4>{n0, n1, n2, n3};
                }
            }
        }
    }
    return std::nullopt;
}

bool violates_xbar(const Tree& t, AxisRel r, OrderTag o,
                   const std::array<int, 4>& q) {
    if (t.rank(o, q[0]) >= t.rank(o, q[1])) return false;
    if (t.rank(o, q[2]) >= t.rank(o, q[3])) return false;
    return rel_holds(t, r, q[1], q[2]) && rel_holds(t, r, q[0], q[3]) &&
           !rel_holds(t, r, q[0], q[2]);
}

bool violates_mirrored(const Tree& t, AxisRel r, OrderTag o,
                       const std::array<int, 4>& q) {
    if (t.rank(o, q[0]) >= t.rank(o, q[1])) return false;
    if (t.rank(o, q[1]) > t.rank(o, q[2])) return false;
    if (t.rank(o, q[2]) >= t.rank(o, q[3])) return false;
    return rel_holds(t, r, q[2], q[1]) && rel_holds(t, r, q[3], q[0]) &&
           !rel_holds(t, r, q[2], q[0]);
}

const std::vector<Axis>& family(OrderTag o) {
    static const std::vector<Axis> bflr = {
        Axis::Child, Axis::NextSibling, Axis::NextSiblingPlus,
        Axis::NextSiblingStar};
    static const std::vector<Axis> pre = {Axis::ChildPlus, Axis::ChildStar};
    static const std::vector<Axis> post = {Axis::Following};
    switch (o) {
        case OrderTag::Pre: return pre;
        case OrderTag::Post: return post;
        case OrderTag::Bflr: return bflr;
    }
    throw std::logic_error("bad order tag");
}

namespace {

bool in_family(Axis a, OrderTag o) {
    for (Axis f : family(o))
        if (f == a) return true;
    return false;
}

constexpr OrderTag kOrderPriority[] = {OrderTag::Bflr, OrderTag::Pre,
                                       OrderTag::Post};

const char* family_ref(OrderTag o) {
    switch (o) {
        case OrderTag::Bflr: return "4.4";
        case OrderTag::Pre: return "4.2";
        case OrderTag::Post: return "4.3";
    }
    throw std::logic_error("bad order tag");
}

// Verdict tags for the axis pairs that share no family, keyed by canonical
// pair order.
const char* hard_pair_ref(Axis a, Axis b) {
    using enum Axis;
    if (a > b) std::swap(a, b);
    if (a == Child && (b == ChildPlus || b == ChildStar)) return "5.1";
    if (a == Child && b == Following) return "5.2";
    if (a == ChildPlus && b == Following) return "5.3";
    if (a == ChildStar && b == Following) return "5.3";
    if (a == ChildPlus &&
        (b == NextSibling || b == NextSiblingPlus || b == NextSiblingStar))
        return "5.7";
    if (a == ChildStar && b == NextSibling) return "5.5";
    if (a == ChildStar && b == NextSiblingPlus) return "5.4";
    if (a == ChildStar && b == NextSiblingStar) return "5.6";
    if ((a == NextSibling || a == NextSiblingPlus || a == NextSiblingStar) &&
        b == Following)
        return "5.8";
    throw std::logic_error("pair is covered by a family");
}

}  // namespace

Classification classify(const std::vector<Axis>& sig) {
    for (OrderTag o : kOrderPriority) {
        bool all = true;
        for (Axis a : sig) all = all && in_family(a, o);
        if (all) {
            Classification c;
            c.tractable = true;
            c.order = o;
            c.ref = family_ref(o);
            return c;
        }
    }
    for (std::size_t i = 0; i < sig.size(); ++i)
        for (std::size_t j = i; j < sig.size(); ++j) {
            bool covered = false;
            for (OrderTag o : kOrderPriority)
                covered = covered || (in_family(sig[i], o) &&
                                      in_family(sig[j], o));
            if (!covered) {
                Classification c;
                c.tractable = false;
                c.offending = {sig[i], sig[j]};
                c.ref = hard_pair_ref(sig[i], sig[j]);
                return c;
            }
        }
    throw std::logic_error("intractable signature without offending pair");
}

TableEntry table1_entry(Axis a, Axis b) {
    std::vector<Axis> sig;
    for (Axis x : kAllAxes)
        if (x == a || x == b) sig.push_back(x);
    Classification c = classify(sig);
    return {c.tractable, c.ref};
}

std::string table1_cell(Axis a, Axis b) {
    TableEntry e = table1_entry(a, b);
    return e.ptime ? "in P (" + e.ref + ")" : "NP-hard (" + e.ref + ")";
}

}  // namespace treecq
