#include "treecq/gadget.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace treecq {

namespace {

using Clause = std::array<int, 3>;

void check_instance(const OneInThreeInstance& inst) {
    for (const Clause& c : inst.clauses) {
        for (int v : c)
            if (v < 0 || v >= inst.num_vars)
                throw std::invalid_argument(
                    "instance clause mentions variable " + std::to_string(v) +
                    " outside [0, " + std::to_string(inst.num_vars) + ")");
        if (c[0] == c[1] || c[0] == c[2] || c[1] == c[2])
            throw std::invalid_argument("instance clause repeats a variable");
    }
}

// len atoms axis(src, f1), axis(f1, f2), ..., axis(f_{len-1}, dst).
void axis_path(ConjunctiveQuery& q, Axis axis, int src, int dst, int len,
               const std::string& hint) {
    assert(len >= 1);
    int cur = src;
    for (int s = 1; s < len; ++s) {
        int f = q.fresh_var(hint);
        q.binary.push_back({axis, cur, f});
        cur = f;
    }
    q.binary.push_back({axis, cur, dst});
}

// Chain of len axis steps ending in a fresh variable, which is returned.
int axis_chain(ConjunctiveQuery& q, Axis axis, int src, int len,
               const std::string& hint) {
    assert(len >= 1);
    int cur = src;
    for (int s = 0; s < len; ++s) {
        int f = q.fresh_var(hint);
        q.binary.push_back({axis, cur, f});
        cur = f;
    }
    return cur;
}

// Shared label geometry of the three literal chains in the child-family and
// following reductions. Chain c (1-based), positions p = 1..10:
//   Y sits at position c; L_c sits only at position 5+c; the other two
//   L-labels cover every position from 4 to 10. A selector landing on chain
//   c therefore meets label L_c at exactly one depth, and the other labels
//   everywhere in the working band.
std::vector<std::string> chain_labels(int c, int p) {
    std::vector<std::string> out;
    if (p == c) out.push_back("Y");
    if (p >= 4) {
        for (int k = 1; k <= 3; ++k)
            if (k != c || p == 5 + c)
                out.push_back("L" + std::to_string(k));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Tree for the child+child+/child* reductions: an X-labeled 3-node spine,
// three 10-node literal chains below it, and every multi-labeled chain
// position rewritten to carry its labels on fresh leaf children (chain
// continuation first, then the label leaves in sorted order). The result is
// single-label: 3 + 30 + 45 = 78 nodes.
Tree tau45_tree() {
    TreeBuilder b;
    int v1 = b.add_node(-1, {"X"});
    int v2 = b.add_node(v1, {"X"});
    int v3 = b.add_node(v2, {"X"});
    for (int c = 1; c <= 3; ++c) {
        int cur = v3;
        std::vector<int> nodes;
        std::vector<std::vector<std::string>> pushed;
        for (int p = 1; p <= 10; ++p) {
            std::vector<std::string> labs = chain_labels(c, p);
            if (labs.size() <= 1) {
                cur = b.add_node(cur, labs);
                pushed.push_back({});
            } else {
                cur = b.add_node(cur);
                pushed.push_back(labs);
            }
            nodes.push_back(cur);
        }
        for (int p = 1; p <= 10; ++p)
            for (const std::string& lab : pushed[p - 1])
                b.add_node(nodes[p - 1], {lab});
    }
    return b.build();
}

// Tree for the child+following reduction. Multi-labels stay in place. Each
// chain node gets an unlabeled marker leaf as its first child (the chain
// continues as the second child); the marker under position p is the
// earliest node whose following-set is exactly the part of the chain
// strictly below p. Between consecutive chains hang unlabeled ladders from
// the spine foot, each one deeper than the last and ending in a C-labeled
// leaf; a node precedes ladder c's leaf in following order exactly when it
// lies in chains 1..c. 3 + 3*20 + (10+11+12) = 96 nodes.
Tree tau6_tree() {
    TreeBuilder b;
    int r1 = b.add_node(-1, {"X"});
    int r2 = b.add_node(r1, {"X"});
    int r3 = b.add_node(r2, {"X"});
    for (int c = 1; c <= 3; ++c) {
        int cur = r3;
        for (int p = 1; p <= 10; ++p) {
            int node = b.add_node(cur, chain_labels(c, p));
            b.add_node(node);
            cur = node;
        }
        int rung = r3;
        int len = c + 9;
        for (int s = 1; s <= len; ++s)
            rung = b.add_node(
                rung, s == len ? std::vector<std::string>{"C"}
                               : std::vector<std::string>{});
    }
    return b.build();
}

// Clause-selector variables shared by the two child-family reductions and
// the following reduction: X(x_i), Y(y_i), child^3 from x to y. On the
// gadget trees this pins x_i to a spine node (its depth encodes which
// literal position the clause selects) and y_i to the matching chain's
// Y-node.
struct Selector {
    std::vector<int> x, y;
};

Selector add_selectors(ConjunctiveQuery& q, int num_clauses) {
    Selector sel;
    for (int i = 1; i <= num_clauses; ++i) {
        int x = q.add_var("x" + std::to_string(i));
        int y = q.add_var("y" + std::to_string(i));
        q.unary.push_back({x, "X"});
        q.unary.push_back({y, "Y"});
        axis_path(q, Axis::Child, x, y, 3, "p" + std::to_string(i));
        sel.x.push_back(x);
        sel.y.push_back(y);
    }
    return sel;
}

std::string pair_tag(int k, int l, int i, int j) {
    return std::to_string(k) + "_" + std::to_string(l) + "_" +
           std::to_string(i + 1) + "_" + std::to_string(j + 1);
}

}  // namespace

OneInThreeInstance parse_instance(const std::string& text) {
    OneInThreeInstance inst;
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        std::istringstream fields(line);
        std::vector<long long> nums;
        std::string tok;
        while (fields >> tok) {
            std::size_t used = 0;
            long long v = 0;
            try {
                v = std::stoll(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size())
                throw std::invalid_argument("line " + std::to_string(lineno) +
                                            ": bad token '" + tok + "'");
            nums.push_back(v);
        }
        if (nums.empty()) continue;
        if (nums.size() != 3)
            throw std::invalid_argument(
                "line " + std::to_string(lineno) +
                ": a clause needs exactly three variable numbers");
        Clause cl;
        for (int k = 0; k < 3; ++k) {
            if (nums[k] < 1 || nums[k] > 1000000)
                throw std::invalid_argument(
                    "line " + std::to_string(lineno) +
                    ": variable numbers are 1-based positive integers");
            cl[k] = static_cast<int>(nums[k]) - 1;
        }
        if (cl[0] == cl[1] || cl[0] == cl[2] || cl[1] == cl[2])
            throw std::invalid_argument("line " + std::to_string(lineno) +
                                        ": clause repeats a variable");
        inst.clauses.push_back(cl);
        inst.num_vars =
            std::max({inst.num_vars, cl[0] + 1, cl[1] + 1, cl[2] + 1});
    }
    return inst;
}

std::string serialize_instance(const OneInThreeInstance& inst) {
    std::string out;
    for (const Clause& c : inst.clauses) {
        out += std::to_string(c[0] + 1);
        out += ' ';
        out += std::to_string(c[1] + 1);
        out += ' ';
        out += std::to_string(c[2] + 1);
        out += '\n';
    }
    return out;
}

bool brute_1in3(const OneInThreeInstance& inst) {
    check_instance(inst);
    if (inst.num_vars > 24)
        throw std::invalid_argument(
            "brute_1in3 enumerates all assignments; refusing > 24 variables");
    std::uint32_t total = 1u << inst.num_vars;
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        bool ok = true;
        for (const Clause& c : inst.clauses) {
            int trues = ((mask >> c[0]) & 1) + ((mask >> c[1]) & 1) +
                        ((mask >> c[2]) & 1);
            if (trues != 1) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

int nand_following(int k, int l) {
    static constexpr int table[3][3] = {{10, 13, 18}, {5, 8, 13}, {2, 5, 10}};
    if (k < 1 || k > 3 || l < 1 || l > 3)
        throw std::invalid_argument("nand_following: positions are 1..3");
    return table[k - 1][l - 1];
}

Tree subdivide_edges(const Tree& t) {
    TreeBuilder b;
    std::vector<int> id(t.size(), -1);
    for (int u = 0; u < t.size(); ++u) {
        if (t.parent[u] == -1) {
            id[u] = b.add_node(-1, t.labels[u]);
        } else {
            int mid = b.add_node(id[t.parent[u]]);
            id[u] = b.add_node(mid, t.labels[u]);
        }
    }
    return b.build();
}

GadgetOutput reduce_tau45(const OneInThreeInstance& inst, bool star) {
    check_instance(inst);
    GadgetOutput out;
    out.tree = tau45_tree();
    out.signature_tag = star ? "child, child*" : "child, child+";
    ConjunctiveQuery& q = out.query;
    q.name = star ? "gadget5" : "gadget4";
    const Axis hop = star ? Axis::ChildStar : Axis::ChildPlus;
    const int m = static_cast<int>(inst.clauses.size());
    Selector sel = add_selectors(q, m);
    // One consistency variable per pair of clause positions that mention the
    // same instance variable. Its depth below x_j encodes position l of
    // clause j; the label it must reach is L_k. On chain k that label occurs
    // at a single position, so selecting position k in clause i forces
    // position l in clause j.
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            for (int k = 1; k <= 3; ++k)
                for (int l = 1; l <= 3; ++l) {
                    if (inst.clauses[i][k - 1] != inst.clauses[j][l - 1])
                        continue;
                    std::string tag = pair_tag(k, l, i, j);
                    int z = q.add_var("z" + tag);
                    q.binary.push_back({hop, sel.y[i], z});
                    axis_path(q, Axis::Child, sel.x[j], z, 8 + k - l,
                              "c" + tag);
                    // The tree is single-label, so the L-label test on z
                    // reads a pushed-down leaf child.
                    int mz = q.add_var("m" + tag);
                    q.binary.push_back({Axis::Child, z, mz});
                    q.unary.push_back({mz, "L" + std::to_string(k)});
                }
        }
    q.sort_unary();
    return out;
}

GadgetOutput reduce_tau6(const OneInThreeInstance& inst) {
    check_instance(inst);
    GadgetOutput out;
    out.tree = tau6_tree();
    out.signature_tag = "child, following";
    ConjunctiveQuery& q = out.query;
    q.name = "gadget6";
    const int m = static_cast<int>(inst.clauses.size());
    Selector sel = add_selectors(q, m);
    // Descendant steps are not in this signature, so the consistency
    // variable z is bracketed in following-order instead: after the marker
    // leaf under y_i, before the C-leaf whose exact depth below x_i pins it
    // to the ladder that follows the selected chain. Together the brackets
    // confine z to the selected chain, strictly below y_i.
    std::vector<int> after(m), guard(m);
    for (int i = 0; i < m; ++i) {
        after[i] = q.add_var("a" + std::to_string(i + 1));
        q.binary.push_back({Axis::Child, sel.y[i], after[i]});
        guard[i] = q.add_var("e" + std::to_string(i + 1));
        q.unary.push_back({guard[i], "C"});
        axis_path(q, Axis::Child, sel.x[i], guard[i], 12,
                  "r" + std::to_string(i + 1));
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            for (int k = 1; k <= 3; ++k)
                for (int l = 1; l <= 3; ++l) {
                    if (inst.clauses[i][k - 1] != inst.clauses[j][l - 1])
                        continue;
                    std::string tag = pair_tag(k, l, i, j);
                    int z = q.add_var("z" + tag);
                    q.unary.push_back({z, "L" + std::to_string(k)});
                    axis_path(q, Axis::Child, sel.x[j], z, 8 + k - l,
                              "c" + tag);
                    q.binary.push_back({Axis::Following, after[i], z});
                    q.binary.push_back({Axis::Following, z, guard[i]});
                }
        }
    q.sort_unary();
    return out;
}

namespace {

// Layout of the nextsib+following reduction. The tree is a star: one
// unlabeled root whose leaf children form a single sibling run, so both
// axes reduce to position arithmetic on the run. Each clause contributes
// two 10-slot gadgets (a left and a right copy); 12 trailing pad leaves
// give the distance chains room past the last gadget.
//
// Slot offsets within a gadget:
//   0: pi1 (first-position anchor)   5: 2B
//   1: 2A                            6: 3B
//   2: 3A                            7: 2C
//   3: pad                           8: 3C
//   4: pi2 (second/third anchor)     9: pad
// Anchors carry label P{i}{side}, second-row slots Q{i}{side}, third-row
// slots W{i}{side}; pads are unlabeled. The selection query walks
// anchor -> Q-slot -> W-slot inside sibling-distance windows whose only
// solutions are the triples (0,1,2), (4,5,6), (4,7,8): selections 1, 2, 3.
constexpr int kSlotsPerGadget = 10;
constexpr int kTrailingPads = 12;
// Position of the W-slot for each selection (index 0 unused).
constexpr int kWOff[4] = {-1, 2, 6, 8};
// Position of the readout leaf (next sibling of the W-slot).
constexpr int kReadOff[4] = {-1, 3, 7, 9};

struct Tau15Layout {
    int m;
    int lbase(int i) const { return kSlotsPerGadget * (i - 1); }  // i 1-based
    int rbase(int i) const { return kSlotsPerGadget * (m + i - 1); }
};

std::string slot_label(int clause, char side, int slot) {
    const char* family = nullptr;
    switch (slot) {
        case 0:
        case 4:
            family = "P";
            break;
        case 1:
        case 5:
        case 7:
            family = "Q";
            break;
        case 2:
        case 6:
        case 8:
            family = "W";
            break;
        default:
            return "";
    }
    return family + std::to_string(clause) + std::string(1, side);
}

Tree tau15_tree(int m) {
    TreeBuilder b;
    int root = b.add_node(-1);
    for (char side : {'L', 'R'})
        for (int i = 1; i <= m; ++i)
            for (int slot = 0; slot < kSlotsPerGadget; ++slot) {
                std::string lab = slot_label(i, side, slot);
                if (lab.empty())
                    b.add_node(root);
                else
                    b.add_node(root, {lab});
            }
    for (int t = 0; t < kTrailingPads; ++t) b.add_node(root);
    return b.build();
}

// Selection sub-query for one gadget; returns the readout variable, whose
// run position is base + kReadOff[selection].
int add_tau15_selector(ConjunctiveQuery& q, int clause, char side) {
    std::string suf = std::to_string(clause) + std::string(1, side);
    int v1 = q.add_var("v1_" + suf);
    q.unary.push_back({v1, slot_label(clause, side, 0)});
    int n4 = axis_chain(q, Axis::NextSibling, v1, 4, "n" + suf);
    int v2 = q.add_var("v2_" + suf);
    q.unary.push_back({v2, slot_label(clause, side, 1)});
    q.binary.push_back({Axis::Following, v1, v2});
    q.binary.push_back({Axis::Following, v2, n4});
    int m2 = axis_chain(q, Axis::NextSibling, v2, 2, "m" + suf);
    int v3 = q.add_var("v3_" + suf);
    q.unary.push_back({v3, slot_label(clause, side, 2)});
    q.binary.push_back({Axis::Following, v2, v3});
    q.binary.push_back({Axis::Following, v3, m2});
    int read = q.add_var("chi_" + suf);
    q.binary.push_back({Axis::NextSibling, v3, read});
    return read;
}

}  // namespace

namespace {

// One cross-clause constraint: "if clause i selects position k then clause
// j must select position l", realized on the run as sibling-distance
// thresholds between readout leaves. A threshold in one direction (left
// readout of i to right readout of j) forbids every selection pair whose
// readout distance falls at or below it: a downward-closed cell set in the
// difference metric. The reverse direction (left of j to right of i)
// forbids an upward-closed set. Each wire may split its two forbidden
// cells across the two directions, so its total kill set is a union of one
// down-set and one up-set; the split is chosen to minimize cells killed
// beyond the mandated two.
struct WireSpec {
    int i, j, k, l;  // all 1-based
};

// Kill set (as a 3x3 bitmask over physical cells (si,sj), bit 3*(si-1)+
// (sj-1)) and the two thresholds for a given split. split bit t set means
// mandate cell t goes to the forward route.
struct WirePlan {
    int mask = 0;
    int fwd_thresh = -1;  // max forward distance killed; -1 = route unused
    int rev_thresh = -1;
    int collateral = 0;
};

// delta(a, s) = readout-offset difference within a gadget. Forward route
// distance = base1 + delta; reverse = base2 - delta.
int read_delta(int a, int s) { return kReadOff[s] - kReadOff[a]; }

WirePlan plan_wire(const Tau15Layout& lay, int i, int j, int a, int b,
                   int split) {
    // Mandate: physical cells (a, s), s != b.
    int cells[2], idx = 0;
    for (int s = 1; s <= 3; ++s)
        if (s != b) cells[idx++] = s;
    int base_fwd = lay.rbase(j) - lay.lbase(i);
    int base_rev = lay.rbase(i) - lay.lbase(j);
    WirePlan plan;
    for (int t = 0; t < 2; ++t) {
        int d_fwd = base_fwd + read_delta(a, cells[t]);
        int d_rev = base_rev - read_delta(a, cells[t]);
        if (split & (1 << t))
            plan.fwd_thresh = std::max(plan.fwd_thresh, d_fwd);
        else
            plan.rev_thresh = std::max(plan.rev_thresh, d_rev);
    }
    for (int si = 1; si <= 3; ++si)
        for (int sj = 1; sj <= 3; ++sj) {
            bool killed =
                base_fwd + read_delta(si, sj) <= plan.fwd_thresh ||
                base_rev - read_delta(si, sj) <= plan.rev_thresh;
            if (!killed) continue;
            plan.mask |= 1 << (3 * (si - 1) + (sj - 1));
            if (!(si == a && sj != b)) ++plan.collateral;
        }
    return plan;
}

WirePlan best_wire_plan(const Tau15Layout& lay, int i, int j, int a,
                        int b) {
    WirePlan best;
    bool have = false;
    for (int split : {3, 1, 2, 0}) {
        WirePlan p = plan_wire(lay, i, j, a, b, split);
        if (!have || p.collateral < best.collateral) {
            best = p;
            have = true;
        }
    }
    return best;
}

// The mapping from a gadget's physical selection slots to the clause's
// literal positions is a free choice, one permutation per clause (both
// copies of a clause share it; the sync pin is meaning-blind). Different
// choices shift which physical cells each wire must kill, and with them
// the overshoot. Exhaustive search over assignments for few clauses,
// coordinate descent above that.
constexpr int kPerm3[6][4] = {{0, 1, 2, 3}, {0, 1, 3, 2}, {0, 2, 1, 3},
                              {0, 2, 3, 1}, {0, 3, 1, 2}, {0, 3, 2, 1}};

std::vector<int> choose_meanings(const Tau15Layout& lay,
                                 const std::vector<WireSpec>& wires,
                                 int m) {
    // pair_cost[p][pi][pj]: total collateral of the wires between the
    // clause pair p under meaning choices pi, pj.
    struct PairWires {
        int i, j;
        std::vector<std::array<int, 2>> kl;  // (k, l) per wire i->j
        std::vector<std::array<int, 2>> lk;  // (k, l) per wire j->i
        int cost[6][6];
    };
    std::vector<PairWires> pairs;
    auto pair_of = [&](int i, int j) -> PairWires& {
        for (PairWires& p : pairs)
            if (p.i == i && p.j == j) return p;
        pairs.push_back({i, j, {}, {}, {}});
        return pairs.back();
    };
    for (const WireSpec& w : wires) {
        if (w.i < w.j)
            pair_of(w.i, w.j).kl.push_back({w.k, w.l});
        else
            pair_of(w.j, w.i).lk.push_back({w.k, w.l});
    }
    for (PairWires& p : pairs)
        for (int pi = 0; pi < 6; ++pi)
            for (int pj = 0; pj < 6; ++pj) {
                // kPerm3[pi][s] = literal position of physical slot s;
                // inverse gives the physical slot of a position.
                int inv_i[4], inv_j[4];
                for (int s = 1; s <= 3; ++s) {
                    inv_i[kPerm3[pi][s]] = s;
                    inv_j[kPerm3[pj][s]] = s;
                }
                int total = 0;
                for (const auto& kl : p.kl)
                    total += best_wire_plan(lay, p.i, p.j, inv_i[kl[0]],
                                            inv_j[kl[1]])
                                 .collateral;
                for (const auto& kl : p.lk)
                    total += best_wire_plan(lay, p.j, p.i, inv_j[kl[0]],
                                            inv_i[kl[1]])
                                 .collateral;
                p.cost[pi][pj] = total;
            }

    std::vector<int> choice(m + 1, 0);
    if (pairs.empty()) return choice;
    auto total_cost = [&]() {
        int t = 0;
        for (const PairWires& p : pairs)
            t += p.cost[choice[p.i]][choice[p.j]];
        return t;
    };
    if (m <= 6) {
        std::vector<int> best = choice;
        int best_cost = total_cost();
        for (;;) {
            int pos = 1;
            while (pos <= m && choice[pos] == 5) choice[pos++] = 0;
            if (pos > m) break;
            ++choice[pos];
            int c = total_cost();
            if (c < best_cost) {
                best_cost = c;
                best = choice;
            }
        }
        return best;
    }
    for (int round = 0; round < 30; ++round) {
        bool changed = false;
        for (int i = 1; i <= m; ++i) {
            int best_p = choice[i], best_c = total_cost();
            for (int p = 0; p < 6; ++p) {
                choice[i] = p;
                int c = total_cost();
                if (c < best_c) {
                    best_c = c;
                    best_p = p;
                    changed = true;
                }
            }
            choice[i] = best_p;
        }
        if (!changed) break;
    }
    return choice;
}

}  // namespace

GadgetOutput reduce_tau15(const OneInThreeInstance& inst) {
    check_instance(inst);
    const int m = static_cast<int>(inst.clauses.size());
    Tau15Layout lay{m};
    GadgetOutput out;
    out.tree = tau15_tree(m);
    out.signature_tag = "nextsib, following";
    ConjunctiveQuery& q = out.query;
    q.name = "gadget15";

    std::vector<int> read_l(m), read_r(m);
    for (int i = 1; i <= m; ++i) {
        read_l[i - 1] = add_tau15_selector(q, i, 'L');
        read_r[i - 1] = add_tau15_selector(q, i, 'R');
    }
    // Copy sync: the two copies share the slot layout, so an exact sibling
    // distance between the readouts holds iff both copies picked the same
    // physical selection.
    for (int i = 1; i <= m; ++i)
        axis_path(q, Axis::NextSibling, read_l[i - 1], read_r[i - 1],
                  kSlotsPerGadget * m, "s" + std::to_string(i));

    std::vector<WireSpec> wires;
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) {
            if (i == j) continue;
            for (int k = 1; k <= 3; ++k)
                for (int l = 1; l <= 3; ++l)
                    if (inst.clauses[i - 1][k - 1] ==
                        inst.clauses[j - 1][l - 1])
                        wires.push_back({i, j, k, l});
        }
    std::vector<int> meaning = choose_meanings(lay, wires, m);

    // Emit the wires under the chosen meanings. Thresholds always kill the
    // full mandate, so a satisfiable query implies a satisfiable instance
    // regardless of the overshoot; the overshoot only costs completeness.
    for (const WireSpec& w : wires) {
        int inv_i[4], inv_j[4];
        for (int s = 1; s <= 3; ++s) {
            inv_i[kPerm3[meaning[w.i]][s]] = s;
            inv_j[kPerm3[meaning[w.j]][s]] = s;
        }
        int a = inv_i[w.k], b = inv_j[w.l];
        WirePlan plan = best_wire_plan(lay, w.i, w.j, a, b);
        std::string tag = pair_tag(w.k, w.l, w.i - 1, w.j - 1);
        if (plan.fwd_thresh >= 0) {
            assert(plan.fwd_thresh >= 1);
            int probe = axis_chain(q, Axis::NextSibling, read_l[w.i - 1],
                                   plan.fwd_thresh, "u" + tag);
            q.binary.push_back({Axis::Following, probe, read_r[w.j - 1]});
        }
        if (plan.rev_thresh >= 0) {
            assert(plan.rev_thresh >= 1);
            int probe = axis_chain(q, Axis::NextSibling, read_l[w.j - 1],
                                   plan.rev_thresh, "w" + tag);
            q.binary.push_back({Axis::Following, probe, read_r[w.i - 1]});
        }
    }
    q.sort_unary();
    return out;
}

std::vector<OneInThreeInstance> enumerate_instances(int max_clauses,
                                                    int max_vars) {
    std::vector<OneInThreeInstance> out;
    out.push_back({});

    std::vector<Clause> all;
    for (int a = 0; a < max_vars; ++a)
        for (int b = 0; b < max_vars; ++b)
            for (int c = 0; c < max_vars; ++c)
                if (a != b && a != c && b != c) all.push_back({a, b, c});

    // A candidate is a sorted clause list (clause order never matters, so
    // only non-decreasing sequences are generated; repeats allowed). It is
    // kept iff it equals its own canonical form: the minimum, over all
    // permutations of its variables, of the relabeled-and-resorted list.
    auto consider = [&](const std::vector<Clause>& cls) {
        std::set<int> used;
        for (const Clause& c : cls) used.insert(c.begin(), c.end());
        int k = static_cast<int>(used.size());
        if (!used.empty() && (*used.rbegin() != k - 1)) return;
        std::vector<int> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            std::vector<Clause> relab = cls;
            for (Clause& c : relab)
                for (int& v : c) v = perm[v];
            std::sort(relab.begin(), relab.end());
            if (relab < cls) return;
        } while (std::next_permutation(perm.begin(), perm.end()));
        OneInThreeInstance inst;
        inst.num_vars = k;
        inst.clauses = cls;
        out.push_back(std::move(inst));
    };

    std::vector<Clause> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (static_cast<int>(cur.size()) >= max_clauses) return;
        for (std::size_t idx = start; idx < all.size(); ++idx) {
            cur.push_back(all[idx]);
            consider(cur);
            self(self, idx);
            cur.pop_back();
        }
    };
    if (max_vars >= 3) rec(rec, 0);
    return out;
}

OneInThreeInstance random_instance(Rng& rng, int num_vars, int num_clauses) {
    if (num_vars < 3)
        throw std::invalid_argument(
            "random_instance needs at least 3 variables");
    OneInThreeInstance inst;
    inst.num_vars = num_vars;
    for (int i = 0; i < num_clauses; ++i) {
        Clause c;
        c[0] = static_cast<int>(rng.next_below(num_vars));
        do {
            c[1] = static_cast<int>(rng.next_below(num_vars));
        } while (c[1] == c[0]);
        do {
            c[2] = static_cast<int>(rng.next_below(num_vars));
        } while (c[2] == c[0] || c[2] == c[1]);
        inst.clauses.push_back(c);
    }
    return inst;
}

}  // namespace treecq
