#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace treecq {

// The seven binary axes over unranked ordered labelled trees.
enum class Axis {
    Child,
    ChildPlus,
    ChildStar,
    NextSibling,
    NextSiblingPlus,
    NextSiblingStar,
    Following,
};

inline constexpr Axis kAllAxes[] = {
    Axis::Child,           Axis::ChildPlus,       Axis::ChildStar,
    Axis::NextSibling,     Axis::NextSiblingPlus, Axis::NextSiblingStar,
    Axis::Following,
};

inline constexpr int kAxisCount = 7;

const char* axis_name(Axis a);

// Three linear orders on tree nodes used by the tractability analysis.
enum class OrderTag { Pre, Post, Bflr };

const char* order_name(OrderTag o);

struct ParseError : std::runtime_error {
    ParseError(std::size_t offset, const std::string& what)
        : std::runtime_error("byte " + std::to_string(offset) + ": " + what),
          offset(offset),
          message(what) {}
    std::size_t offset;
    std::string message;
};

// Rooted, ordered, unranked tree. Nodes are identified by their pre-order
// (document-order) position, 0-based; node 0 is the root. Every node carries
// a finite set of labels, stored sorted and duplicate-free.
struct Tree {
    std::vector<int> parent;                       // -1 for the root
    std::vector<std::vector<int>> children;        // ascending ids
    std::vector<std::vector<std::string>> labels;  // sorted, unique
    std::vector<int> post_rank;
    std::vector<int> bflr_rank;
    std::vector<int> subtree_end;     // one past the last id in the subtree
    std::vector<int> sibling_index;   // position among the parent's children
    std::vector<int> depth;           // root has depth 0

    int size() const { return static_cast<int>(parent.size()); }
    bool has_label(int node, const std::string& label) const;

    int rank(OrderTag order, int node) const;
    // Node ids sorted ascending by the given order's rank.
    std::vector<int> nodes_in_order(OrderTag order) const;
};

// Assembles a tree in any insertion order, then renumbers nodes to pre-order
// positions. The first node added with parent -1 becomes the root; children
// keep their insertion order as sibling order.
class TreeBuilder {
public:
    // Returns a provisional id, valid as a parent for later add_node calls.
    int add_node(int parent, std::vector<std::string> labels = {});
    void add_label(int node, const std::string& label);
    int node_count() const { return static_cast<int>(parents_.size()); }

    Tree build() const;

private:
    std::vector<int> parents_;
    std::vector<std::vector<int>> children_;
    std::vector<std::vector<std::string>> labels_;
};

bool axis_holds(const Tree& t, Axis a, int u, int v);
std::vector<int> axis_successors(const Tree& t, Axis a, int u);
std::vector<int> axis_predecessors(const Tree& t, Axis a, int v);

// Length of the unique simple path between two nodes, in edges.
int tree_distance(const Tree& t, int u, int v);

// Text form: (LABELS child child ...), LABELS either `-` or a comma-separated
// identifier list. Serialization is canonical: one line, labels sorted, a
// single space between parts.
Tree parse_tree(const std::string& text);
std::string serialize_tree(const Tree& t);

// Every tree with 1..max_nodes nodes where each node carries at most one
// label drawn from `alphabet`. Deterministic order: node count ascending,
// then shape, then a label odometer.
std::vector<Tree> enumerate_trees(int max_nodes,
                                  const std::vector<std::string>& alphabet);

bool valid_identifier(const std::string& s);

}  // namespace treecq
