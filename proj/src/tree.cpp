#include "treecq/tree.hpp"

#include <algorithm>
#include <cstddef>
#include <map>

namespace treecq {

const char* axis_name(Axis a) {
    switch (a) {
        case Axis::Child: return "child";
        case Axis::ChildPlus: return "child+";
        case Axis::ChildStar: return "child*";
        case Axis::NextSibling: return "nextsib";
        case Axis::NextSiblingPlus: return "nextsib+";
        case Axis::NextSiblingStar: return "nextsib*";
        case Axis::Following: return "following";
    }
    return "?";
}

const char* order_name(OrderTag o) {
    switch (o) {
        case OrderTag::Pre: return "pre";
        case OrderTag::Post: return "post";
        case OrderTag::Bflr: return "bflr";
    }
    return "?";
}

bool Tree::has_label(int node, const std::string& label) const {
    const auto& ls = labels[node];
    return std::binary_search(ls.begin(), ls.end(), label);
}

int Tree::rank(OrderTag order, int node) const {
    switch (order) {
        case OrderTag::Pre: return node;
        case OrderTag::Post: return post_rank[node];
        case OrderTag::Bflr: return bflr_rank[node];
    }
    return -1;
}

std::vector<int> Tree::nodes_in_order(OrderTag order) const {
    std::vector<int> out(parent.size());
    for (int v = 0; v < size(); ++v) out[rank(order, v)] = v;
    return out;
}

int TreeBuilder::add_node(int parent, std::vector<std::string> labels) {
    if (parent < -1 || parent >= node_count())
        throw std::invalid_argument("tree builder: parent id out of range");
    int id = node_count();
    parents_.push_back(parent);
    children_.emplace_back();
    if (parent >= 0) children_[parent].push_back(id);
    labels_.push_back(std::move(labels));
    return id;
}

void TreeBuilder::add_label(int node, const std::string& label) {
    labels_.at(node).push_back(label);
}

Tree TreeBuilder::build() const {
    int n = node_count();
    if (n == 0) throw std::invalid_argument("tree builder: empty tree");
    int root = -1;
    for (int i = 0; i < n; ++i) {
        if (parents_[i] == -1) {
            if (root != -1)
                throw std::invalid_argument("tree builder: multiple roots");
            root = i;
        }
    }
    if (root == -1) throw std::invalid_argument("tree builder: no root");

    // Iterative DFS assigning pre-order ids; children visited in insertion
    // order.
    std::vector<int> pre_of(n, -1);
    std::vector<int> order;  // provisional ids in pre-order
    order.reserve(n);
    std::vector<int> stack{root};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        pre_of[v] = static_cast<int>(order.size());
        order.push_back(v);
        const auto& ch = children_[v];
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    if (static_cast<int>(order.size()) != n)
        throw std::invalid_argument("tree builder: disconnected nodes");

    Tree t;
    t.parent.resize(n);
    t.children.resize(n);
    t.labels.resize(n);
    t.post_rank.resize(n);
    t.bflr_rank.resize(n);
    t.subtree_end.resize(n);
    t.sibling_index.resize(n);
    t.depth.resize(n);

    for (int pre = 0; pre < n; ++pre) {
        int old = order[pre];
        t.parent[pre] = parents_[old] == -1 ? -1 : pre_of[parents_[old]];
        for (int c : children_[old]) t.children[pre].push_back(pre_of[c]);
        auto ls = labels_[old];
        std::sort(ls.begin(), ls.end());
        ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
        t.labels[pre] = std::move(ls);
    }

    for (int v = 0; v < n; ++v) {
        t.depth[v] = v == 0 ? 0 : t.depth[t.parent[v]] + 1;
        for (int i = 0; i < static_cast<int>(t.children[v].size()); ++i)
            t.sibling_index[t.children[v][i]] = i;
    }
    t.sibling_index[0] = 0;

    // Post ranks and subtree extents in one backward sweep: a node's subtree
    // occupies the contiguous pre-order range [v, subtree_end[v]).
    for (int v = n - 1; v >= 0; --v) {
        int end = v + 1;
        if (!t.children[v].empty()) end = t.subtree_end[t.children[v].back()];
        t.subtree_end[v] = end;
    }
    int next_post = 0;
    std::vector<int> dfs{0};
    std::vector<int> child_cursor(n, 0);
    while (!dfs.empty()) {
        int v = dfs.back();
        if (child_cursor[v] < static_cast<int>(t.children[v].size())) {
            dfs.push_back(t.children[v][child_cursor[v]++]);
        } else {
            t.post_rank[v] = next_post++;
            dfs.pop_back();
        }
    }

    int next_bflr = 0;
    std::vector<int> queue{0};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int v = queue[head];
        t.bflr_rank[v] = next_bflr++;
        for (int c : t.children[v]) queue.push_back(c);
    }
    return t;
}

bool axis_holds(const Tree& t, Axis a, int u, int v) {
    switch (a) {
        case Axis::Child:
            return t.parent[v] == u;
        case Axis::ChildPlus:
            return u < v && v < t.subtree_end[u];
        case Axis::ChildStar:
            return u <= v && v < t.subtree_end[u];
        case Axis::NextSibling:
            return t.parent[u] == t.parent[v] &&
                   t.sibling_index[v] == t.sibling_index[u] + 1;
        case Axis::NextSiblingPlus:
            return t.parent[u] == t.parent[v] &&
                   t.sibling_index[v] > t.sibling_index[u];
        case Axis::NextSiblingStar:
            return u == v || axis_holds(t, Axis::NextSiblingPlus, u, v);
        case Axis::Following:
            // Strictly later in both document order and post-order, i.e. v
            // starts after u's subtree ends.
            return u < v && t.post_rank[u] < t.post_rank[v];
    }
    return false;
}

std::vector<int> axis_successors(const Tree& t, Axis a, int u) {
    std::vector<int> out;
    switch (a) {
        case Axis::Child:
            return t.children[u];
        case Axis::ChildPlus:
            for (int v = u + 1; v < t.subtree_end[u]; ++v) out.push_back(v);
            return out;
        case Axis::ChildStar:
            for (int v = u; v < t.subtree_end[u]; ++v) out.push_back(v);
            return out;
        case Axis::NextSibling:
        case Axis::NextSiblingPlus:
        case Axis::NextSiblingStar: {
            if (a == Axis::NextSiblingStar) out.push_back(u);
            if (t.parent[u] == -1) return out;
            const auto& sibs = t.children[t.parent[u]];
            int from = t.sibling_index[u] + 1;
            int to = a == Axis::NextSibling
                         ? std::min<int>(from + 1, static_cast<int>(sibs.size()))
                         : static_cast<int>(sibs.size());
            for (int i = from; i < to; ++i) out.push_back(sibs[i]);
            return out;
        }
        case Axis::Following:
            for (int v = t.subtree_end[u]; v < t.size(); ++v) out.push_back(v);
            return out;
    }
    return out;
}

std::vector<int> axis_predecessors(const Tree& t, Axis a, int v) {
    std::vector<int> out;
    switch (a) {
        case Axis::Child:
            if (t.parent[v] != -1) out.push_back(t.parent[v]);
            return out;
        case Axis::ChildPlus:
        case Axis::ChildStar: {
            for (int u = a == Axis::ChildStar ? v : t.parent[v]; u != -1;
                 u = t.parent[u])
                out.push_back(u);
            std::reverse(out.begin(), out.end());
            return out;
        }
        case Axis::NextSibling:
        case Axis::NextSiblingPlus:
        case Axis::NextSiblingStar: {
            if (t.parent[v] != -1) {
                const auto& sibs = t.children[t.parent[v]];
                int upto = t.sibling_index[v];
                int from =
                    a == Axis::NextSibling ? std::max(0, upto - 1) : 0;
                for (int i = from; i < upto; ++i) out.push_back(sibs[i]);
            }
            if (a == Axis::NextSiblingStar) out.push_back(v);
            return out;
        }
        case Axis::Following:
            for (int u = 0; u < v; ++u)
                if (t.post_rank[u] < t.post_rank[v]) out.push_back(u);
            return out;
    }
    return out;
}

int tree_distance(const Tree& t, int u, int v) {
    int d = 0;
    while (t.depth[u] > t.depth[v]) u = t.parent[u], ++d;
    while (t.depth[v] > t.depth[u]) v = t.parent[v], ++d;
    while (u != v) u = t.parent[u], v = t.parent[v], d += 2;
    return d;
}

bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    auto head = [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
    };
    auto tail = [&](char c) {
        return head(c) || (c >= '0' && c <= '9') || c == '\'';
    };
    if (!head(s[0])) return false;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!tail(s[i])) return false;
    return true;
}

namespace {

struct TreeParser {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() &&
               (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' ||
                text[pos] == '\r'))
            ++pos;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(pos, msg);
    }

    std::vector<std::string> parse_labels() {
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t' &&
               text[pos] != '\n' && text[pos] != '\r' && text[pos] != '(' &&
               text[pos] != ')')
            ++pos;
        std::string tok = text.substr(start, pos - start);
        if (tok.empty()) {
            pos = start;
            fail("expected a label list");
        }
        if (tok == "-") return {};
        std::vector<std::string> out;
        std::size_t at = 0;
        while (true) {
            std::size_t comma = tok.find(',', at);
            std::string piece = tok.substr(
                at, comma == std::string::npos ? std::string::npos : comma - at);
            if (!valid_identifier(piece)) {
                pos = start + at;
                fail("invalid label '" + piece + "'");
            }
            out.push_back(piece);
            if (comma == std::string::npos) break;
            at = comma + 1;
        }
        return out;
    }

    int parse_node(TreeBuilder& b, int parent) {
        if (pos >= text.size() || text[pos] != '(') fail("expected '('");
        ++pos;
        skip_ws();
        int id = b.add_node(parent, parse_labels());
        skip_ws();
        while (pos < text.size() && text[pos] == '(') {
            parse_node(b, id);
            skip_ws();
        }
        if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
        ++pos;
        return id;
    }
};

}  // namespace

Tree parse_tree(const std::string& text) {
    TreeParser p{text};
    p.skip_ws();
    TreeBuilder b;
    p.parse_node(b, -1);
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing content after tree");
    return b.build();
}

namespace {

void serialize_node(const Tree& t, int v, std::string& out) {
    out += '(';
    if (t.labels[v].empty()) {
        out += '-';
    } else {
        for (std::size_t i = 0; i < t.labels[v].size(); ++i) {
            if (i) out += ',';
            out += t.labels[v][i];
        }
    }
    for (int c : t.children[v]) {
        out += ' ';
        serialize_node(t, c, out);
    }
    out += ')';
}

}  // namespace

std::string serialize_tree(const Tree& t) {
    std::string out;
    serialize_node(t, 0, out);
    return out;
}

namespace {

// Shapes as parent arrays in pre-order. A forest of size m is a sequence of
// trees; roots carry parent -1.
using Shape = std::vector<int>;

const std::vector<Shape>& forests_of(int m, std::map<int, std::vector<Shape>>& memo);

std::vector<Shape> trees_of(int n, std::map<int, std::vector<Shape>>& memo) {
    std::vector<Shape> out;
    for (const Shape& f : forests_of(n - 1, memo)) {
        Shape s(1, -1);
        for (int p : f) s.push_back(p == -1 ? 0 : p + 1);
        out.push_back(std::move(s));
    }
    return out;
}

const std::vector<Shape>& forests_of(int m,
                                     std::map<int, std::vector<Shape>>& memo) {
    auto it = memo.find(m);
    if (it != memo.end()) return it->second;
    std::vector<Shape> out;
    if (m == 0) {
        out.push_back({});
    } else {
        for (int first = 1; first <= m; ++first) {
            for (const Shape& head : trees_of(first, memo)) {
                for (const Shape& rest : forests_of(m - first, memo)) {
                    Shape s = head;
                    for (int p : rest)
                        s.push_back(p == -1 ? -1 : p + first);
                    out.push_back(std::move(s));
                }
            }
        }
    }
    return memo.emplace(m, std::move(out)).first->second;
}

}  // namespace

std::vector<Tree> enumerate_trees(int max_nodes,
                                  const std::vector<std::string>& alphabet) {
    std::vector<Tree> out;
    std::map<int, std::vector<Shape>> memo;
    int k = static_cast<int>(alphabet.size());
    for (int n = 1; n <= max_nodes; ++n) {
        for (const Shape& shape : trees_of(n, memo)) {
            // Odometer over per-node label choices: 0 = unlabelled,
            // i = alphabet[i-1]. The last node advances fastest.
            std::vector<int> digit(n, 0);
            while (true) {
                TreeBuilder b;
                for (int v = 0; v < n; ++v) {
                    std::vector<std::string> ls;
                    if (digit[v] > 0) ls.push_back(alphabet[digit[v] - 1]);
                    b.add_node(shape[v], std::move(ls));
                }
                out.push_back(b.build());
                int i = n - 1;
                while (i >= 0 && digit[i] == k) digit[i--] = 0;
                if (i < 0) break;
                ++digit[i];
            }
        }
    }
    return out;
}

}  // namespace treecq
