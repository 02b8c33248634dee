#include "treecq/query.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace treecq {

std::optional<Axis> axis_from_name(const std::string& s) {
    for (Axis a : kAllAxes)
        if (s == axis_name(a)) return a;
    return std::nullopt;
}

bool is_axis_name(const std::string& s) { return axis_from_name(s).has_value(); }

int ConjunctiveQuery::add_var(const std::string& name) {
    var_names.push_back(name);
    return num_vars() - 1;
}

std::optional<int> ConjunctiveQuery::find_var(const std::string& name) const {
    for (int i = 0; i < num_vars(); ++i)
        if (var_names[i] == name) return i;
    return std::nullopt;
}

int ConjunctiveQuery::fresh_var(const std::string& hint) {
    if (!find_var(hint)) return add_var(hint);
    for (int n = 1;; ++n) {
        std::string cand = hint + "_" + std::to_string(n);
        if (!find_var(cand)) return add_var(cand);
    }
}

std::vector<Axis> ConjunctiveQuery::signature() const {
    std::vector<Axis> out;
    for (Axis a : kAllAxes) {
        for (const auto& b : binary) {
            if (b.axis == a) {
                out.push_back(a);
                break;
            }
        }
    }
    return out;
}

bool ConjunctiveQuery::is_acyclic() const {
    std::vector<int> uf(num_vars());
    std::iota(uf.begin(), uf.end(), 0);
    auto find = [&](int x) {
        while (uf[x] != x) x = uf[x] = uf[uf[x]];
        return x;
    };
    for (const auto& b : binary) {
        int rs = find(b.src), rd = find(b.dst);
        if (rs == rd) return false;
        uf[rs] = rd;
    }
    return true;
}

void ConjunctiveQuery::sort_unary() {
    std::sort(unary.begin(), unary.end());
    unary.erase(std::unique(unary.begin(), unary.end()), unary.end());
}

void substitute_var(ConjunctiveQuery& q, int from, int to) {
    if (from == to) return;
    for (int& h : q.head)
        if (h == from) h = to;
    for (auto& u : q.unary)
        if (u.var == from) u.var = to;
    for (auto& b : q.binary) {
        if (b.src == from) b.src = to;
        if (b.dst == from) b.dst = to;
    }
    q.sort_unary();
}

void compact_vars(ConjunctiveQuery& q) {
    std::vector<bool> used(q.num_vars(), false);
    for (int h : q.head) used[h] = true;
    for (const auto& u : q.unary) used[u.var] = true;
    for (const auto& b : q.binary) used[b.src] = used[b.dst] = true;
    std::vector<int> remap(q.num_vars(), -1);
    std::vector<std::string> names;
    for (int i = 0; i < q.num_vars(); ++i) {
        if (used[i]) {
            remap[i] = static_cast<int>(names.size());
            names.push_back(q.var_names[i]);
        }
    }
    q.var_names = std::move(names);
    for (int& h : q.head) h = remap[h];
    for (auto& u : q.unary) u.var = remap[u.var];
    for (auto& b : q.binary) b.src = remap[b.src], b.dst = remap[b.dst];
}

namespace {

struct QueryParser {
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

    bool eat(char c) {
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    std::string ident() {
        std::size_t start = pos;
        auto head = [](char c) {
            return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
        };
        auto tail = [&](char c) {
            return head(c) || (c >= '0' && c <= '9') || c == '\'';
        };
        if (pos >= text.size() || !head(text[pos])) fail("expected an identifier");
        ++pos;
        while (pos < text.size() && tail(text[pos])) ++pos;
        return text.substr(start, pos - start);
    }

    // Predicate tokens allow a trailing + or * (the transitive axis names).
    std::string predicate_name() {
        std::string s = ident();
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '*'))
            s += text[pos++];
        return s;
    }

    int var(ConjunctiveQuery& q) {
        std::string n = ident();
        if (auto i = q.find_var(n)) return *i;
        return q.add_var(n);
    }
};

}  // namespace

ConjunctiveQuery parse_query(const std::string& text) {
    QueryParser p{text};
    ConjunctiveQuery q;
    p.skip_ws();
    q.name = p.ident();
    p.skip_ws();
    p.expect('(');
    p.skip_ws();
    std::vector<std::size_t> head_at;
    if (!p.eat(')')) {
        while (true) {
            head_at.push_back(p.pos);
            q.head.push_back(p.var(q));
            p.skip_ws();
            if (p.eat(')')) break;
            p.expect(',');
            p.skip_ws();
        }
    }
    p.skip_ws();
    if (!p.eat('.')) {
        if (!(p.eat(':') && p.eat('-'))) p.fail("expected ':-' or '.'");
        p.skip_ws();
        if (!p.eat('.')) {
            while (true) {
                std::size_t name_at = p.pos;
                std::string pred = p.predicate_name();
                p.skip_ws();
                p.expect('(');
                p.skip_ws();
                int a = p.var(q);
                p.skip_ws();
                if (p.eat(',')) {
                    p.skip_ws();
                    int b = p.var(q);
                    p.skip_ws();
                    p.expect(')');
                    auto axis = axis_from_name(pred);
                    if (!axis) {
                        p.pos = name_at;
                        p.fail("'" + pred + "' is not an axis");
                    }
                    q.binary.push_back({*axis, a, b});
                } else {
                    p.expect(')');
                    if (is_axis_name(pred)) {
                        p.pos = name_at;
                        p.fail("axis '" + pred + "' needs two arguments");
                    }
                    q.unary.push_back({a, pred == "node" ? "" : pred});
                }
                p.skip_ws();
                if (p.eat('.')) break;
                p.expect(',');
                p.skip_ws();
            }
        }
    }
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing content after query");
    std::vector<char> bound(q.num_vars(), 0);
    for (const UnaryAtom& u : q.unary) bound[u.var] = 1;
    for (const BinaryAtom& b : q.binary) bound[b.src] = bound[b.dst] = 1;
    for (std::size_t i = 0; i < q.head.size(); ++i)
        if (!bound[q.head[i]]) {
            p.pos = head_at[i];
            p.fail("unsafe head variable '" + q.var_names[q.head[i]] + "'");
        }
    q.sort_unary();
    return q;
}

std::string serialize_query(const ConjunctiveQuery& q) {
    std::string out = q.name + "(";
    for (std::size_t i = 0; i < q.head.size(); ++i) {
        if (i) out += ',';
        out += q.var_names[q.head[i]];
    }
    out += ")";
    if (q.unary.empty() && q.binary.empty()) return out + ".";
    out += " :- ";
    bool first = true;
    auto sep = [&] {
        if (!first) out += ", ";
        first = false;
    };
    for (const auto& u : q.unary) {
        sep();
        out += (u.label.empty() ? "node" : u.label) + "(" +
               q.var_names[u.var] + ")";
    }
    for (const auto& b : q.binary) {
        sep();
        out += std::string(axis_name(b.axis)) + "(" + q.var_names[b.src] +
               "," + q.var_names[b.dst] + ")";
    }
    return out + ".";
}

std::vector<Axis> signature(const ConjunctiveQuery& q) {
    return q.signature();
}

bool is_acyclic(const ConjunctiveQuery& q) { return q.is_acyclic(); }

std::optional<std::vector<BinaryAtom>> find_directed_cycle(
    const ConjunctiveQuery& q) {
    const int nv = q.num_vars();
    struct Out {
        int dst;
        int atom;
    };
    std::vector<std::vector<Out>> out(nv);
    for (std::size_t i = 0; i < q.binary.size(); ++i)
        out[q.binary[i].src].push_back(
            {q.binary[i].dst, static_cast<int>(i)});
    for (auto& edges : out)
        std::sort(edges.begin(), edges.end(), [&](const Out& a, const Out& b) {
            if (q.var_names[a.dst] != q.var_names[b.dst])
                return q.var_names[a.dst] < q.var_names[b.dst];
            return a.atom < b.atom;
        });
    std::vector<int> by_name(nv);
    for (int i = 0; i < nv; ++i) by_name[i] = i;
    std::sort(by_name.begin(), by_name.end(), [&](int a, int b) {
        return q.var_names[a] < q.var_names[b];
    });

    // Depth-first search for the lexicographically least variable-name
    // sequence of a simple cycle with minimum variable s: prefer closing
    // back to s over any extension, then extend by ascending name.
    for (int s : by_name) {
        std::vector<char> on_path(nv, 0);
        std::vector<int> atoms;
        on_path[s] = 1;
        auto dfs = [&](auto&& self, int u) -> bool {
            int closing = -1;
            for (const Out& e : out[u])
                if (e.dst == s && (closing < 0 || e.atom < closing))
                    closing = e.atom;
            if (closing >= 0) {
                atoms.push_back(closing);
                return true;
            }
            for (const Out& e : out[u]) {
                if (on_path[e.dst] || q.var_names[e.dst] < q.var_names[s])
                    continue;
                on_path[e.dst] = 1;
                atoms.push_back(e.atom);
                if (self(self, e.dst)) return true;
                atoms.pop_back();
                on_path[e.dst] = 0;
            }
            return false;
        };
        if (dfs(dfs, s)) {
            std::vector<BinaryAtom> cycle;
            for (int i : atoms) cycle.push_back(q.binary[i]);
            return cycle;
        }
    }
    return std::nullopt;
}

namespace {

// Atom indices that lie on no undirected cycle of the shadow multigraph,
// found by a lowlink sweep keyed on edge ids (parallel edges are cycles).
std::vector<char> bridge_atoms(const ConjunctiveQuery& q) {
    const int nv = q.num_vars();
    const int ne = static_cast<int>(q.binary.size());
    struct Half {
        int to;
        int atom;
    };
    std::vector<std::vector<Half>> adj(nv);
    for (int i = 0; i < ne; ++i) {
        adj[q.binary[i].src].push_back({q.binary[i].dst, i});
        adj[q.binary[i].dst].push_back({q.binary[i].src, i});
    }
    std::vector<char> bridge(ne, 0);
    std::vector<int> disc(nv, -1), low(nv, 0);
    int timer = 0;
    auto dfs = [&](auto&& self, int u, int via_atom) -> void {
        disc[u] = low[u] = timer++;
        for (const Half& h : adj[u]) {
            if (h.atom == via_atom) continue;
            if (h.to == u) continue;  // self-loop, never a bridge
            if (disc[h.to] == -1) {
                self(self, h.to, h.atom);
                low[u] = std::min(low[u], low[h.to]);
                if (low[h.to] > disc[u]) bridge[h.atom] = 1;
            } else {
                low[u] = std::min(low[u], disc[h.to]);
            }
        }
    };
    for (int v = 0; v < nv; ++v)
        if (disc[v] == -1) dfs(dfs, v, -1);
    return bridge;
}

}  // namespace

std::optional<JoinPoint> find_undirected_cycle(const ConjunctiveQuery& q) {
    if (find_directed_cycle(q))
        throw std::invalid_argument("query graph has a directed cycle");
    const int nv = q.num_vars();
    const std::vector<char> bridge = bridge_atoms(q);
    std::vector<char> on_cycle(nv, 0);
    bool any = false;
    for (std::size_t i = 0; i < q.binary.size(); ++i)
        if (!bridge[i]) {
            on_cycle[q.binary[i].src] = on_cycle[q.binary[i].dst] = 1;
            any = true;
        }
    if (!any) return std::nullopt;

    std::vector<std::vector<int>> out(nv);
    for (const BinaryAtom& b : q.binary) out[b.src].push_back(b.dst);
    auto reaches_other = [&](int z) {
        std::vector<char> seen(nv, 0);
        std::vector<int> stack = {z};
        seen[z] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            if (u != z && on_cycle[u]) return true;
            for (int v : out[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
        }
        return false;
    };
    int z = -1;
    for (int v = 0; v < nv; ++v) {
        if (!on_cycle[v] || reaches_other(v)) continue;
        if (z < 0 || q.var_names[v] < q.var_names[z]) z = v;
    }
    if (z < 0)
        throw std::logic_error("cycle variables all reach one another");

    // Two in-edges of z sharing a cycle: their sources are connected in the
    // shadow graph with z deleted, or coincide.
    std::vector<int> uf(nv);
    for (int i = 0; i < nv; ++i) uf[i] = i;
    auto find = [&](int x) {
        while (uf[x] != x) x = uf[x] = uf[uf[x]];
        return x;
    };
    for (const BinaryAtom& b : q.binary)
        if (b.src != z && b.dst != z) uf[find(b.src)] = find(b.dst);
    std::vector<int> ins;
    for (std::size_t i = 0; i < q.binary.size(); ++i)
        if (q.binary[i].dst == z) ins.push_back(static_cast<int>(i));
    for (std::size_t a = 0; a < ins.size(); ++a)
        for (std::size_t b = a + 1; b < ins.size(); ++b) {
            int x = q.binary[ins[a]].src;
            int y = q.binary[ins[b]].src;
            if (x == y || find(x) == find(y))
                return JoinPoint{z, ins[a], ins[b]};
        }
    throw std::logic_error("cycle variable has no joinable in-edge pair");
}

std::vector<Axis> signature(const PositiveQuery& p) {
    bool seen[kAxisCount] = {};
    for (const auto& q : p.disjuncts)
        for (const auto& b : q.binary) seen[static_cast<int>(b.axis)] = true;
    std::vector<Axis> out;
    for (Axis a : kAllAxes)
        if (seen[static_cast<int>(a)]) out.push_back(a);
    return out;
}

PositiveQuery parse_positive_query(const std::string& text) {
    PositiveQuery p;
    std::string name;
    bool have_header = false;
    std::size_t line_start = 0;
    auto take_line = [&](std::size_t from, std::size_t to) {
        std::string line = text.substr(from, to - from);
        std::size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) return;
        std::size_t b = line.find_last_not_of(" \t\r");
        line = line.substr(a, b - a + 1);
        from += a;
        auto slash = line.find('/');
        if (!have_header && slash != std::string::npos &&
            line.find('(') == std::string::npos) {
            // `name/k.` header: empty union of the given arity.
            name = line.substr(0, slash);
            std::string ar = line.substr(slash + 1);
            if (!ar.empty() && ar.back() == '.') ar.pop_back();
            try {
                p.arity = std::stoi(ar);
            } catch (const std::exception&) {
                throw ParseError(from + slash + 1, "expected an arity");
            }
            have_header = true;
            return;
        }
        ConjunctiveQuery q;
        try {
            q = parse_query(line);
        } catch (const ParseError& e) {
            throw ParseError(from + e.offset, e.message);
        }
        if (!have_header) {
            name = q.name;
            p.arity = static_cast<int>(q.head.size());
            have_header = true;
        } else if (q.name != name) {
            throw ParseError(from, "rule name '" + q.name +
                                       "' differs from '" + name + "'");
        } else if (static_cast<int>(q.head.size()) != p.arity) {
            throw ParseError(from, "rule arity differs from first rule");
        }
        p.disjuncts.push_back(std::move(q));
    };
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            take_line(line_start, i);
            line_start = i + 1;
        }
    }
    if (!have_header) throw ParseError(0, "empty positive query");
    return p;
}

std::string serialize_positive_query(const PositiveQuery& p) {
    if (p.disjuncts.empty()) return "q/" + std::to_string(p.arity) + ".\n";
    std::string out;
    for (const auto& q : p.disjuncts) out += serialize_query(q) + "\n";
    return out;
}

}  // namespace treecq
