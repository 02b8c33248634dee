#include "treecq/succinct.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "treecq/eval.hpp"

namespace treecq {

namespace {

std::string render_label_path(const LabelPath& lp) {
    std::string out;
    for (size_t i = 0; i < lp.size(); ++i) {
        if (i) out += '.';
        if (lp[i].empty()) {
            out += '_';
            continue;
        }
        for (size_t j = 0; j < lp[i].size(); ++j) {
            if (j) out += '+';
            out += lp[i][j];
        }
    }
    return out;
}

PositiveQuery as_union(const ConjunctiveQuery& q) {
    PositiveQuery p;
    p.arity = static_cast<int>(q.head.size());
    p.disjuncts = {q};
    return p;
}

}  // namespace

Tree PathStructure::to_tree() const {
    if (labels.empty()) throw std::invalid_argument("empty path structure");
    TreeBuilder b;
    for (size_t i = 0; i < labels.size(); ++i) {
        b.add_node(static_cast<int>(i) - 1);
        for (const std::string& l : labels[i])
            b.add_label(static_cast<int>(i), l);
    }
    return b.build();
}

std::string serialize_path(const PathStructure& ps) {
    return render_label_path(ps.labels);
}

ConjunctiveQuery gen_diamond(int n) {
    if (n < 1) throw std::invalid_argument("diamond size must be positive");
    ConjunctiveQuery q;
    int y_prev = q.add_var("y1");
    q.unary.push_back({y_prev, "Y1"});
    for (int i = 1; i <= n; ++i) {
        int x = q.add_var("x" + std::to_string(i));
        int xp = q.add_var("xp" + std::to_string(i));
        int y = q.add_var("y" + std::to_string(i + 1));
        q.unary.push_back({x, "X" + std::to_string(i)});
        q.unary.push_back({xp, "Xp" + std::to_string(i)});
        q.unary.push_back({y, "Y" + std::to_string(i + 1)});
        q.binary.push_back({Axis::ChildPlus, y_prev, x});
        q.binary.push_back({Axis::ChildPlus, x, y});
        q.binary.push_back({Axis::ChildPlus, y_prev, xp});
        q.binary.push_back({Axis::ChildPlus, xp, y});
        y_prev = y;
    }
    q.sort_unary();
    return q;
}

PathStructure gen_ps(int n, int p, const std::vector<bool>& bits) {
    if (n < 1 || p < 1)
        throw std::invalid_argument("path structure parameters must be positive");
    if (static_cast<int>(bits.size()) != n)
        throw std::invalid_argument("one orientation bit per tier required");
    PathStructure ps;
    auto spacer = [&] { ps.labels.insert(ps.labels.end(), p, {}); };
    auto labeled = [&](const std::string& l) { ps.labels.push_back({l}); };
    spacer();
    labeled("Y1");
    for (int i = 1; i <= n; ++i) {
        std::string a = "X" + std::to_string(i);
        std::string b = "Xp" + std::to_string(i);
        if (bits[i - 1]) std::swap(a, b);
        spacer();
        labeled(a);
        spacer();
        labeled(b);
        spacer();
        labeled("Y" + std::to_string(i + 1));
    }
    spacer();
    return ps;
}

bool is_k_scattered(const PathStructure& ps, int k) {
    int n = ps.size();
    if (n < k) return false;
    std::vector<int> pos;
    std::set<std::string> seen;
    for (int i = 0; i < n; ++i) {
        if (ps.labels[i].empty()) continue;
        if (ps.labels[i].size() > 1) return false;
        if (!seen.insert(ps.labels[i][0]).second) return false;
        pos.push_back(i);
    }
    for (size_t i = 0; i < pos.size(); ++i) {
        if (pos[i] < k || (n - 1) - pos[i] < k) return false;
        if (i + 1 < pos.size() && pos[i + 1] - pos[i] < k) return false;
    }
    return true;
}

std::vector<std::vector<int>> variable_paths(const ConjunctiveQuery& q) {
    if (find_directed_cycle(q))
        throw std::invalid_argument(
            "variable paths need a cycle-free query graph");
    int n = q.num_vars();
    std::vector<std::set<int>> out(n);
    std::vector<int> indeg(n, 0);
    for (const BinaryAtom& b : q.binary)
        if (out[b.src].insert(b.dst).second) ++indeg[b.dst];

    std::vector<std::vector<int>> paths;
    std::vector<int> cur;
    auto dfs = [&](auto&& self, int v) -> void {
        cur.push_back(v);
        if (out[v].empty())
            paths.push_back(cur);
        else
            for (int w : out[v]) self(self, w);
        cur.pop_back();
    };
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) dfs(dfs, v);
    std::sort(paths.begin(), paths.end());
    return paths;
}

LabelPath label_path_for(const ConjunctiveQuery& q,
                         const std::vector<int>& path) {
    LabelPath lp;
    for (int v : path) {
        std::vector<std::string> ls;
        for (const UnaryAtom& u : q.unary)
            if (u.var == v && !u.label.empty()) ls.push_back(u.label);
        std::sort(ls.begin(), ls.end());
        ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
        lp.push_back(std::move(ls));
    }
    return lp;
}

std::vector<LabelPath> label_paths(const ConjunctiveQuery& q) {
    std::vector<LabelPath> out;
    for (const auto& p : variable_paths(q)) out.push_back(label_path_for(q, p));
    return out;
}

PathStructure lemma73_structure(const ConjunctiveQuery& q,
                                const std::vector<std::string>& gamma) {
    if (q.num_vars() == 0)
        throw std::invalid_argument("query has no variables");
    for (Axis a : signature(q))
        if (a != Axis::ChildPlus && a != Axis::ChildStar)
            throw std::invalid_argument(
                "only child+ and child* atoms are supported");
    if (gamma.empty()) throw std::invalid_argument("empty label list");

    std::vector<LabelPath> lps = label_paths(q);  // throws on directed cycle
    auto occurs = [](const LabelPath& lp, const std::string& l) {
        for (const auto& ls : lp)
            if (std::find(ls.begin(), ls.end(), l) != ls.end()) return true;
        return false;
    };
    for (const LabelPath& lp : lps) {
        bool all = true;
        for (const std::string& l : gamma) all = all && occurs(lp, l);
        if (all)
            throw std::invalid_argument(
                "a variable path already carries every listed label");
    }

    // Block j keeps the paths that carry gamma[0..j-2] but not gamma[j-1];
    // since no path carries all of gamma, the blocks partition the paths.
    PathStructure ps;
    size_t placed = 0;
    for (size_t j = 0; j < gamma.size(); ++j) {
        std::vector<const LabelPath*> block;
        for (const LabelPath& lp : lps) {
            bool keep = !occurs(lp, gamma[j]);
            for (size_t i = 0; i < j && keep; ++i) keep = occurs(lp, gamma[i]);
            if (keep) block.push_back(&lp);
        }
        std::sort(block.begin(), block.end(),
                  [](const LabelPath* a, const LabelPath* b) {
                      return render_label_path(*a) < render_label_path(*b);
                  });
        for (const LabelPath* lp : block)
            ps.labels.insert(ps.labels.end(), lp->begin(), lp->end());
        placed += block.size();
    }
    if (placed != lps.size())
        throw std::logic_error("path blocks failed to partition");
    return ps;
}

std::vector<BlowupRow> blowup_experiment(int n_max, RewriteMode mode,
                                         int trials, std::uint64_t seed) {
    if (n_max < 1 || n_max > 6)
        throw std::invalid_argument("diamond range must lie in 1..6");
    std::vector<BlowupRow> rows;
    for (int n = 1; n <= n_max; ++n) {
        ConjunctiveQuery d = gen_diamond(n);
        RewriteStats st;
        PositiveQuery apq = rewrite_to_apq(d, mode, &st);
        BlowupRow row;
        row.n = n;
        row.disjuncts = st.disjuncts;
        row.disjuncts_before_merge = st.disjuncts_before_merge;
        row.max_atoms = st.max_atoms;
        for (const auto& m : apq.disjuncts)
            row.total_atoms += static_cast<int>(m.unary.size() + m.binary.size());

        EquivalenceReport eq =
            is_equivalent_sampled(as_union(d), apq, trials, seed + n, 3);
        row.equivalent = eq.equivalent;
        for (int p = 1; p <= 2 && row.equivalent; ++p)
            for (std::uint64_t m = 0; m < (1ull << n); ++m) {
                std::vector<bool> bits(n);
                for (int k = 0; k < n; ++k) bits[k] = (m >> k) & 1;
                Tree t = gen_ps(n, p, bits).to_tree();
                if (!satisfiable(t, d) || !satisfiable(t, apq)) {
                    row.equivalent = false;
                    break;
                }
            }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace treecq
