#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "treecq/eval.hpp"
#include "treecq/query.hpp"
#include "treecq/rng.hpp"
#include "treecq/succinct.hpp"
#include "treecq/tree.hpp"

using namespace treecq;

namespace {

std::vector<bool> bits_of(std::uint64_t m, int n) {
    std::vector<bool> b(n);
    for (int k = 0; k < n; ++k) b[k] = (m >> k) & 1;
    return b;
}

// The worked block-concatenation example: a tree-shaped Boolean query
// whose three source-to-sink label paths are Y1.X1.Y2.X2.Y3,
// Y1.X1.Y2.Xp2.Y3 and Y1.Xp1.Y2.X2.Y3.
ConjunctiveQuery worked_example_query() {
    ConjunctiveQuery q;
    auto v = [&](const std::string& name, const std::string& label) {
        int id = q.add_var(name);
        q.unary.push_back({id, label});
        return id;
    };
    int y1 = v("y1", "Y1");
    int x1 = v("x1", "X1");
    int y2 = v("y2", "Y2");
    int x2 = v("x2", "X2");
    int y3 = v("y3", "Y3");
    int x2p = v("x2p", "Xp2");
    int y3b = v("y3b", "Y3");
    int x1p = v("x1p", "Xp1");
    int y2b = v("y2b", "Y2");
    int x2b = v("x2b", "X2");
    int y3c = v("y3c", "Y3");
    auto edge = [&](int a, int b) {
        q.binary.push_back({Axis::ChildPlus, a, b});
    };
    edge(y1, x1);
    edge(x1, y2);
    edge(y2, x2);
    edge(x2, y3);
    edge(y2, x2p);
    edge(x2p, y3b);
    edge(y1, x1p);
    edge(x1p, y2b);
    edge(y2b, x2b);
    edge(x2b, y3c);
    q.sort_unary();
    return q;
}

}  // namespace

TEST_CASE("diamond query counts") {
    CHECK_THROWS_AS((void)gen_diamond(0), std::invalid_argument);
    for (int n = 1; n <= 4; ++n) {
        ConjunctiveQuery d = gen_diamond(n);
        CHECK(d.num_vars() == 3 * n + 1);
        CHECK(static_cast<int>(d.unary.size()) == 3 * n + 1);
        CHECK(static_cast<int>(d.binary.size()) == 4 * n);
        CHECK(d.head.empty());
        CHECK(signature(d) == std::vector<Axis>{Axis::ChildPlus});
        CHECK(!is_acyclic(d));
        CHECK(!find_directed_cycle(d).has_value());
        // round-trips through the text form
        CHECK(serialize_query(parse_query(serialize_query(d))) ==
              serialize_query(d));
    }
}

TEST_CASE("the first diamond join is resolved at the tier sink") {
    ConjunctiveQuery d1 = gen_diamond(1);
    auto jp = find_undirected_cycle(d1);
    REQUIRE(jp.has_value());
    CHECK(d1.var_names[jp->z] == "y2");
    CHECK(d1.binary[jp->in1].axis == Axis::ChildPlus);
    CHECK(d1.var_names[d1.binary[jp->in1].src] == "x1");
    CHECK(d1.var_names[d1.binary[jp->in2].src] == "xp1");
}

TEST_CASE("generated path structures") {
    CHECK(serialize_path(gen_ps(1, 1, {false})) == "_.Y1._.X1._.Xp1._.Y2._");
    CHECK(serialize_path(gen_ps(1, 1, {true})) == "_.Y1._.Xp1._.X1._.Y2._");
    CHECK(gen_ps(1, 1, {false}).size() == 9);

    for (auto [n, p] : {std::pair{1, 1}, {2, 3}, {3, 2}})
        for (std::uint64_t m = 0; m < (1ull << n); ++m) {
            PathStructure ps = gen_ps(n, p, bits_of(m, n));
            CHECK(ps.size() == (3 * n + 1) + (3 * n + 2) * p);
            CHECK(is_k_scattered(ps, p));
            CHECK(!is_k_scattered(ps, p + 1));
            int labeled = 0;
            for (const auto& ls : ps.labels) {
                CHECK(ls.size() <= 1);
                labeled += static_cast<int>(ls.size());
            }
            CHECK(labeled == 3 * n + 1);
        }

    Tree t = gen_ps(1, 1, {false}).to_tree();
    CHECK(t.size() == 9);
    for (int i = 0; i + 1 < t.size(); ++i)
        CHECK(axis_holds(t, Axis::Child, i, i + 1));

    CHECK_THROWS_AS((void)gen_ps(0, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS((void)gen_ps(1, 0, {false}), std::invalid_argument);
    CHECK_THROWS_AS((void)gen_ps(2, 1, {false}), std::invalid_argument);
}

TEST_CASE("scatteredness checker") {
    CHECK(is_k_scattered({LabelPath(4)}, 4));
    CHECK(!is_k_scattered({LabelPath(3)}, 4));
    CHECK(!is_k_scattered({{{"A"}, {}, {"B"}}}, 2));  // A touches the top
    CHECK(is_k_scattered({{{}, {}, {"A"}, {}, {}, {"B"}, {}, {}}}, 2));
    CHECK(!is_k_scattered({{{}, {}, {"A"}, {}, {}, {"B"}, {}, {}}}, 3));
    CHECK(!is_k_scattered({{{}, {}, {"A", "B"}, {}, {}}}, 2));  // two labels
    CHECK(!is_k_scattered({{{}, {}, {"A"}, {}, {"A"}, {}, {}}}, 2));
    CHECK(!is_k_scattered({{{}, {}, {"A"}, {"B"}, {}, {}}}, 2));  // close pair
}

TEST_CASE("variable paths") {
    ConjunctiveQuery one = parse_query("q(x) :- A(x).");
    CHECK(variable_paths(one) == std::vector<std::vector<int>>{{0}});

    ConjunctiveQuery d2 = gen_diamond(2);
    auto paths = variable_paths(d2);
    REQUIRE(paths.size() == 4);
    for (const auto& p : paths) {
        CHECK(p.size() == 5);
        CHECK(d2.var_names[p.front()] == "y1");
        CHECK(d2.var_names[p.back()] == "y3");
        CHECK(d2.var_names[p[2]] == "y2");
    }

    // The deepest disjunct of the introduction query's rewrite.
    ConjunctiveQuery deep = parse_query(
        "q(z) :- PP(z), S(x), NP(y), child+(x,u), child+(u,y), child+(v,z), "
        "nextsib+(u,v).");
    auto fp = variable_paths(deep);
    REQUIRE(fp.size() == 2);
    auto names = [&](const std::vector<int>& p) {
        std::string s;
        for (int v : p) s += deep.var_names[v];
        return s;
    };
    CHECK(names(fp[0]) == "xuy");
    CHECK(names(fp[1]) == "xuvz");

    CHECK_THROWS_AS((void)variable_paths(
                        parse_query("q() :- child(x,y), child(y,x).")),
                    std::invalid_argument);

    ConjunctiveQuery par = parse_query("q() :- child+(x,y), child*(x,y).");
    CHECK(variable_paths(par) == std::vector<std::vector<int>>{{0, 1}});
}

TEST_CASE("label paths") {
    ConjunctiveQuery d1 = gen_diamond(1);
    auto lps = label_paths(d1);
    REQUIRE(lps.size() == 2);
    CHECK(lps[0] == LabelPath{{"Y1"}, {"X1"}, {"Y2"}});
    CHECK(lps[1] == LabelPath{{"Y1"}, {"Xp1"}, {"Y2"}});

    // node atoms contribute no label; several labels collect sorted
    ConjunctiveQuery q = parse_query("q(x) :- node(x), B(y), A(y), child(x,y).");
    auto lp = label_paths(q);
    REQUIRE(lp.size() == 1);
    CHECK(lp[0] == LabelPath{{}, {"A", "B"}});
}

TEST_CASE("path count stays quadratic on forest-shaped queries") {
    Rng rng(71);
    for (int round = 0; round < 200; ++round) {
        int vars = 1 + static_cast<int>(rng.next_below(8));
        ConjunctiveQuery q;
        for (int i = 0; i < vars; ++i) q.add_var("v" + std::to_string(i));
        for (int i = 1; i < vars; ++i) {
            Axis a = rng.next_bool() ? Axis::ChildPlus : Axis::ChildStar;
            q.binary.push_back({a, static_cast<int>(rng.next_below(i)), i});
        }
        CHECK(is_acyclic(q));
        CHECK(static_cast<int>(variable_paths(q).size()) <= vars * vars);
    }
}

TEST_CASE("worked block-concatenation example") {
    ConjunctiveQuery q = worked_example_query();
    CHECK(is_acyclic(q));
    auto lps = label_paths(q);
    REQUIRE(lps.size() == 3);

    PathStructure m = lemma73_structure(q, {"Xp1", "Xp2"});
    CHECK(m.size() == 15);
    CHECK(serialize_path(m) ==
          "Y1.X1.Y2.X2.Y3.Y1.X1.Y2.Xp2.Y3.Y1.Xp1.Y2.X2.Y3");

    Tree t = m.to_tree();
    CHECK(satisfiable(t, q));
    CHECK(!satisfiable(t, gen_diamond(2)));
}

TEST_CASE("block concatenation edge cases") {
    ConjunctiveQuery q = parse_query("q() :- A(x), child+(x,y), B(y).");
    // no path carries the label at all: single block with every path
    PathStructure m = lemma73_structure(q, {"C"});
    CHECK(serialize_path(m) == "A.B");
    CHECK(satisfiable(m.to_tree(), q));

    CHECK_THROWS_AS((void)lemma73_structure(q, {}), std::invalid_argument);
    CHECK_THROWS_AS((void)lemma73_structure(q, {"A", "B"}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)lemma73_structure(
                        parse_query("q() :- nextsib(x,y)."), {"A"}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)lemma73_structure(
                        parse_query("q() :- child*(x,y), child*(y,x)."),
                        {"A"}),
                    std::invalid_argument);
}

TEST_CASE("the concatenated structure models the query it came from") {
    Rng rng(72);
    const std::vector<std::string> alphabet = {"A", "B", "C", "D", "E"};
    int built = 0;
    for (int round = 0; round < 800 && built < 60; ++round) {
        int vars = 2 + static_cast<int>(rng.next_below(4));
        ConjunctiveQuery q;
        for (int i = 0; i < vars; ++i) q.add_var("v" + std::to_string(i));
        for (int i = 1; i < vars; ++i) {
            Axis a = rng.next_bool() ? Axis::ChildPlus : Axis::ChildStar;
            q.binary.push_back({a, static_cast<int>(rng.next_below(i)), i});
            if (rng.next_below(3) == 0 && i >= 2)
                q.binary.push_back(
                    {Axis::ChildPlus, static_cast<int>(rng.next_below(i)), i});
        }
        for (int i = 0; i < vars; ++i) {
            if (rng.next_below(2))
                q.unary.push_back({i, alphabet[rng.next_below(5)]});
            if (rng.next_below(5) == 0)
                q.unary.push_back({i, alphabet[rng.next_below(5)]});
        }
        q.sort_unary();

        // synthesize a two-label gamma no single path carries entirely
        std::set<std::string> used;
        for (const auto& u : q.unary) used.insert(u.label);
        std::vector<std::string> labels(used.begin(), used.end());
        auto lps = label_paths(q);
        auto occurs = [&](const LabelPath& lp, const std::string& l) {
            for (const auto& ls : lp)
                if (std::find(ls.begin(), ls.end(), l) != ls.end())
                    return true;
            return false;
        };
        std::vector<std::string> gamma;
        for (size_t i = 0; i < labels.size() && gamma.empty(); ++i)
            for (size_t j = 0; j < labels.size() && gamma.empty(); ++j) {
                if (i == j) continue;
                bool joint = false;
                for (const auto& lp : lps)
                    joint = joint ||
                            (occurs(lp, labels[i]) && occurs(lp, labels[j]));
                if (!joint) gamma = {labels[i], labels[j]};
            }
        if (gamma.empty()) continue;

        PathStructure m = lemma73_structure(q, gamma);
        CAPTURE(serialize_query(q));
        CAPTURE(serialize_path(m));
        CHECK(satisfiable(m.to_tree(), q));
        ++built;
    }
    CHECK(built >= 30);
}

TEST_CASE("diamonds hold on every generated structure and fail off-label") {
    for (int n = 1; n <= 3; ++n) {
        ConjunctiveQuery d = gen_diamond(n);
        for (int p = 1; p <= 2; ++p)
            for (std::uint64_t m = 0; m < (1ull << n); ++m) {
                PathStructure ps = gen_ps(n, p, bits_of(m, n));
                Tree t = ps.to_tree();
                CHECK(satisfiable(t, d));
            }
        // wiping one required label breaks the diamond
        PathStructure broken = gen_ps(n, 1, std::vector<bool>(n, false));
        for (auto& ls : broken.labels)
            if (!ls.empty() && ls[0] == "X1") ls.clear();
        CHECK(!satisfiable(broken.to_tree(), d));
    }
}

TEST_CASE("blowup experiment") {
    auto rows = blowup_experiment(3, RewriteMode::Auto, 5, 7);
    REQUIRE(rows.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(rows[i].n == i + 1);
        CHECK(rows[i].equivalent);
        CHECK(rows[i].disjuncts >= 1);
        CHECK(rows[i].disjuncts_before_merge >= rows[i].disjuncts);
        CHECK(rows[i].max_atoms >= 1);
        CHECK(rows[i].total_atoms >= rows[i].max_atoms);
    }
    CHECK(rows[1].disjuncts > rows[0].disjuncts);
    CHECK(rows[2].disjuncts > rows[1].disjuncts);
    CHECK(rows[1].total_atoms > rows[0].total_atoms);
    CHECK(rows[2].total_atoms > rows[1].total_atoms);

    CHECK_THROWS_AS((void)blowup_experiment(0, RewriteMode::Auto),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)blowup_experiment(7, RewriteMode::Auto),
                    std::invalid_argument);
}
