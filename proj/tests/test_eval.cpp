#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "treecq/eval.hpp"
#include "treecq/query.hpp"
#include "treecq/rng.hpp"
#include "treecq/tree.hpp"
#include "treecq/xbar.hpp"

using namespace treecq;
using treecq::testing::random_query;
using treecq::testing::random_tree;

namespace {

// Plain assignment enumerator, no propagation or pruning beyond the atom
// checks themselves. Independent of the evaluation module.
AnswerSet oracle_answers(const Tree& t, const ConjunctiveQuery& q) {
    std::set<std::vector<int>> out;
    int n = t.size();
    int vars = q.num_vars();
    std::vector<int> val(vars, 0);
    while (true) {
        bool ok = true;
        for (const auto& a : q.unary)
            if (!a.label.empty() && !t.has_label(val[a.var], a.label)) {
                ok = false;
                break;
            }
        if (ok)
            for (const auto& a : q.binary)
                if (!axis_holds(t, a.axis, val[a.src], val[a.dst])) {
                    ok = false;
                    break;
                }
        if (ok) {
            std::vector<int> tuple;
            for (int x : q.head) tuple.push_back(val[x]);
            out.insert(tuple);
        }
        int i = vars - 1;
        while (i >= 0 && val[i] == n - 1) val[i--] = 0;
        if (i < 0) break;
        ++val[i];
    }
    return {out.begin(), out.end()};
}

bool domains_equal(const PreValuation& a, const PreValuation& b) {
    return a.empty == b.empty && a.in == b.in;
}

// Membership of node v in the arc-consistency fixpoint domain of x.
bool in_domain(const PreValuation& p, int x, int v) {
    return p.in[x][v] != 0;
}

ConjunctiveQuery with_head(ConjunctiveQuery q, std::vector<int> head) {
    q.head = std::move(head);
    return q;
}

}  // namespace

TEST_CASE("both arc-consistency engines reach the same fixpoint") {
    Rng rng(41);
    std::vector<std::string> alphabet = {"A", "B"};
    for (int round = 0; round < 120; ++round) {
        Tree t = random_tree(rng, 1 + static_cast<int>(rng.next_below(10)),
                             alphabet);
        ConjunctiveQuery q = random_query(
            rng, 1 + static_cast<int>(rng.next_below(4)),
            static_cast<int>(rng.next_below(6)), alphabet, 2);
        auto fast = arc_consistency(t, q, AcEngine::SupportCounting);
        auto slow = arc_consistency(t, q, AcEngine::Recompute);
        CHECK(domains_equal(fast, slow));

        // Restricted domains must agree as well.
        std::vector<std::vector<int>> restrict(q.num_vars());
        for (int x = 0; x < q.num_vars(); ++x)
            for (int v = 0; v < t.size(); ++v)
                if (rng.next_below(2)) restrict[x].push_back(v);
        auto rfast =
            arc_consistency(t, q, AcEngine::SupportCounting, &restrict);
        auto rslow = arc_consistency(t, q, AcEngine::Recompute, &restrict);
        CHECK(domains_equal(rfast, rslow));
    }
}

TEST_CASE("the fixpoint never discards part of an answer") {
    Rng rng(42);
    std::vector<std::string> alphabet = {"A"};
    for (int round = 0; round < 60; ++round) {
        Tree t = random_tree(rng, 1 + static_cast<int>(rng.next_below(7)),
                             alphabet);
        ConjunctiveQuery q = random_query(rng, 3, 3, alphabet, 1);
        std::vector<int> all_vars = {0, 1, 2};
        AnswerSet full = oracle_answers(t, with_head(q, all_vars));
        auto fix = arc_consistency(t, q);
        for (const auto& val : full)
            for (int x = 0; x < 3; ++x) CHECK(in_domain(fix, x, val[x]));
        if (!full.empty()) CHECK(!fix.empty);
    }
}

namespace {

// Arc consistency by definition: every surviving node has a partner in the
// other side's set for each atom, and carries each required label.
bool is_arc_consistent(const Tree& t, const ConjunctiveQuery& q,
                       const std::vector<std::vector<char>>& sets) {
    for (const auto& a : q.unary)
        for (int v = 0; v < t.size(); ++v)
            if (sets[a.var][v] && !a.label.empty() &&
                !t.has_label(v, a.label))
                return false;
    for (const auto& a : q.binary)
        for (int v = 0; v < t.size(); ++v) {
            if (sets[a.src][v]) {
                bool supported = false;
                for (int u = 0; u < t.size(); ++u)
                    supported = supported ||
                                (sets[a.dst][u] && axis_holds(t, a.axis, v, u));
                if (!supported) return false;
            }
            if (sets[a.dst][v]) {
                bool supported = false;
                for (int u = 0; u < t.size(); ++u)
                    supported = supported ||
                                (sets[a.src][u] && axis_holds(t, a.axis, u, v));
                if (!supported) return false;
            }
        }
    return true;
}

}  // namespace

TEST_CASE("the fixpoint contains every arc-consistent pre-valuation") {
    Rng rng(48);
    std::vector<std::string> alphabet = {"A"};
    auto trees = enumerate_trees(3, alphabet);
    for (int round = 0; round < 40; ++round) {
        const Tree& t = trees[rng.next_below(trees.size())];
        ConjunctiveQuery q = random_query(rng, 2, 2, alphabet, 1);
        auto fix = arc_consistency(t, q);
        int n = t.size();
        // Every pair of candidate sets, one per variable.
        for (unsigned m0 = 0; m0 < (1u << n); ++m0)
            for (unsigned m1 = 0; m1 < (1u << n); ++m1) {
                std::vector<std::vector<char>> sets(2,
                                                    std::vector<char>(n, 0));
                for (int v = 0; v < n; ++v) {
                    sets[0][v] = (m0 >> v) & 1;
                    sets[1][v] = (m1 >> v) & 1;
                }
                if (!is_arc_consistent(t, q, sets)) continue;
                for (int x = 0; x < 2; ++x)
                    for (int v = 0; v < n; ++v)
                        if (sets[x][v]) CHECK(in_domain(fix, x, v));
            }
    }
}

TEST_CASE("adding an atom never enlarges the answer set") {
    Rng rng(49);
    std::vector<std::string> alphabet = {"A", "B"};
    for (int round = 0; round < 80; ++round) {
        Tree t = random_tree(rng, 1 + static_cast<int>(rng.next_below(7)),
                             alphabet);
        ConjunctiveQuery q = random_query(rng, 3, 2, alphabet, 1);
        q.head = {0, 1};
        AnswerSet before = eval_backtracking(t, q);
        if (rng.next_below(2))
            q.binary.push_back({kAllAxes[rng.next_below(kAxisCount)],
                                static_cast<int>(rng.next_below(3)),
                                static_cast<int>(rng.next_below(3))});
        else
            q.unary.push_back(
                {static_cast<int>(rng.next_below(3)), alphabet[0]});
        AnswerSet after = eval_backtracking(t, q);
        CHECK(std::includes(before.begin(), before.end(), after.begin(),
                            after.end()));
    }
}

TEST_CASE("backtracking agrees with the assignment oracle") {
    Rng rng(43);
    std::vector<std::string> alphabet = {"A", "B"};
    for (int round = 0; round < 150; ++round) {
        Tree t = random_tree(rng, 1 + static_cast<int>(rng.next_below(8)),
                             alphabet);
        int vars = 1 + static_cast<int>(rng.next_below(4));
        ConjunctiveQuery q = random_query(
            rng, vars, static_cast<int>(rng.next_below(6)), alphabet, 2);
        std::vector<int> head;
        for (int x = 0; x < vars; ++x)
            if (rng.next_below(2)) head.push_back(x);
        q = with_head(std::move(q), std::move(head));

        AnswerSet expect = oracle_answers(t, q);
        CHECK(eval_backtracking(t, q) == expect);
        CHECK(eval_bruteforce(t, q) == expect);
        CHECK(enumerate_answers(t, q) == expect);
        CHECK(satisfiable(t, q) == !expect.empty());
        auto w = find_witness(t, q);
        CHECK(w.has_value() == !expect.empty());
        if (w) CHECK(models(t, q, *w));
    }
}

TEST_CASE("check_tuple decides exactly answer membership") {
    Rng rng(44);
    std::vector<std::string> alphabet = {"A"};
    for (int round = 0; round < 50; ++round) {
        Tree t = random_tree(rng, 2 + static_cast<int>(rng.next_below(5)),
                             alphabet);
        ConjunctiveQuery q = random_query(rng, 3, 3, alphabet, 1);
        q = with_head(std::move(q), {0, 2});
        AnswerSet expect = oracle_answers(t, q);
        std::set<std::vector<int>> member(expect.begin(), expect.end());
        for (int u = 0; u < t.size(); ++u)
            for (int v = 0; v < t.size(); ++v)
                CHECK(check_tuple(t, q, {u, v}) ==
                      (member.count({u, v}) != 0));
    }
    Tree t = parse_tree("(A (B))");
    ConjunctiveQuery q = parse_query("q(x) :- A(x).");
    CHECK_THROWS_AS((void)check_tuple(t, q, {0, 1}), std::invalid_argument);
    CHECK(!check_tuple(t, q, {5}));
}

TEST_CASE("crossing-free evaluation agrees with search and yields minima") {
    Rng rng(45);
    std::vector<std::string> alphabet = {"A", "B"};
    const std::vector<std::vector<Axis>> pools = {
        {Axis::Child, Axis::NextSibling, Axis::NextSiblingPlus,
         Axis::NextSiblingStar},
        {Axis::ChildPlus, Axis::ChildStar},
        {Axis::Following},
    };
    for (int round = 0; round < 120; ++round) {
        const auto& pool = pools[round % 3];
        Tree t = random_tree(rng, 1 + static_cast<int>(rng.next_below(9)),
                             alphabet);
        ConjunctiveQuery q;
        int vars = 1 + static_cast<int>(rng.next_below(4));
        for (int i = 0; i < vars; ++i) q.add_var("v" + std::to_string(i));
        int atoms = static_cast<int>(rng.next_below(5));
        for (int i = 0; i < atoms; ++i)
            q.binary.push_back(
                {pool[rng.next_below(pool.size())],
                 static_cast<int>(rng.next_below(vars)),
                 static_cast<int>(rng.next_below(vars))});
        if (rng.next_below(2))
            q.unary.push_back({static_cast<int>(rng.next_below(vars)), "A"});

        Classification c = classify(signature(q));
        REQUIRE(c.tractable);
        auto w = eval_xbar(t, q);
        CHECK(w.has_value() == satisfiable(t, q));
        CHECK(w.has_value() == !eval_backtracking(t, q).empty());
        if (w) {
            CHECK(models(t, q, *w));
            // The witness takes the order-minimum surviving node per
            // variable, all at once.
            auto fix = arc_consistency(t, q);
            for (int x = 0; x < vars; ++x) {
                for (int v = 0; v < t.size(); ++v) {
                    if (!in_domain(fix, x, v)) continue;
                    CHECK(t.rank(c.order, (*w)[x]) <= t.rank(c.order, v));
                }
                CHECK(in_domain(fix, x, (*w)[x]));
            }
        }
        if (c.order == OrderTag::Pre)
            CHECK(eval_xbar(t, q, OrderTag::Pre).has_value() ==
                  w.has_value());
        else
            CHECK_THROWS_AS((void)eval_xbar(t, q, OrderTag::Pre),
                            std::invalid_argument);
    }
}

TEST_CASE("crossing-free evaluation rejects intractable signatures") {
    Tree t = parse_tree("(A (B) (C))");
    ConjunctiveQuery q = parse_query("q() :- child(x,y), child+(y,z).");
    CHECK_THROWS_AS((void)eval_xbar(t, q), std::invalid_argument);
    CHECK_THROWS_AS((void)eval_xbar(t, q, OrderTag::Bflr),
                    std::invalid_argument);
}

TEST_CASE("pinned answers on a fixed tree") {
    Tree t = parse_tree("(R (A (B)) (C))");
    // Ids: 0 R, 1 A, 2 B, 3 C.
    CHECK(eval_backtracking(t, parse_query("q(x,y) :- child+(x,y).")) ==
          AnswerSet{{0, 1}, {0, 2}, {0, 3}, {1, 2}});
    CHECK(eval_backtracking(t, parse_query("q(x) :- following(x,y).")) ==
          AnswerSet{{1}, {2}});
    CHECK(eval_backtracking(t, parse_query("q(y) :- following(x,y).")) ==
          AnswerSet{{3}});
    CHECK(eval_backtracking(
              t, parse_query("q(x) :- child*(x,y), B(y), nextsib(x,z).")) ==
          AnswerSet{{1}});
    CHECK(satisfiable(t, parse_query("q() :- .")));
    CHECK(!satisfiable(t, parse_query("q() :- D(x).")));
    CHECK(eval_backtracking(t, parse_query("q() :- A(x), B(x).")).empty());
}

TEST_CASE("the empty-head query answers with the empty tuple when satisfied") {
    Tree t = parse_tree("(A)");
    AnswerSet yes = {{}};
    CHECK(eval_backtracking(t, parse_query("q() :- A(x).")) == yes);
    CHECK(eval_bruteforce(t, parse_query("q() :- A(x).")) == yes);
    CHECK(eval_backtracking(t, parse_query("q() :- B(x).")).empty());
}

TEST_CASE("budgets abort runaway searches") {
    Rng rng(46);
    Tree t = random_tree(rng, 40, {});
    ConjunctiveQuery q =
        parse_query("q() :- child+(a,b), child+(b,c), child+(c,d).");
    // A two-node budget cannot even seed the first variable.
    CHECK_THROWS_AS((void)eval_bruteforce(t, q, 2), BudgetExceeded);
    CHECK_THROWS_AS((void)eval_backtracking(t, q, 1), BudgetExceeded);
    CHECK(!eval_backtracking(t, q).empty());
}

TEST_CASE("union queries evaluate as the union of their disjuncts") {
    Rng rng(47);
    std::vector<std::string> alphabet = {"A", "B"};
    for (int round = 0; round < 40; ++round) {
        Tree t = random_tree(rng, 1 + static_cast<int>(rng.next_below(7)),
                             alphabet);
        PositiveQuery p;
        p.arity = 1;
        int k = static_cast<int>(rng.next_below(3));
        std::set<std::vector<int>> expect;
        for (int i = 0; i < k; ++i) {
            ConjunctiveQuery q = random_query(rng, 2, 2, alphabet, 1);
            q.head = {static_cast<int>(rng.next_below(2))};
            for (const auto& tup : oracle_answers(t, q)) expect.insert(tup);
            p.disjuncts.push_back(std::move(q));
        }
        AnswerSet want(expect.begin(), expect.end());
        CHECK(enumerate_answers(t, p) == want);
        CHECK(satisfiable(t, p) == !want.empty());
    }
    PositiveQuery none;
    none.arity = 2;
    Tree t = parse_tree("(A (B))");
    CHECK(enumerate_answers(t, none).empty());
    CHECK(!satisfiable(t, none));
}
