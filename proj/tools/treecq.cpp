// treecq: command-line front end for the tree conjunctive-query toolkit.
//
// Exit codes: 0 success, 1 negative result (query false, signature not
// tractable, grid or oracle difference), 2 usage or input errors.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "treecq/eval.hpp"
#include "treecq/gadget.hpp"
#include "treecq/query.hpp"
#include "treecq/rewrite.hpp"
#include "treecq/succinct.hpp"
#include "treecq/tree.hpp"
#include "treecq/xbar.hpp"

namespace {

using namespace treecq;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

std::uint64_t effective_budget(std::uint64_t budget) {
    return budget == 0 ? kNoBudget : budget;
}

OrderTag order_from_name(const std::string& s) {
    for (OrderTag o : {OrderTag::Pre, OrderTag::Post, OrderTag::Bflr})
        if (s == order_name(o)) return o;
    throw UsageError("unknown order: " + s + " (pre|post|bflr)");
}

std::vector<Axis> axes_from_csv(const std::string& csv) {
    std::vector<Axis> out;
    std::string item;
    std::istringstream in(csv);
    while (std::getline(in, item, ',')) {
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        if (item.empty()) continue;
        std::optional<Axis> a = axis_from_name(item);
        if (!a) throw UsageError("unknown axis: " + item);
        out.push_back(*a);
    }
    return out;
}

std::string witness_line(const ConjunctiveQuery& q, const Valuation& val) {
    if (q.num_vars() == 0) return "true";
    std::string out;
    for (int x = 0; x < q.num_vars(); ++x) {
        if (x) out += ' ';
        out += q.var_names[x] + "=" + std::to_string(val[x]);
    }
    return out;
}

// ---------------------------------------------------------------- eval

int run_eval(const std::string& tree_path, const std::string& query_path,
             const std::string& strategy, std::uint64_t budget) {
    Tree t = parse_tree(read_file(tree_path));
    ConjunctiveQuery q = parse_query(read_file(query_path));
    std::uint64_t bud = effective_budget(budget);

    if (strategy == "xbar") {
        Classification c = classify(q.signature());
        if (!c.tractable) {
            std::cout << "not tractable (Table I: " << c.ref << "): "
                      << axis_name(c.offending.first) << ", "
                      << axis_name(c.offending.second) << "\n";
            return 1;
        }
    }

    if (q.head.empty()) {
        bool sat;
        std::optional<Valuation> witness;
        if (strategy == "xbar") {
            witness = eval_xbar(t, q);
            sat = witness.has_value();
        } else if (strategy == "backtrack") {
            sat = !eval_backtracking(t, q, bud).empty();
        } else if (strategy == "brute") {
            sat = !eval_bruteforce(t, q, bud).empty();
        } else {
            sat = satisfiable(t, q, bud);
        }
        if (!sat) {
            std::cout << "false\n";
            return 1;
        }
        if (!witness) witness = find_witness(t, q, bud);
        std::cout << witness_line(q, *witness) << "\n";
        return 0;
    }

    AnswerSet answers;
    if (strategy == "backtrack") {
        answers = eval_backtracking(t, q, bud);
    } else if (strategy == "brute") {
        answers = eval_bruteforce(t, q, bud);
    } else {
        answers = enumerate_answers(t, q, bud);
    }
    for (const std::vector<int>& tup : answers) {
        for (std::size_t i = 0; i < tup.size(); ++i) {
            if (i) std::cout << ' ';
            std::cout << tup[i];
        }
        std::cout << "\n";
    }
    return answers.empty() ? 1 : 0;
}

// ------------------------------------------------------------- rewrite

int run_rewrite(const std::string& query_path, const std::string& mode_str) {
    std::optional<RewriteMode> mode = mode_from_name(mode_str);
    if (!mode) throw UsageError("unknown mode: " + mode_str);
    ConjunctiveQuery q = parse_query(read_file(query_path));
    RewriteStats stats;
    PositiveQuery apq;
    try {
        apq = rewrite_to_apq(q, *mode, &stats);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::cout << serialize_positive_query(apq);
    std::cout << "mode: " << mode_name(stats.mode) << "\n";
    std::cout << "disjuncts: " << stats.disjuncts
              << " (before merge: " << stats.disjuncts_before_merge << ")\n";
    std::cout << "max atoms: " << stats.max_atoms << "\n";
    std::cout << "total atoms: " << stats.total_atoms << "\n";
    return 0;
}

// ------------------------------------------------------------ classify

int run_classify(const std::string& axes_csv) {
    Classification c = classify(axes_from_csv(axes_csv));
    if (c.tractable) {
        std::cout << "in P (Table I: " << c.ref << ")\n";
        std::cout << "order: " << order_name(c.order) << "\n";
        return 0;
    }
    std::cout << "NP-hard (Table I: " << c.ref << ")\n";
    std::cout << "offending pair: " << axis_name(c.offending.first) << ", "
              << axis_name(c.offending.second) << "\n";
    return 1;
}

// ---------------------------------------------------------- xbar-check

int run_xbar_check(const std::string& tree_path, const std::string& axis_str,
                   const std::string& order_str, bool inverse) {
    Tree t = parse_tree(read_file(tree_path));
    std::optional<Axis> a = axis_from_name(axis_str);
    if (!a) throw UsageError("unknown axis: " + axis_str);
    OrderTag o = order_from_name(order_str);
    std::optional<std::array<int, 4>> cex =
        check_xbar(t, AxisRel{*a, inverse}, o);
    std::cout << "relation: " << (inverse ? "inverse " : "") << axis_name(*a)
              << ", order: " << order_name(o) << "\n";
    if (!cex) {
        std::cout << "crossing-free: yes\n";
        return 0;
    }
    std::cout << "crossing-free: no\n";
    std::cout << "counterexample: n0=" << (*cex)[0] << " n1=" << (*cex)[1]
              << " n2=" << (*cex)[2] << " n3=" << (*cex)[3] << "\n";
    return 1;
}

// -------------------------------------------------------------- gadget

int run_gadget(const std::string& instance_path, const std::string& family,
               const std::string& tree_out, const std::string& query_out,
               bool verify, std::uint64_t budget) {
    OneInThreeInstance inst;
    try {
        inst = parse_instance(read_file(instance_path));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    GadgetOutput g;
    if (family == "tau4") {
        g = reduce_tau45(inst, false);
    } else if (family == "tau5") {
        g = reduce_tau45(inst, true);
    } else if (family == "tau6") {
        g = reduce_tau6(inst);
    } else if (family == "tau15") {
        g = reduce_tau15(inst);
    } else {
        throw UsageError("unknown family: " + family +
                         " (tau4|tau5|tau6|tau15)");
    }
    write_file(tree_out, serialize_tree(g.tree) + "\n");
    write_file(query_out, serialize_query(g.query) + "\n");
    std::cout << "family: " << family << " (" << g.signature_tag << ")\n";
    std::cout << "instance: " << inst.clauses.size() << " clauses over "
              << inst.num_vars << " variables\n";
    std::cout << "tree: " << g.tree.size() << " nodes -> " << tree_out << "\n";
    std::cout << "query: " << g.query.num_vars() << " variables, "
              << g.query.unary.size() + g.query.binary.size() << " atoms -> "
              << query_out << "\n";
    if (!verify) return 0;

    bool oracle;
    try {
        oracle = brute_1in3(inst);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    bool query_sat = satisfiable(g.tree, g.query, effective_budget(budget));
    std::cout << "oracle: " << (oracle ? "satisfiable" : "unsatisfiable")
              << "\n";
    std::cout << "query: " << (query_sat ? "satisfiable" : "unsatisfiable")
              << "\n";
    std::cout << "verdict: " << (oracle == query_sat ? "agree" : "disagree")
              << "\n";
    return oracle == query_sat ? 0 : 1;
}

// ----------------------------------------------- diamond / ps / blowup

int run_diamond(int n) {
    std::cout << serialize_query(gen_diamond(n)) << "\n";
    return 0;
}

int run_ps(int n, int p, const std::string& bits_str, bool as_tree) {
    std::vector<bool> bits(static_cast<std::size_t>(n), false);
    if (!bits_str.empty()) {
        if (static_cast<int>(bits_str.size()) != n)
            throw UsageError("--bits must have exactly n characters");
        for (int i = 0; i < n; ++i) {
            if (bits_str[i] != '0' && bits_str[i] != '1')
                throw UsageError("--bits must be a string of 0s and 1s");
            bits[i] = bits_str[i] == '1';
        }
    }
    PathStructure ps = gen_ps(n, p, bits);
    if (as_tree)
        std::cout << serialize_tree(ps.to_tree()) << "\n";
    else
        std::cout << serialize_path(ps) << "\n";
    return 0;
}

std::string blowup_csv(const std::vector<BlowupRow>& rows) {
    std::string out =
        "n,disjuncts,disjuncts_before_merge,total_atoms,max_atoms,"
        "equivalent\n";
    for (const BlowupRow& r : rows) {
        out += std::to_string(r.n) + "," + std::to_string(r.disjuncts) + "," +
               std::to_string(r.disjuncts_before_merge) + "," +
               std::to_string(r.total_atoms) + "," +
               std::to_string(r.max_atoms) + "," +
               (r.equivalent ? "yes" : "no") + "\n";
    }
    return out;
}

int run_blowup(int n_max, const std::string& mode_str, int trials,
               std::uint64_t seed, const std::string& csv_out,
               const std::string& format) {
    std::optional<RewriteMode> mode = mode_from_name(mode_str);
    if (!mode) throw UsageError("unknown mode: " + mode_str);
    std::vector<BlowupRow> rows;
    try {
        rows = blowup_experiment(n_max, *mode, trials, seed);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (format == "csv") {
        std::cout << blowup_csv(rows);
    } else {
        std::cout << std::left << std::setw(4) << "n" << std::setw(11)
                  << "disjuncts" << std::setw(14) << "before-merge"
                  << std::setw(13) << "total-atoms" << std::setw(11)
                  << "max-atoms"
                  << "equivalent\n";
        for (const BlowupRow& r : rows)
            std::cout << std::left << std::setw(4) << r.n << std::setw(11)
                      << r.disjuncts << std::setw(14)
                      << r.disjuncts_before_merge << std::setw(13)
                      << r.total_atoms << std::setw(11) << r.max_atoms
                      << (r.equivalent ? "yes" : "no") << "\n";
    }
    write_file(csv_out, blowup_csv(rows));
    std::cout << "csv written: " << csv_out << "\n";
    for (const BlowupRow& r : rows)
        if (!r.equivalent) return 1;
    return 0;
}

// -------------------------------------------------------------- table1

// Expected verdict grid, upper triangle in canonical axis order. The
// diagonal holds the singleton verdicts.
const char* const kExpectedGrid[7][7] = {
    {"in P (4.4)", "NP-hard (5.1)", "NP-hard (5.1)", "in P (4.4)",
     "in P (4.4)", "in P (4.4)", "NP-hard (5.2)"},
    {nullptr, "in P (4.2)", "in P (4.2)", "NP-hard (5.7)", "NP-hard (5.7)",
     "NP-hard (5.7)", "NP-hard (5.3)"},
    {nullptr, nullptr, "in P (4.2)", "NP-hard (5.5)", "NP-hard (5.4)",
     "NP-hard (5.6)", "NP-hard (5.3)"},
    {nullptr, nullptr, nullptr, "in P (4.4)", "in P (4.4)", "in P (4.4)",
     "NP-hard (5.8)"},
    {nullptr, nullptr, nullptr, nullptr, "in P (4.4)", "in P (4.4)",
     "NP-hard (5.8)"},
    {nullptr, nullptr, nullptr, nullptr, nullptr, "in P (4.4)",
     "NP-hard (5.8)"},
    {nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, "in P (4.3)"},
};

int run_table1(const std::string& format) {
    constexpr int kAxes = 7;
    std::string computed[kAxes][kAxes];
    for (int i = 0; i < kAxes; ++i)
        for (int j = 0; j < kAxes; ++j)
            computed[i][j] = table1_cell(kAllAxes[i], kAllAxes[j]);

    if (format == "csv") {
        std::cout << "axis";
        for (Axis a : kAllAxes) std::cout << "," << axis_name(a);
        std::cout << "\n";
        for (int i = 0; i < kAxes; ++i) {
            std::cout << axis_name(kAllAxes[i]);
            for (int j = 0; j < kAxes; ++j) std::cout << "," << computed[i][j];
            std::cout << "\n";
        }
    } else {
        std::cout << std::left << std::setw(10) << "";
        for (int j = 0; j < kAxes; ++j)
            std::cout << std::setw(j + 1 == kAxes ? 0 : 15)
                      << axis_name(kAllAxes[j]);
        std::cout << "\n";
        for (int i = 0; i < kAxes; ++i) {
            std::cout << std::left << std::setw(10) << axis_name(kAllAxes[i]);
            for (int j = 0; j < kAxes; ++j)
                std::cout << std::setw(j + 1 == kAxes ? 0 : 15)
                          << computed[i][j];
            std::cout << "\n";
        }
    }

    int differences = 0;
    for (int i = 0; i < kAxes; ++i)
        for (int j = i; j < kAxes; ++j)
            if (computed[i][j] != kExpectedGrid[i][j]) {
                ++differences;
                std::cout << "difference at (" << axis_name(kAllAxes[i])
                          << ", " << axis_name(kAllAxes[j]) << "): computed \""
                          << computed[i][j] << "\" expected \""
                          << kExpectedGrid[i][j] << "\"\n";
            }
    if (differences == 0) {
        std::cout << "grid matches the embedded expected table\n";
        return 0;
    }
    std::cout << differences << " difference(s)\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conjunctive-query evaluation over unranked labeled trees"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::uint64_t budget = 0;
    std::string format = "text";
    app.add_option("--seed", seed, "RNG seed for randomized subcommands")
        ->capture_default_str();
    app.add_option("--budget", budget,
                   "evaluation budget in value trials (0 = unlimited)")
        ->capture_default_str();
    app.add_option("--format", format, "table output format")
        ->check(CLI::IsMember({"text", "csv"}))
        ->capture_default_str();

    std::string tree_path, query_path;
    std::string strategy = "auto";
    CLI::App* eval = app.add_subcommand(
        "eval", "evaluate a conjunctive query on a tree");
    eval->fallthrough();
    eval->add_option("--tree", tree_path, "tree file")->required();
    eval->add_option("--query", query_path, "query file")->required();
    eval->add_option("--strategy", strategy, "evaluation strategy")
        ->check(CLI::IsMember({"auto", "xbar", "backtrack", "brute"}))
        ->capture_default_str();

    std::string rw_query_path;
    std::string rw_mode = "auto";
    CLI::App* rewrite = app.add_subcommand(
        "rewrite", "rewrite a query to a union of acyclic queries");
    rewrite->fallthrough();
    rewrite->add_option("--query", rw_query_path, "query file")->required();
    rewrite->add_option("--mode", rw_mode, "66a|66b|66c|69|610|auto")
        ->capture_default_str();

    std::string axes_csv;
    CLI::App* classify_cmd = app.add_subcommand(
        "classify", "classify an axis signature as in P or NP-hard");
    classify_cmd->fallthrough();
    classify_cmd->add_option("--axes", axes_csv, "comma-separated axis names");

    std::string xc_tree, xc_axis, xc_order;
    bool xc_inverse = false;
    CLI::App* xbar_check = app.add_subcommand(
        "xbar-check", "check crossing-freeness of an axis on a tree");
    xbar_check->fallthrough();
    xbar_check->add_option("--tree", xc_tree, "tree file")->required();
    xbar_check->add_option("--axis", xc_axis, "axis name")->required();
    xbar_check->add_option("--order", xc_order, "pre|post|bflr")->required();
    xbar_check->add_flag("--inverse", xc_inverse, "use the inverted relation");

    std::string gd_instance, gd_family;
    std::string gd_tree_out = "gadget_tree.sexp";
    std::string gd_query_out = "gadget_query.cq";
    bool gd_verify = false;
    CLI::App* gadget = app.add_subcommand(
        "gadget", "emit a hardness gadget for a 1-in-3 instance");
    gadget->fallthrough();
    gadget->add_option("--instance", gd_instance, "instance file")->required();
    gadget->add_option("--family", gd_family, "tau4|tau5|tau6|tau15")
        ->required();
    gadget->add_option("--tree-out", gd_tree_out, "tree output file")
        ->capture_default_str();
    gadget->add_option("--query-out", gd_query_out, "query output file")
        ->capture_default_str();
    gadget->add_flag("--verify", gd_verify,
                     "compare query truth against the brute-force oracle");

    int dm_n = 1;
    CLI::App* diamond = app.add_subcommand(
        "diamond", "print the n-tier diamond query");
    diamond->fallthrough();
    diamond->add_option("--n", dm_n, "number of tiers")->required();

    int ps_n = 1, ps_p = 1;
    std::string ps_bits;
    bool ps_as_tree = false;
    CLI::App* ps = app.add_subcommand(
        "ps", "print a scattered path structure");
    ps->fallthrough();
    ps->add_option("--n", ps_n, "number of tiers")->required();
    ps->add_option("--p", ps_p, "padding run length")->required();
    ps->add_option("--bits", ps_bits, "swap pattern, e.g. 010");
    ps->add_flag("--as-tree", ps_as_tree, "print as a tree s-expression");

    int bl_n_max = 3;
    int bl_trials = 10;
    std::string bl_mode = "610";
    std::string bl_csv_out = "blowup.csv";
    CLI::App* blowup = app.add_subcommand(
        "blowup", "measure rewrite growth of the diamond queries");
    blowup->fallthrough();
    blowup->add_option("--n-max", bl_n_max, "largest tier count")
        ->capture_default_str();
    blowup->add_option("--mode", bl_mode, "rewrite mode")
        ->capture_default_str();
    blowup->add_option("--trials", bl_trials, "random trees per check")
        ->capture_default_str();
    blowup->add_option("--csv-out", bl_csv_out, "growth table CSV path")
        ->capture_default_str();

    CLI::App* table1 = app.add_subcommand(
        "table1", "print the two-axis verdict grid and diff it");
    table1->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(eval))
            return run_eval(tree_path, query_path, strategy, budget);
        if (app.got_subcommand(rewrite))
            return run_rewrite(rw_query_path, rw_mode);
        if (app.got_subcommand(classify_cmd)) return run_classify(axes_csv);
        if (app.got_subcommand(xbar_check))
            return run_xbar_check(xc_tree, xc_axis, xc_order, xc_inverse);
        if (app.got_subcommand(gadget))
            return run_gadget(gd_instance, gd_family, gd_tree_out,
                              gd_query_out, gd_verify, budget);
        if (app.got_subcommand(diamond)) return run_diamond(dm_n);
        if (app.got_subcommand(ps))
            return run_ps(ps_n, ps_p, ps_bits, ps_as_tree);
        if (app.got_subcommand(blowup))
            return run_blowup(bl_n_max, bl_mode, bl_trials, seed, bl_csv_out,
                              format);
        if (app.got_subcommand(table1)) return run_table1(format);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExceeded&) {
        std::cerr << "error: evaluation budget exceeded\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
