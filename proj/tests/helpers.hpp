#pragma once

#include <string>
#include <vector>

#include "treecq/query.hpp"
#include "treecq/rng.hpp"
#include "treecq/tree.hpp"

namespace treecq::testing {

// Uniform random tree shape with `nodes` nodes; each node independently
// gets one label from `alphabet` or none.
inline Tree random_tree(Rng& rng, int nodes,
                        const std::vector<std::string>& alphabet) {
    TreeBuilder b;
    b.add_node(-1);
    for (int i = 1; i < nodes; ++i)
        b.add_node(static_cast<int>(rng.next_below(i)));
    for (int i = 0; i < nodes; ++i) {
        if (alphabet.empty()) continue;
        std::uint64_t pick = rng.next_below(alphabet.size() + 1);
        if (pick < alphabet.size()) b.add_label(i, alphabet[pick]);
    }
    return b.build();
}

// Random conjunctive query: `vars` variables named v0.., `atoms` binary
// atoms over random axes, plus up to `labels` unary atoms. Boolean head.
inline ConjunctiveQuery random_query(Rng& rng, int vars, int atoms,
                                     const std::vector<std::string>& alphabet,
                                     int labels) {
    ConjunctiveQuery q;
    for (int i = 0; i < vars; ++i) q.add_var("v" + std::to_string(i));
    for (int i = 0; i < atoms; ++i) {
        Axis a = kAllAxes[rng.next_below(kAxisCount)];
        int s = static_cast<int>(rng.next_below(vars));
        int d = static_cast<int>(rng.next_below(vars));
        q.binary.push_back({a, s, d});
    }
    for (int i = 0; i < labels && !alphabet.empty(); ++i)
        q.unary.push_back({static_cast<int>(rng.next_below(vars)),
                           alphabet[rng.next_below(alphabet.size())]});
    q.sort_unary();
    return q;
}

}  // namespace treecq::testing
