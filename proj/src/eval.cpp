#include "treecq/eval.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "treecq/xbar.hpp"

namespace treecq {

bool models(const Tree& t, const ConjunctiveQuery& q, const Valuation& val) {
    if (static_cast<int>(val.size()) < q.num_vars()) return false;
    for (const UnaryAtom& u : q.unary) {
        if (u.label.empty()) continue;
        if (!t.has_label(val[u.var], u.label)) return false;
    }
    for (const BinaryAtom& b : q.binary)
        if (!axis_holds(t, b.axis, val[b.src], val[b.dst])) return false;
    return true;
}

namespace {

// Successor/predecessor lists per axis, built once per tree and shared by
// the solver instances of one evaluation call.
struct AxisAdjCache {
    const Tree& t;
    std::array<std::vector<std::vector<int>>, kAxisCount> succ, pred;
    std::array<bool, kAxisCount> built{};

    explicit AxisAdjCache(const Tree& t) : t(t) {}

    void ensure(Axis a) {
        const int i = static_cast<int>(a);
        if (built[i]) return;
        built[i] = true;
        succ[i].resize(t.size());
        pred[i].resize(t.size());
        for (int v = 0; v < t.size(); ++v) {
            succ[i][v] = axis_successors(t, a, v);
            pred[i][v] = axis_predecessors(t, a, v);
        }
    }
};

// Arc consistency with per-(atom, node) support counters and an undo trail,
// reused as the propagation core of the backtracking search.
class MacSolver {
  public:
    MacSolver(AxisAdjCache& adj, const ConjunctiveQuery& q,
              const std::vector<std::vector<int>>* restrict_to,
              std::uint64_t budget)
        : t_(adj.t),
          adj_(adj),
          q_(q),
          n_(adj.t.size()),
          nv_(q.num_vars()),
          budget_(budget) {
        for (const BinaryAtom& b : q.binary) adj_.ensure(b.axis);
        in_.assign(nv_, std::vector<char>(n_, 1));
        dom_size_.assign(nv_, n_);
        for (const UnaryAtom& u : q_.unary) {
            if (u.label.empty()) continue;
            for (int v = 0; v < n_; ++v)
                if (in_[u.var][v] && !t_.has_label(v, u.label))
                    bare_remove(u.var, v);
        }
        if (restrict_to) {
            for (int x = 0; x < nv_; ++x) {
                const auto& keep = (*restrict_to)[x];
                if (keep.empty()) continue;  // unrestricted
                std::vector<char> mask(n_, 0);
                for (int v : keep)
                    if (v >= 0 && v < n_) mask[v] = 1;
                for (int v = 0; v < n_; ++v)
                    if (in_[x][v] && !mask[v]) bare_remove(x, v);
            }
        }
        var_atoms_.assign(nv_, {});
        const int na = static_cast<int>(q_.binary.size());
        cnt_.assign(na, {});
        for (int a = 0; a < na; ++a) {
            const BinaryAtom& atom = q_.binary[a];
            var_atoms_[atom.src].push_back({a, 0});
            var_atoms_[atom.dst].push_back({a, 1});
            cnt_[a][0].assign(n_, 0);
            cnt_[a][1].assign(n_, 0);
            const auto& succ = adj_.succ[static_cast<int>(atom.axis)];
            const auto& pred = adj_.pred[static_cast<int>(atom.axis)];
            for (int v = 0; v < n_; ++v) {
                if (in_[atom.src][v]) {
                    int c = 0;
                    for (int w : succ[v]) c += in_[atom.dst][w];
                    cnt_[a][0][v] = c;
                }
                if (in_[atom.dst][v]) {
                    int c = 0;
                    for (int w : pred[v]) c += in_[atom.src][w];
                    cnt_[a][1][v] = c;
                }
            }
        }
        for (int a = 0; a < na; ++a) {
            const BinaryAtom& atom = q_.binary[a];
            for (int v = 0; v < n_; ++v) {
                if (in_[atom.src][v] && cnt_[a][0][v] == 0)
                    remove(atom.src, v);
                if (in_[atom.dst][v] && cnt_[a][1][v] == 0)
                    remove(atom.dst, v);
            }
        }
        propagate();
    }

    PreValuation fixpoint() const {
        PreValuation pv;
        pv.in = in_;
        pv.empty = !ok_;
        return pv;
    }

    // First satisfying valuation in the search order, or nullopt.
    std::optional<Valuation> solve() {
        if (!ok_) return std::nullopt;
        return dfs();
    }

  private:
    struct AtomRef {
        int atom;
        int side;  // 0: the variable is src, 1: dst
    };
    struct TrailOp {
        int kind;  // 0: domain removal, 1: count decrement
        int a, b, c;
    };

    // Domain edit without trail or propagation; initial filtering only.
    void bare_remove(int x, int v) {
        in_[x][v] = 0;
        if (--dom_size_[x] == 0) ok_ = false;
    }

    void remove(int x, int v) {
        if (!in_[x][v]) return;
        in_[x][v] = 0;
        --dom_size_[x];
        trail_.push_back({0, x, v, 0});
        if (dom_size_[x] == 0) ok_ = false;
        queue_.push_back({x, v});
    }

    void propagate() {
        while (!queue_.empty()) {
            auto [x, u] = queue_.back();
            queue_.pop_back();
            for (const AtomRef& r : var_atoms_[x]) {
                const BinaryAtom& atom = q_.binary[r.atom];
                const int axis = static_cast<int>(atom.axis);
                if (r.side == 0) {
                    for (int w : adj_.succ[axis][u]) {
                        --cnt_[r.atom][1][w];
                        trail_.push_back({1, r.atom, 1, w});
                        if (cnt_[r.atom][1][w] == 0 && in_[atom.dst][w])
                            remove(atom.dst, w);
                    }
                } else {
                    for (int w : adj_.pred[axis][u]) {
                        --cnt_[r.atom][0][w];
                        trail_.push_back({1, r.atom, 0, w});
                        if (cnt_[r.atom][0][w] == 0 && in_[atom.src][w])
                            remove(atom.src, w);
                    }
                }
            }
        }
    }

    void rollback(std::size_t mark) {
        while (trail_.size() > mark) {
            const TrailOp op = trail_.back();
            trail_.pop_back();
            if (op.kind == 0) {
                in_[op.a][op.b] = 1;
                ++dom_size_[op.a];
            } else {
                ++cnt_[op.a][op.b][op.c];
            }
        }
        ok_ = true;
    }

    std::optional<Valuation> dfs() {
        int x = -1, best = n_ + 1;
        for (int i = 0; i < nv_; ++i)
            if (dom_size_[i] > 1 && dom_size_[i] < best) {
                best = dom_size_[i];
                x = i;
            }
        if (x < 0) {
            Valuation val(nv_, 0);
            for (int i = 0; i < nv_; ++i)
                for (int v = 0; v < n_; ++v)
                    if (in_[i][v]) {
                        val[i] = v;
                        break;
                    }
            return val;
        }
        for (int v = 0; v < n_; ++v) {
            if (!in_[x][v]) continue;
            if (++ops_ > budget_) throw BudgetExceeded();
            const std::size_t m = trail_.size();
            if (assign(x, v)) {
                if (auto r = dfs()) return r;
            }
            rollback(m);
        }
        return std::nullopt;
    }

    bool assign(int x, int v) {
        for (int u = 0; u < n_; ++u)
            if (u != v && in_[x][u]) remove(x, u);
        propagate();
        return ok_;
    }

    const Tree& t_;
    AxisAdjCache& adj_;
    const ConjunctiveQuery& q_;
    int n_, nv_;
    std::uint64_t budget_;
    std::uint64_t ops_ = 0;
    bool ok_ = true;
    std::vector<std::vector<char>> in_;
    std::vector<int> dom_size_;
    std::vector<std::vector<AtomRef>> var_atoms_;
    std::vector<std::array<std::vector<int>, 2>> cnt_;
    std::vector<TrailOp> trail_;
    std::vector<std::pair<int, int>> queue_;
};

PreValuation ac_recompute(const Tree& t, const ConjunctiveQuery& q,
                          const std::vector<std::vector<int>>* restrict_to) {
    const int n = t.size();
    const int nv = q.num_vars();
    PreValuation pv;
    pv.in.assign(nv, std::vector<char>(n, 1));
    for (const UnaryAtom& u : q.unary) {
        if (u.label.empty()) continue;
        for (int v = 0; v < n; ++v)
            if (!t.has_label(v, u.label)) pv.in[u.var][v] = 0;
    }
    if (restrict_to) {
        for (int x = 0; x < nv; ++x) {
            const auto& keep = (*restrict_to)[x];
            if (keep.empty()) continue;
            std::vector<char> mask(n, 0);
            for (int v : keep)
                if (v >= 0 && v < n) mask[v] = 1;
            for (int v = 0; v < n; ++v)
                if (!mask[v]) pv.in[x][v] = 0;
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const BinaryAtom& b : q.binary) {
            for (int v = 0; v < n; ++v) {
                if (!pv.in[b.src][v]) continue;
                bool supported = false;
                for (int w = 0; w < n && !supported; ++w)
                    supported = pv.in[b.dst][w] && axis_holds(t, b.axis, v, w);
                if (!supported) {
                    pv.in[b.src][v] = 0;
                    changed = true;
                }
            }
            for (int w = 0; w < n; ++w) {
                if (!pv.in[b.dst][w]) continue;
                bool supported = false;
                for (int v = 0; v < n && !supported; ++v)
                    supported = pv.in[b.src][v] && axis_holds(t, b.axis, v, w);
                if (!supported) {
                    pv.in[b.dst][w] = 0;
                    changed = true;
                }
            }
        }
    }
    for (int x = 0; x < nv; ++x) {
        bool any = false;
        for (int v = 0; v < n; ++v) any = any || pv.in[x][v];
        if (!any) pv.empty = true;
    }
    return pv;
}

// Candidate nodes per distinct head variable, in first-occurrence order,
// feeding the tuple odometer of the enumeration routines.
struct HeadSpace {
    std::vector<int> dvars;           // distinct head variables
    std::vector<int> pos_dv;          // head position -> index into dvars
    std::vector<std::vector<int>> domain;  // per distinct variable
};

HeadSpace head_space(const ConjunctiveQuery& q, const PreValuation& pv) {
    HeadSpace hs;
    for (int h : q.head) {
        int idx = -1;
        for (std::size_t i = 0; i < hs.dvars.size(); ++i)
            if (hs.dvars[i] == h) idx = static_cast<int>(i);
        if (idx < 0) {
            idx = static_cast<int>(hs.dvars.size());
            hs.dvars.push_back(h);
            std::vector<int> dom;
            for (int v = 0; v < static_cast<int>(pv.in[h].size()); ++v)
                if (pv.in[h][v]) dom.push_back(v);
            hs.domain.push_back(std::move(dom));
        }
        hs.pos_dv.push_back(idx);
    }
    return hs;
}

template <typename Decide>
AnswerSet enumerate_core(const Tree& t, const ConjunctiveQuery& q,
                         Decide decide) {
    AnswerSet out;
    if (q.head.empty()) {
        if (decide(std::vector<int>{})) out.push_back({});
        return out;
    }
    PreValuation pv = arc_consistency(t, q);
    if (pv.empty) return out;
    HeadSpace hs = head_space(q, pv);
    const int k = static_cast<int>(hs.dvars.size());
    std::vector<std::size_t> at(k, 0);
    while (true) {
        std::vector<int> tuple(q.head.size());
        for (std::size_t i = 0; i < q.head.size(); ++i)
            tuple[i] = hs.domain[hs.pos_dv[i]][at[hs.pos_dv[i]]];
        if (decide(tuple)) out.push_back(tuple);
        int i = k - 1;
        while (i >= 0 && ++at[i] == hs.domain[i].size()) at[i--] = 0;
        if (i < 0) break;
    }
    return out;
}

std::vector<std::vector<int>> pin_head(const ConjunctiveQuery& q,
                                       const std::vector<int>& tuple,
                                       bool& conflict) {
    conflict = false;
    std::vector<std::vector<int>> restrict_to(q.num_vars());
    for (std::size_t i = 0; i < q.head.size(); ++i) {
        auto& slot = restrict_to[q.head[i]];
        if (!slot.empty() && slot[0] != tuple[i]) conflict = true;
        slot = {tuple[i]};
    }
    return restrict_to;
}

}  // namespace

PreValuation arc_consistency(const Tree& t, const ConjunctiveQuery& q,
                             AcEngine engine,
                             const std::vector<std::vector<int>>* restrict_to) {
    if (engine == AcEngine::Recompute) return ac_recompute(t, q, restrict_to);
    AxisAdjCache adj(t);
    MacSolver solver(adj, q, restrict_to, kNoBudget);
    return solver.fixpoint();
}

std::optional<Valuation> eval_xbar(const Tree& t, const ConjunctiveQuery& q,
                                   OrderTag order) {
    const Classification c = classify(q.signature());
    if (!c.tractable || c.order != order)
        throw std::invalid_argument(
            "signature is not crossing-free w.r.t. the requested order");
    PreValuation pv = arc_consistency(t, q);
    if (pv.empty) return std::nullopt;
    Valuation val(q.num_vars(), 0);
    for (int x = 0; x < q.num_vars(); ++x) {
        int best = -1;
        for (int v = 0; v < t.size(); ++v)
            if (pv.in[x][v] &&
                (best < 0 || t.rank(order, v) < t.rank(order, best)))
                best = v;
        val[x] = best;
    }
    return val;
}

std::optional<Valuation> eval_xbar(const Tree& t, const ConjunctiveQuery& q) {
    const Classification c = classify(q.signature());
    if (!c.tractable)
        throw std::invalid_argument(
            "signature is not crossing-free w.r.t. any node order");
    return eval_xbar(t, q, c.order);
}

AnswerSet eval_backtracking(const Tree& t, const ConjunctiveQuery& q,
                            std::uint64_t budget) {
    AxisAdjCache adj(t);
    return enumerate_core(t, q, [&](const std::vector<int>& tuple) {
        bool conflict = false;
        auto restrict_to = pin_head(q, tuple, conflict);
        if (conflict) return false;
        MacSolver solver(adj, q, q.head.empty() ? nullptr : &restrict_to,
                         budget);
        return solver.solve().has_value();
    });
}

AnswerSet eval_bruteforce(const Tree& t, const ConjunctiveQuery& q,
                          std::uint64_t budget) {
    const int n = t.size();
    const int nv = q.num_vars();
    // Atoms become checkable once their highest variable is assigned.
    std::vector<std::vector<const UnaryAtom*>> unary_at(nv);
    std::vector<std::vector<const BinaryAtom*>> binary_at(nv);
    for (const UnaryAtom& u : q.unary) unary_at[u.var].push_back(&u);
    for (const BinaryAtom& b : q.binary)
        binary_at[std::max(b.src, b.dst)].push_back(&b);
    std::set<std::vector<int>> acc;
    Valuation val(nv, 0);
    std::uint64_t ops = 0;
    auto dfs = [&](auto&& self, int i) -> void {
        if (i == nv) {
            std::vector<int> tuple(q.head.size());
            for (std::size_t j = 0; j < q.head.size(); ++j)
                tuple[j] = val[q.head[j]];
            acc.insert(tuple);
            return;
        }
        for (int v = 0; v < n; ++v) {
            if (++ops > budget) throw BudgetExceeded();
            val[i] = v;
            bool ok = true;
            for (const UnaryAtom* u : unary_at[i])
                ok = ok && (u->label.empty() || t.has_label(v, u->label));
            for (const BinaryAtom* b : binary_at[i])
                ok = ok && axis_holds(t, b->axis, val[b->src], val[b->dst]);
            if (ok) self(self, i + 1);
        }
    };
    dfs(dfs, 0);
    return AnswerSet(acc.begin(), acc.end());
}

bool check_tuple(const Tree& t, const ConjunctiveQuery& q,
                 const std::vector<int>& tuple, std::uint64_t budget) {
    if (tuple.size() != q.head.size())
        throw std::invalid_argument("tuple arity differs from head arity");
    for (int v : tuple)
        if (v < 0 || v >= t.size()) return false;
    bool conflict = false;
    auto restrict_to = pin_head(q, tuple, conflict);
    if (conflict) return false;
    const auto* pins = q.head.empty() ? nullptr : &restrict_to;
    const Classification c = classify(q.signature());
    if (c.tractable || q.is_acyclic())
        return !arc_consistency(t, q, AcEngine::SupportCounting, pins).empty;
    AxisAdjCache adj(t);
    MacSolver solver(adj, q, pins, budget);
    return solver.solve().has_value();
}

AnswerSet enumerate_answers(const Tree& t, const ConjunctiveQuery& q,
                            std::uint64_t budget) {
    return enumerate_core(t, q, [&](const std::vector<int>& tuple) {
        return check_tuple(t, q, tuple, budget);
    });
}

AnswerSet enumerate_answers(const Tree& t, const PositiveQuery& p,
                            std::uint64_t budget) {
    std::set<std::vector<int>> acc;
    for (const ConjunctiveQuery& q : p.disjuncts)
        for (auto& tuple : enumerate_answers(t, q, budget))
            acc.insert(tuple);
    return AnswerSet(acc.begin(), acc.end());
}

bool satisfiable(const Tree& t, const ConjunctiveQuery& q,
                 std::uint64_t budget) {
    const Classification c = classify(q.signature());
    if (c.tractable || q.is_acyclic())
        return !arc_consistency(t, q).empty;
    AxisAdjCache adj(t);
    MacSolver solver(adj, q, nullptr, budget);
    return solver.solve().has_value();
}

bool satisfiable(const Tree& t, const PositiveQuery& p, std::uint64_t budget) {
    for (const ConjunctiveQuery& q : p.disjuncts)
        if (satisfiable(t, q, budget)) return true;
    return false;
}

std::optional<Valuation> find_witness(const Tree& t,
                                      const ConjunctiveQuery& q,
                                      std::uint64_t budget) {
    const Classification c = classify(q.signature());
    if (c.tractable) return eval_xbar(t, q, c.order);
    AxisAdjCache adj(t);
    MacSolver solver(adj, q, nullptr, budget);
    return solver.solve();
}

}  // namespace treecq
