#ifndef LTLCOUNT_TREE_CHECK_HPP_
#define LTLCOUNT_TREE_CHECK_HPP_

#include "ltlcount/bounded.hpp"
#include "ltlcount/count.hpp"
#include "ltlcount/error.hpp"
#include "ltlcount/formula.hpp"
#include "ltlcount/nba.hpp"
#include "ltlcount/tree.hpp"

#include <atomic>
#include <exception>
#include <memory>
#include <optional>
#include <set>
#include <thread>
#include <utility>
#include <vector>

namespace ltlcount
{

/// True iff some initial path of t is accepted by `a`.
inline bool tree_has_accepted_path(const BuchiAutomaton& a, const TreeModel& t)
{
    const std::uint64_t nq = a.states.size();
    std::vector<std::uint64_t> init(a.initial.begin(), a.initial.end());
    auto succ = [&](std::uint64_t node, std::vector<std::uint64_t>& out) {
        const std::uint64_t q = node % nq;
        const std::size_t x = static_cast<std::size_t>(node / nq);
        for (std::size_t d = 0; d < t.directions(); ++d) {
            if (!a.reads(static_cast<std::uint32_t>(q), t.letter(x, d))) continue;
            const std::uint64_t y = t.next(x, d);
            for (std::uint32_t q2 : a.states[q].succ) out.push_back(y * nq + q2);
        }
    };
    auto accepting = [&](std::uint64_t node) { return a.states[node % nq].accepting; };
    return detail::has_accepting_cycle(init, succ, accepting);
}

/// Every initial path of t satisfies f: emptiness of t x NBA(!f).
inline bool check_tree_nba(Formula f, const TreeModel& t, const TableauCap& cap = {})
{
    check_atoms(f, t.atoms());
    return !tree_has_accepted_path(ltl_to_nba(make_not(f), t.atoms(), cap), t);
}

// ---------------------------------------------------------------------------
// Fragment checker

/// Formulas of the shape F ::= B | X F | F & F | G B | B R F with B free of
/// until/release, compiled for lookahead checking.
class FragmentFormula
{
public:
    enum class Kind : std::uint8_t { bounded, next, conj, globally, release };

    FragmentFormula(Formula f, const AtomSet& atoms) : atoms_(&atoms)
    {
        root_ = build(f);
        atoms_ = nullptr;
    }

    static bool in_fragment(Formula f)
    {
        std::vector<Formula> todo{f};
        while (!todo.empty()) {
            Formula g = todo.back();
            todo.pop_back();
            if (g.is_bounded()) continue;
            switch (g.op()) {
            case Op::next: todo.push_back(g.child()); break;
            case Op::conj:
                todo.push_back(g.lhs());
                todo.push_back(g.rhs());
                break;
            case Op::globally:
                if (!g.child().is_bounded()) return false;
                break;
            case Op::release:
                if (!g.lhs().is_bounded()) return false;
                todo.push_back(g.rhs());
                break;
            default: return false;
            }
        }
        return true;
    }

    /// Universal satisfaction on t.
    bool holds_on(const TreeModel& t) const
    {
        Run run{*this, t};
        return !run.violated(root_, 0, {});
    }

private:
    struct Node
    {
        Kind kind;
        int bounded = -1;            // index into bodies_ (B, G's body, release's left side)
        std::vector<int> children;   // next: 1, conj: n, release: 1
    };

    int build(Formula f)
    {
        Node n{Kind::bounded, -1, {}};
        if (f.is_bounded()) {
            n.bounded = body(f);
        } else if (f.op() == Op::next) {
            n.kind = Kind::next;
            n.children.push_back(build(f.child()));
        } else if (f.op() == Op::conj) {
            n.kind = Kind::conj;
            for (Formula c : conjuncts(f)) n.children.push_back(build(c));
        } else if (f.op() == Op::globally && f.child().is_bounded()) {
            n.kind = Kind::globally;
            n.bounded = body(f.child());
        } else if (f.op() == Op::release && f.lhs().op() == Op::ff && f.rhs().is_bounded()) {
            n.kind = Kind::globally;
            n.bounded = body(f.rhs());
        } else if (f.op() == Op::release && f.lhs().is_bounded()) {
            n.kind = Kind::release;
            n.bounded = body(f.lhs());
            n.children.push_back(build(f.rhs()));
        } else {
            throw NotInFragment("not in the checkable fragment: " + print(f));
        }
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size() - 1);
    }

    int body(Formula f)
    {
        bodies_.emplace_back(f, *atoms_);
        return static_cast<int>(bodies_.size() - 1);
    }

    using Window = std::vector<std::uint8_t>;

    /// Per-tree evaluation state with memo tables for G B.
    struct Run
    {
        const FragmentFormula& ff;
        const TreeModel& t;
        std::vector<std::vector<char>> g_memo = {};   // per globally-node: per state 0/1/2 (unknown/ok/violated)

        /// Kleene value of B at x when only the directions in w are fixed:
        /// outputs are known up to offset |w|, inputs up to |w| - 1.
        Tri eval_window(int b, std::size_t x, const Window& w) const
        {
            std::vector<std::size_t> states{x};
            for (std::uint8_t d : w) states.push_back(t.next(states.back(), d));
            auto lit = [&](int atom, std::uint32_t off) {
                const Letter bit = Letter{1} << atom;
                if (t.atoms()[static_cast<std::size_t>(atom)].kind == AtomKind::input) {
                    if (off >= w.size()) return Tri::unknown;
                    return (t.direction_letter(w[off]) & bit) ? Tri::yes : Tri::no;
                }
                if (off > w.size()) return Tri::unknown;
                return (t.label(states[off]) & bit) ? Tri::yes : Tri::no;
            };
            return ff.bodies_[static_cast<std::size_t>(b)].eval(lit);
        }

        /// Whether some path from x starting with `w` makes B false at its first position.
        bool bounded_violated(int b, std::size_t x, Window& w)
        {
            const Tri v = eval_window(b, x, w);
            if (v == Tri::no) return true;
            if (v == Tri::yes) return false;
            for (std::size_t d = 0; d < t.directions(); ++d) {
                w.push_back(static_cast<std::uint8_t>(d));
                const bool r = bounded_violated(b, x, w);
                w.pop_back();
                if (r) return true;
            }
            return false;
        }

        /// Windows extending w (up to B's depth) on which B is definitely false.
        void falsifying_windows(int b, std::size_t x, Window& w, std::vector<Window>& out)
        {
            const Tri v = eval_window(b, x, w);
            if (v == Tri::no) {
                out.push_back(w);
                return;
            }
            if (v == Tri::yes) return;
            for (std::size_t d = 0; d < t.directions(); ++d) {
                w.push_back(static_cast<std::uint8_t>(d));
                falsifying_windows(b, x, w, out);
                w.pop_back();
            }
        }

        bool violated(int id, std::size_t x, Window w)
        {
            const Node& n = ff.nodes_[static_cast<std::size_t>(id)];
            switch (n.kind) {
            case Kind::bounded: return bounded_violated(n.bounded, x, w);
            case Kind::conj:
                for (int c : n.children)
                    if (violated(c, x, w)) return true;
                return false;
            case Kind::next: {
                if (!w.empty()) {
                    const std::size_t y = t.next(x, w.front());
                    return violated(n.children[0], y, Window(w.begin() + 1, w.end()));
                }
                for (std::size_t d = 0; d < t.directions(); ++d)
                    if (violated(n.children[0], t.next(x, d), {})) return true;
                return false;
            }
            case Kind::globally: {
                // Committed prefix first, then everything reachable after it.
                while (!w.empty()) {
                    if (bounded_violated(n.bounded, x, w)) return true;
                    x = t.next(x, w.front());
                    w.erase(w.begin());
                }
                return globally_violated(id, n.bounded, x);
            }
            case Kind::release: return release_violated(n, x, std::move(w));
            }
            return false;
        }

        bool globally_violated(int id, int b, std::size_t x)
        {
            if (g_memo.size() < ff.nodes_.size()) g_memo.resize(ff.nodes_.size());
            auto& memo = g_memo[static_cast<std::size_t>(id)];
            if (memo.empty()) {
                // One pass over all states decides every start state at once.
                memo.assign(t.nodes(), 0);
                std::vector<char> bad(t.nodes(), 0);
                Window empty;
                for (std::size_t s = 0; s < t.nodes(); ++s) bad[s] = bounded_violated(b, s, empty) ? 1 : 0;
                // A start state is violated iff it reaches a bad state; the
                // graph is small, so search backwards from bad states.
                std::vector<std::vector<std::size_t>> pred(t.nodes());
                for (std::size_t s = 0; s < t.nodes(); ++s)
                    for (std::size_t d = 0; d < t.directions(); ++d) pred[t.next(s, d)].push_back(s);
                std::vector<std::size_t> todo;
                for (std::size_t s = 0; s < t.nodes(); ++s)
                    if (bad[s]) {
                        memo[s] = 2;
                        todo.push_back(s);
                    }
                while (!todo.empty()) {
                    std::size_t s = todo.back();
                    todo.pop_back();
                    for (std::size_t p : pred[s])
                        if (memo[p] != 2) {
                            memo[p] = 2;
                            todo.push_back(p);
                        }
                }
            }
            return memo[x] == 2;
        }

        bool release_violated(const Node& n, std::size_t x, Window w)
        {
            // Search the (state, committed window) graph for a position where
            // the right side fails while the left side failed at every earlier one.
            std::set<std::pair<std::size_t, Window>> seen;
            std::vector<std::pair<std::size_t, Window>> todo{{x, std::move(w)}};
            seen.insert(todo.front());
            std::vector<Window> wins;
            while (!todo.empty()) {
                auto [s, win] = std::move(todo.back());
                todo.pop_back();
                if (violated(n.children[0], s, win)) return true;
                wins.clear();
                falsifying_windows(n.bounded, s, win, wins);
                for (Window& fw : wins) {
                    // B false here; step along the window's first direction.
                    if (fw.empty()) {
                        for (std::size_t d = 0; d < t.directions(); ++d) {
                            std::pair<std::size_t, Window> nx{t.next(s, d), {}};
                            if (seen.insert(nx).second) todo.push_back(std::move(nx));
                        }
                        continue;
                    }
                    std::pair<std::size_t, Window> nx{t.next(s, fw.front()), Window(fw.begin() + 1, fw.end())};
                    if (seen.insert(nx).second) todo.push_back(std::move(nx));
                }
            }
            return false;
        }
    };

    const AtomSet* atoms_;   // only during construction
    std::vector<Node> nodes_;
    std::vector<BoundedFormula> bodies_;
    int root_ = -1;
};

/// Universal satisfaction by bounded lookahead; f must lie in the fragment.
inline bool check_tree_fragment(Formula f, const TreeModel& t)
{
    check_atoms(f, t.atoms());
    return FragmentFormula(f, t.atoms()).holds_on(t);
}

// ---------------------------------------------------------------------------
// Counting

/// Checks many trees against one formula, using the automaton when the
/// tableau fits under the cap and the fragment checker otherwise.
class TreeChecker
{
public:
    TreeChecker(Formula f, const AtomSet& atoms, const TableauCap& cap = {}) : f_(f), atoms_(atoms)
    {
        check_atoms(f, atoms);
        try {
            nba_ = ltl_to_nba(make_not(f), atoms, cap);
        } catch (const CapExceeded&) {
            if (!FragmentFormula::in_fragment(f)) throw;
            fragment_ = std::make_unique<FragmentFormula>(f, atoms_);
        }
    }

    bool operator()(const TreeModel& t) const
    {
        if (nba_) return !tree_has_accepted_path(*nba_, t);
        return fragment_->holds_on(t);
    }

private:
    Formula f_;
    AtomSet atoms_;
    std::optional<BuchiAutomaton> nba_;
    std::unique_ptr<FragmentFormula> fragment_;
};

/// Number of k-tree-models of f. Refuses when the model space exceeds the budget.
inline Count count_tree_models(Formula f, std::size_t k, const AtomSet& atoms, std::uint64_t budget = 100'000'000,
                               unsigned jobs = 1)
{
    const TreeChecker check(f, atoms);
    TreeModelEnumerator probe(k, atoms, budget);
    const std::uint64_t total = probe.total();
    jobs = std::max(1U, jobs);
    if (total < 4096) jobs = 1;
    std::vector<std::uint64_t> part(jobs, 0);
    std::vector<std::exception_ptr> errors(jobs);
    auto work = [&](unsigned j) {
        try {
            const std::uint64_t lo = total / jobs * j + std::min<std::uint64_t>(j, total % jobs);
            const std::uint64_t hi = lo + total / jobs + (j < total % jobs ? 1 : 0);
            if (lo >= hi) return;
            TreeModelEnumerator e(k, atoms, budget);
            e.seek(lo);
            for (std::uint64_t i = lo; i < hi; ++i) {
                if (check(e.current())) ++part[j];
                e.advance();
            }
        } catch (...) {
            errors[j] = std::current_exception();
        }
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    Count c = 0;
    for (auto p : part) c += p;
    return c;
}

} // namespace ltlcount

#endif // LTLCOUNT_TREE_CHECK_HPP_
