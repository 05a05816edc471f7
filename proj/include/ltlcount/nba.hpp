#ifndef LTLCOUNT_NBA_HPP_
#define LTLCOUNT_NBA_HPP_

#include "ltlcount/atoms.hpp"
#include "ltlcount/error.hpp"
#include "ltlcount/formula.hpp"
#include "ltlcount/word.hpp"

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ltlcount
{

/// Limits for the tableau construction.
struct TableauCap
{
    std::size_t max_elementary = 20;   // atoms, next-, until- and release-subformulas
    std::size_t max_closure = 64;
    std::size_t max_states = 200'000;
};

/// State-labelled Büchi automaton: state q reads letter a iff
/// (a & care) == value. Transitions do not depend on the letter.
struct BuchiAutomaton
{
    struct State
    {
        Letter care = 0;
        Letter value = 0;
        bool accepting = false;
        std::vector<std::uint32_t> succ;
    };

    std::vector<State> states;
    std::vector<std::uint32_t> initial;

    bool reads(std::uint32_t q, Letter a) const noexcept
    {
        return (a & states[q].care) == states[q].value;
    }
};

namespace detail
{

/// Nested depth-first search for a reachable accepting cycle in an implicit
/// graph. `succ(node, out)` fills the successors of a node.
template <typename Succ, typename Accepting>
bool has_accepting_cycle(const std::vector<std::uint64_t>& initial, Succ&& succ, Accepting&& accepting)
{
    std::unordered_set<std::uint64_t> blue, red;
    struct Frame
    {
        std::uint64_t node;
        std::vector<std::uint64_t> next;
        std::size_t i;
    };
    std::vector<Frame> stack;
    std::vector<std::uint64_t> buf;

    auto red_search = [&](std::uint64_t seed) {
        std::vector<std::uint64_t> todo{seed};
        std::vector<std::uint64_t> out;
        while (!todo.empty()) {
            std::uint64_t x = todo.back();
            todo.pop_back();
            out.clear();
            succ(x, out);
            for (std::uint64_t y : out) {
                if (y == seed) return true;
                if (red.insert(y).second) todo.push_back(y);
            }
        }
        return false;
    };

    for (std::uint64_t s0 : initial) {
        if (!blue.insert(s0).second) continue;
        buf.clear();
        succ(s0, buf);
        stack.push_back({s0, buf, 0});
        while (!stack.empty()) {
            Frame& fr = stack.back();
            if (fr.i < fr.next.size()) {
                std::uint64_t y = fr.next[fr.i++];
                if (blue.insert(y).second) {
                    buf.clear();
                    succ(y, buf);
                    stack.push_back({y, buf, 0});
                }
                continue;
            }
            const std::uint64_t x = fr.node;
            stack.pop_back();
            if (accepting(x) && red_search(x)) return true;
        }
    }
    return false;
}

} // namespace detail

/// Tableau automaton for f: states are consistent truth assignments to the
/// elementary subformulas of the negation normal form, degeneralized with a
/// counter over the until-subformulas. Only reachable states are built.
inline BuchiAutomaton ltl_to_nba(Formula f, const AtomSet& atoms, const TableauCap& cap = {})
{
    const Formula g = negation_normal_form(f);
    const std::vector<Formula> cl = closure(g);
    if (cl.size() > cap.max_closure)
        throw CapExceeded("closure of " + std::to_string(cl.size()) + " subformulas exceeds the tableau cap");
    std::unordered_map<std::uint64_t, std::size_t> pos;
    for (std::size_t i = 0; i < cl.size(); ++i) pos.emplace(cl[i].id(), i);
    auto idx = [&](Formula h) { return pos.at(h.id()); };

    // Elementary formulas get one bit each in a state mask.
    std::vector<std::size_t> elem_bit(cl.size(), SIZE_MAX);
    std::vector<std::size_t> elementary;
    std::vector<std::size_t> untils;
    for (std::size_t i = 0; i < cl.size(); ++i) {
        const Op op = cl[i].op();
        if (op == Op::atom || op == Op::next || op == Op::until || op == Op::release) {
            elem_bit[i] = elementary.size();
            elementary.push_back(i);
        }
        if (op == Op::until) untils.push_back(i);
    }
    if (elementary.size() > cap.max_elementary)
        throw CapExceeded(std::to_string(elementary.size()) + " elementary subformulas exceed the tableau cap");

    // Obligations passed to the successor: the operand of each next and every
    // until/release whose local rule leaves its value to the successor.
    std::vector<std::size_t> need;
    std::vector<std::size_t> need_bit(cl.size(), SIZE_MAX);
    for (std::size_t i = 0; i < cl.size(); ++i) {
        const Op op = cl[i].op();
        std::size_t t = SIZE_MAX;
        if (op == Op::next) t = idx(cl[i].child());
        if (t != SIZE_MAX && need_bit[t] == SIZE_MAX) {
            need_bit[t] = need.size();
            need.push_back(t);
        }
        if ((op == Op::until || op == Op::release) && need_bit[i] == SIZE_MAX) {
            need_bit[i] = need.size();
            need.push_back(i);
        }
    }

    struct Proto
    {
        Letter care = 0, value = 0;
        std::uint64_t provides = 0;   // values of `need` formulas in this state
        std::uint64_t req_mask = 0, req_value = 0;
        std::uint64_t fulfils = 0;    // bit u set iff state is in the acceptance set of until u
        bool initial = false;
    };
    std::vector<Proto> protos;
    std::vector<char> v(cl.size());
    const std::uint64_t n_masks = std::uint64_t{1} << elementary.size();
    for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
        bool ok = true;
        for (std::size_t i = 0; i < cl.size() && ok; ++i) {
            const Formula h = cl[i];
            const std::size_t b = elem_bit[i];
            switch (h.op()) {
            case Op::tt: v[i] = 1; break;
            case Op::ff: v[i] = 0; break;
            case Op::neg: v[i] = !v[idx(h.child())]; break;
            case Op::conj: v[i] = v[idx(h.lhs())] && v[idx(h.rhs())]; break;
            case Op::disj: v[i] = v[idx(h.lhs())] || v[idx(h.rhs())]; break;
            case Op::atom:
            case Op::next: v[i] = static_cast<char>((mask >> b) & 1U); break;
            case Op::until: {
                v[i] = static_cast<char>((mask >> b) & 1U);
                const bool a = v[idx(h.lhs())], c = v[idx(h.rhs())];
                if (c && !v[i]) ok = false;
                if (!a && !c && v[i]) ok = false;
                break;
            }
            case Op::release: {
                v[i] = static_cast<char>((mask >> b) & 1U);
                const bool a = v[idx(h.lhs())], c = v[idx(h.rhs())];
                if (!c && v[i]) ok = false;
                if (a && c && !v[i]) ok = false;
                break;
            }
            default: throw Error("unexpected operator after normalization");
            }
        }
        if (!ok) continue;
        Proto p;
        for (std::size_t i = 0; i < cl.size(); ++i) {
            const Formula h = cl[i];
            if (h.op() == Op::atom) {
                const Letter bit = Letter{1} << atoms.index_of(h.atom_name());
                p.care |= bit;
                if (v[i]) p.value |= bit;
            }
            if (need_bit[i] != SIZE_MAX && v[i]) p.provides |= std::uint64_t{1} << need_bit[i];
            if (h.op() == Op::next) {
                const std::uint64_t nb = std::uint64_t{1} << need_bit[idx(h.child())];
                p.req_mask |= nb;
                if (v[i]) p.req_value |= nb;
            }
            const bool free_until = h.op() == Op::until && v[idx(h.lhs())] && !v[idx(h.rhs())];
            const bool free_release = h.op() == Op::release && v[idx(h.rhs())] && !v[idx(h.lhs())];
            if (free_until || free_release) {
                const std::uint64_t nb = std::uint64_t{1} << need_bit[i];
                p.req_mask |= nb;
                if (v[i]) p.req_value |= nb;
            }
        }
        for (std::size_t u = 0; u < untils.size(); ++u) {
            const Formula h = cl[untils[u]];
            if (!v[untils[u]] || v[idx(h.rhs())]) p.fulfils |= std::uint64_t{1} << u;
        }
        p.initial = v.back() != 0;
        protos.push_back(p);
    }

    // Degeneralize: product with a counter over the until-formulas.
    const std::size_t n_acc = untils.size();
    const std::size_t copies = n_acc == 0 ? 1 : n_acc;
    BuchiAutomaton out;
    std::unordered_map<std::uint64_t, std::uint32_t> ids;
    std::deque<std::uint64_t> work;
    auto key = [&](std::size_t proto, std::size_t c) { return static_cast<std::uint64_t>(proto) * copies + c; };
    auto in_acc = [&](std::size_t proto, std::size_t c) {
        return n_acc == 0 || ((protos[proto].fulfils >> c) & 1U) != 0;
    };
    auto intern = [&](std::uint64_t kx) {
        auto [it, fresh] = ids.emplace(kx, static_cast<std::uint32_t>(out.states.size()));
        if (fresh) {
            if (out.states.size() >= cap.max_states)
                throw CapExceeded("automaton exceeds " + std::to_string(cap.max_states) + " states");
            const std::size_t proto = kx / copies, c = kx % copies;
            BuchiAutomaton::State s;
            s.care = protos[proto].care;
            s.value = protos[proto].value;
            s.accepting = c == 0 && in_acc(proto, 0);
            out.states.push_back(s);
            work.push_back(kx);
        }
        return it->second;
    };
    for (std::size_t i = 0; i < protos.size(); ++i)
        if (protos[i].initial) out.initial.push_back(intern(key(i, 0)));
    while (!work.empty()) {
        const std::uint64_t kx = work.front();
        work.pop_front();
        const std::size_t proto = kx / copies, c = kx % copies;
        const std::size_t c2 = in_acc(proto, c) ? (c + 1) % copies : c;
        const Proto& p = protos[proto];
        std::vector<std::uint32_t> succ;
        for (std::size_t j = 0; j < protos.size(); ++j)
            if ((protos[j].provides & p.req_mask) == p.req_value) succ.push_back(intern(key(j, c2)));
        out.states[ids.at(kx)].succ = std::move(succ);
    }
    return out;
}

/// Whether the automaton accepts the lasso u.v^omega.
inline bool nba_accepts(const BuchiAutomaton& a, const UltimatelyPeriodicWord& w)
{
    const std::uint64_t n = a.states.size();
    std::vector<std::uint64_t> init;
    for (std::uint32_t q : a.initial)
        if (a.reads(q, w.at(0))) init.push_back(static_cast<std::uint64_t>(q));
    auto succ = [&](std::uint64_t node, std::vector<std::uint64_t>& out) {
        const std::uint64_t q = node % n, j = node / n;
        const std::size_t nj = w.succ(static_cast<std::size_t>(j));
        for (std::uint32_t q2 : a.states[q].succ)
            if (a.reads(q2, w.at(nj))) out.push_back(nj * n + q2);
    };
    auto accepting = [&](std::uint64_t node) { return a.states[node % n].accepting; };
    return detail::has_accepting_cycle(init, succ, accepting);
}

/// u.v^omega |= f decided by automaton membership.
inline bool eval_nba(Formula f, const UltimatelyPeriodicWord& w, const AtomSet& atoms, const TableauCap& cap = {})
{
    check_letters(w, atoms);
    check_atoms(f, atoms);
    return nba_accepts(ltl_to_nba(f, atoms, cap), w);
}

} // namespace ltlcount

#endif // LTLCOUNT_NBA_HPP_
