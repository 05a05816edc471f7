#ifndef LTLCOUNT_REDUCE_TREE_HPP_
#define LTLCOUNT_REDUCE_TREE_HPP_

#include "ltlcount/atoms.hpp"
#include "ltlcount/counter.hpp"
#include "ltlcount/error.hpp"
#include "ltlcount/formula.hpp"
#include "ltlcount/reduce_word.hpp"
#include "ltlcount/tm.hpp"
#include "ltlcount/tree.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ltlcount
{

// Both tree reductions use binary trees over one input atom `d`: a path step
// with d is "right", without it "left".

inline constexpr const char* direction_atom = "d";

/// Leaf addressing for a complete binary tree of height `bits.size()`: the root
/// carries root_atom and each leaf spells its path in `bits`, first step first,
/// right = 1.
inline Formula addr_formula(Formula root_atom, const std::vector<Formula>& bits)
{
    const std::size_t d = bits.size();
    if (d == 0) throw Error("addressing needs at least one bit");
    const Formula right = make_atom(direction_atom);
    std::vector<Formula> parts{root_atom};
    for (std::size_t i = 0; i < d; ++i) {
        parts.push_back(make_next_n(make_implies(make_not(right), make_next_n(make_not(bits[i]), d - i)), i));
        parts.push_back(make_next_n(make_implies(right, make_next_n(bits[i], d - i)), i));
    }
    return conjunction(parts);
}

/// The next position's `level` bits hold the bitwise complement of rcd + 1
/// (taken modulo 2^h), where rcd is read at the current position.
inline Formula add_n_flip_formula(const std::vector<Formula>& level, const std::vector<Formula>& rcd)
{
    if (level.size() != rcd.size() || level.empty()) throw Error("addNflip needs two bit vectors of equal width");
    std::vector<Formula> parts;
    for (std::size_t i = 0; i < rcd.size(); ++i) {
        std::vector<Formula> lower(rcd.begin() + static_cast<std::ptrdiff_t>(i) + 1, rcd.end());
        const Formula carry = conjunction(lower);
        const Formula r = rcd[i], l = level[i];
        parts.push_back(make_implies(make_and(make_not(r), carry), make_next(make_not(l))));
        parts.push_back(make_implies(make_and(make_not(r), make_not(carry)), make_next(l)));
        parts.push_back(make_implies(make_and(r, carry), make_next(l)));
        parts.push_back(make_implies(make_and(r, make_not(carry)), make_next(make_not(l))));
    }
    return conjunction(parts);
}

/// One named conjunct of a tree reduction.
struct TreeConjunct
{
    std::string name;
    Formula formula;
    bool structural = false;   // independent of the machine's run
};

struct TreeReduction
{
    Formula formula;
    std::size_t k = 0;
    std::vector<TreeConjunct> conjuncts;
    AtomSet atoms;
};

namespace detail
{
inline Formula all_iff_at(const std::vector<Formula>& bits, std::size_t offset)
{
    std::vector<Formula> c;
    for (Formula b : bits) c.push_back(make_iff(b, make_next_n(b, offset)));
    return conjunction(c);
}

inline Formula none_of(const std::vector<Formula>& fs) { return conjunction(negated(fs)); }

/// Bits of the path to BFS node x of a complete binary tree, first step first.
inline std::vector<bool> path_bits(const TreeShape& s, std::size_t x)
{
    std::vector<bool> out;
    while (x != 0) {
        out.push_back(((x - 1) % 2) == 1);
        x = s.parent(x);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

inline std::uint64_t bits_value(const std::vector<bool>& b, std::size_t from, std::size_t count)
{
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < count; ++i) v = (v << 1) | (b[from + i] ? 1U : 0U);
    return v;
}

inline Letter value_letter(const AtomSet& atoms, const std::vector<std::string>& names, std::uint64_t v)
{
    Letter l = 0;
    for (std::size_t i = 0; i < names.size(); ++i)
        if ((v >> (names.size() - 1 - i)) & 1U) l |= Letter{1} << atoms.index_of(names[i]);
    return l;
}

inline std::size_t right_direction(const TreeModel& t)
{
    for (std::size_t e = 0; e < t.directions(); ++e)
        if (t.direction_letter(e) != 0) return e;
    throw Error("tree has no right direction");
}

inline void check_run_fits(const RunTrace& run, std::size_t configs, std::size_t cells)
{
    if (run.configs.empty()) throw Error("run has no configurations");
    if (run.configs.size() > configs)
        throw BoundTooSmall("run has " + std::to_string(run.configs.size()) + " configurations, bound is " +
                                std::to_string(configs),
                            run.steps());
    for (const auto& c : run.configs) {
        if (c.head < 0 || c.head >= static_cast<std::int64_t>(cells))
            throw SpaceBoundError("head outside the " + std::to_string(cells) + " encoded cells");
        if (!c.tape.empty() && (c.tape.begin()->first < 0 || c.tape.rbegin()->first >= static_cast<std::int64_t>(cells)))
            throw SpaceBoundError("tape content outside the " + std::to_string(cells) + " encoded cells");
    }
}
} // namespace detail

// ---------------------------------------------------------------------------
// Unary bound: upper tree of height p addresses 2^p lower trees of height p,
// one configuration of 2^p cells per lower tree.

struct TreeReductionParamsUnary
{
    std::size_t p = 0;
    std::size_t k = 0;
    std::size_t l_r = 0;   // configurations, also cells per configuration
    std::vector<std::string> states, symbols, upper_bits, lower_bits, levels;
    std::string upper = "upper", lower = "lower";
    AtomSet atoms;
};

inline TreeReductionParamsUnary tree_reduction_params_unary(const NTMachine& m, std::size_t p)
{
    if (p == 0 || p > 6) throw Error("unary tree reduction needs 1 <= p <= 6");
    TreeReductionParamsUnary r;
    r.p = p;
    r.k = 2 * p;
    r.l_r = std::size_t{1} << p;
    for (const auto& q : m.states()) r.states.push_back(state_atom(q));
    for (const auto& a : m.alphabet()) r.symbols.push_back(symbol_atom(a));
    r.upper_bits = bit_names("u", p);
    r.lower_bits = bit_names("l", p);
    for (std::size_t i = 0; i <= r.k; ++i) r.levels.push_back("lv" + std::to_string(i));
    std::vector<std::string> outs = r.states;
    for (const auto* g : {&r.symbols, &r.upper_bits, &r.lower_bits, &r.levels}) outs.insert(outs.end(), g->begin(), g->end());
    outs.push_back(r.upper);
    outs.push_back(r.lower);
    r.atoms = AtomSet::from({direction_atom}, outs);
    return r;
}

inline TreeReduction build_tree_reduction_unary(const NTMachine& m, const std::vector<std::string>& input, std::size_t p)
{
    using detail::all_iff_at;
    using detail::atoms_named;
    using detail::negated;
    using detail::none_of;
    const TreeReductionParamsUnary par = tree_reduction_params_unary(m, p);
    if (input.size() > par.l_r) throw BoundTooSmall("input is longer than a configuration", input.size());
    const std::size_t k = par.k;
    const auto Q = atoms_named(par.states), S = atoms_named(par.symbols);
    const auto U = atoms_named(par.upper_bits), Lb = atoms_named(par.lower_bits), LV = atoms_named(par.levels);
    const Formula upper = make_atom(par.upper), lower = make_atom(par.lower);
    const Formula right = make_atom(direction_atom), left = make_not(right);
    const Formula any_state = disjunction(Q);
    const Formula last_tree = delta_formula(U, par.l_r - 1);

    std::vector<Formula> nonfinal;
    std::vector<std::size_t> final_ix;
    for (std::size_t q = 0; q < Q.size(); ++q) {
        if (m.is_accepting(q))
            final_ix.push_back(q);
        else
            nonfinal.push_back(Q[q]);
    }

    std::vector<TreeConjunct> out;
    auto add = [&](std::string name, Formula f, bool structural) { out.push_back({std::move(name), f, structural}); };

    // Every level carries its own atom.
    {
        std::vector<Formula> c{LV[0]};
        for (std::size_t i = 0; i < k; ++i) c.push_back(make_globally(make_implies(LV[i], make_next(LV[i + 1]))));
        for (std::size_t i = 0; i <= k; ++i) {
            std::vector<Formula> others;
            for (std::size_t j = 0; j <= k; ++j)
                if (j != i) others.push_back(LV[j]);
            c.push_back(make_next_n(make_and(LV[i], none_of(others)), i));
        }
        add("levels", conjunction(c), true);
    }
    add("addr_upper", addr_formula(upper, U), true);
    {
        std::vector<Formula> c;
        for (std::size_t i = p; i < k; ++i) c.push_back(make_next_n(all_iff_at(U, 1), i));
        add("upper_ids", conjunction(c), true);
    }
    add("addr_lower", make_next_n(addr_formula(lower, Lb), p), true);
    add("route_left", make_next_n(make_implies(left, make_next(upper)), k), true);
    add("route_right", make_next_n(make_implies(right, make_next(lower)), k), true);

    // Atoms appear only where the layout puts them.
    {
        std::vector<Formula> c;
        for (std::size_t i = 0; i <= k; ++i) {
            std::vector<Formula> lits;
            lits.push_back(i == 0 ? upper : make_not(upper));
            lits.push_back(i == p ? lower : make_not(lower));
            if (i < p) lits.push_back(none_of(U));
            if (i < k) {
                lits.push_back(none_of(Lb));
                lits.push_back(none_of(Q));
                lits.push_back(none_of(S));
            }
            c.push_back(make_next_n(conjunction(lits), i));
        }
        add("layout", conjunction(c), true);
    }
    add("leaf_content", make_next_n(make_and(detail::exactly_one(S), detail::at_most_one(Q)), k), false);
    // No second state in the same lower tree.
    add("one_state",
        make_next_n(make_implies(conjunction({any_state, right, make_not(all_iff_at(Lb, p + 1))}),
                                 make_next_n(make_not(any_state), p + 1)),
                    k),
        false);

    {
        std::vector<Formula> c{make_implies(delta_formula(Lb, 0), Q[m.initial_index()])};
        std::vector<Formula> not_input;
        for (std::size_t j = 0; j < input.size(); ++j) {
            c.push_back(make_implies(delta_formula(Lb, j), S[m.symbol_index(input[j])]));
            not_input.push_back(make_not(delta_formula(Lb, j)));
        }
        c.push_back(make_implies(conjunction(not_input), S[m.blank_index()]));
        add("init", make_next_n(make_implies(delta_formula(U, 0), conjunction(c)), k), false);
    }
    {
        std::vector<Formula> fin;
        for (std::size_t q : final_ix) fin.push_back(Q[q]);
        add("accept", make_next_n(make_implies(make_and(last_tree, any_state), disjunction(fin)), k), false);
    }

    // Leaf 1 (the head), leaf 2 (same cell, next tree), leaf 3 (right
    // neighbour), leaf 4 (left neighbour).
    const std::size_t o2 = k + 1, o3 = k + p + 2, o4 = k + 2 * p + 3;
    const Formula to_next_tree = conjunction({left, inc_formula(U, o2), all_iff_at(Lb, o2)});
    for (std::size_t q = 0; q < Q.size(); ++q) {
        if (m.is_accepting(q)) continue;
        for (std::size_t a = 0; a < S.size(); ++a) {
            const Formula premise = conjunction({Q[q], S[a], to_next_tree, make_next_n(right, o2), inc_formula(U, o3),
                                                 inc_formula(Lb, o3), make_next_n(right, o3), inc_formula(U, o4),
                                                 dec_formula(Lb, o4)});
            std::vector<Formula> alts;
            for (std::size_t t : m.applicable(q, a)) {
                const Transition& tr = m.transitions()[t];
                alts.push_back(make_and(make_next_n(S[m.symbol_index(tr.write)], o2),
                                        make_next_n(Q[m.state_index(tr.to)], tr.dir > 0 ? o3 : o4)));
            }
            add("config_" + par.states[q] + "_" + par.symbols[a],
                make_next_n(make_implies(premise, disjunction(alts)), k), false);
        }
    }
    for (std::size_t a = 0; a < S.size(); ++a) {
        std::vector<Formula> pre = negated(nonfinal);
        pre.insert(pre.end(), {make_not(last_tree), S[a], to_next_tree});
        add("copy_" + par.symbols[a], make_next_n(make_implies(conjunction(pre), make_next_n(S[a], o2)), k), false);
    }
    {
        std::vector<Formula> keep;
        for (std::size_t q : final_ix) keep.push_back(make_implies(Q[q], make_next_n(Q[q], o2)));
        add("repeat",
            make_next_n(make_implies(make_and(make_not(last_tree), to_next_tree), conjunction(keep)), k), false);
    }

    std::vector<Formula> all;
    for (const auto& c : out) all.push_back(c.formula);
    return TreeReduction{conjunction(all), k, std::move(out), par.atoms};
}

/// The tree of an accepting run; its last configuration fills the remaining
/// lower trees.
inline TreeModel encode_run_as_tree_unary(const NTMachine& m, const RunTrace* run, const TreeReductionParamsUnary& par)
{
    if (run) detail::check_run_fits(*run, par.l_r, par.l_r);
    const AtomSet& A = par.atoms;
    TreeModel t(par.k, A);
    const TreeShape& s = t.shape();
    const std::size_t p = par.p;
    for (std::size_t x = 0; x < t.nodes(); ++x) {
        const std::size_t depth = s.depth(x);
        const auto path = detail::path_bits(s, x);
        Letter l = A.letter({par.levels[depth]});
        if (depth == 0) l |= A.letter({par.upper});
        if (depth == p) l |= A.letter({par.lower});
        if (depth >= p) l |= detail::value_letter(A, par.upper_bits, detail::bits_value(path, 0, p));
        if (depth == par.k) {
            const std::uint64_t tree = detail::bits_value(path, 0, p), cell = detail::bits_value(path, p, p);
            l |= detail::value_letter(A, par.lower_bits, cell);
            if (run) {
                const NTMConfig& c = run->configs[std::min<std::size_t>(tree, run->configs.size() - 1)];
                l |= A.letter({par.symbols[c.read(static_cast<std::int64_t>(cell), m.blank_index())]});
                if (c.head == static_cast<std::int64_t>(cell)) l |= A.letter({par.states[c.state]});
            }
        }
        t.set_label(x, l);
    }
    const std::size_t right = detail::right_direction(t);
    for (std::size_t leaf = 0; leaf < s.leaves(); ++leaf)
        for (std::size_t e = 0; e < t.directions(); ++e) t.set_backedge(leaf, e, e == right ? p : 0);
    return t;
}

inline TreeModel encode_run_as_tree_unary(const NTMachine& m, const RunTrace& run, const TreeReductionParamsUnary& par)
{
    return encode_run_as_tree_unary(m, &run, par);
}

inline TreeModel content_free_tree_unary(const NTMachine& m, const TreeReductionParamsUnary& par)
{
    return encode_run_as_tree_unary(m, nullptr, par);
}

// ---------------------------------------------------------------------------
// Binary bound: inner trees of height m are arranged as a complete binary tree
// of 2^L - 1 inner trees (L = 2^{p'}), visited in depth-first order, one
// configuration per inner tree. The two outermost leaves of an inner tree are
// the roots of its children, the 2^m - 2 others are cells. The host tree is
// complete, so cells of inner trees above the last level carry pads down to
// depth k whose leaves lead back to the inner tree's root.

struct TreeReductionParamsBinary
{
    std::size_t p = 0, p_prime = 0;
    std::size_t m = 0;        // inner-tree height, smallest power of two above p
    std::size_t levels = 0;   // L = 2^{p'}
    std::size_t h = 0;        // bits of a level
    std::size_t k = 0;        // m * L
    std::size_t cells = 0;    // 2^m - 2
    std::size_t configs = 0;  // 2^L - 1
    std::vector<std::string> states, symbols, ids, depth_bits, level_bits, rcd_bits;
    std::string root = "root", cell = "cell", pad = "pad";
    AtomSet atoms;

    /// Pad height under the cells of a level.
    std::size_t pad_height(std::size_t level) const { return (levels - 1 - level) * m; }
    bool is_last_level(std::size_t level) const { return level + 1 == levels; }
    /// Steps from a cell back to its inner tree's root.
    std::size_t to_root(std::size_t level) const { return is_last_level(level) ? 1 : pad_height(level) + 1; }
    /// Level of the inner tree after the given one in depth-first order.
    std::size_t next_level(std::size_t level, std::size_t rcd) const
    {
        return is_last_level(level) ? levels - 1 - rcd : level + 1;
    }
};

inline TreeReductionParamsBinary tree_reduction_params_binary(const NTMachine& mach, std::size_t p, std::size_t p_prime)
{
    if (p == 0 || p > 7) throw Error("binary tree reduction needs 1 <= p <= 7");
    if (p_prime == 0 || p_prime > 2) throw Error("binary tree reduction needs 1 <= p' <= 2");
    TreeReductionParamsBinary r;
    r.p = p;
    r.p_prime = p_prime;
    r.m = 1;
    while (r.m <= p) r.m *= 2;
    r.h = p_prime;
    r.levels = std::size_t{1} << p_prime;
    r.k = r.m * r.levels;
    if (r.k > 16) throw Error("binary tree reduction: k = " + std::to_string(r.k) + " is too large to materialise");
    r.cells = (std::size_t{1} << r.m) - 2;
    r.configs = (std::size_t{1} << r.levels) - 1;
    for (const auto& q : mach.states()) r.states.push_back(state_atom(q));
    for (const auto& a : mach.alphabet()) r.symbols.push_back(symbol_atom(a));
    r.ids = bit_names("i", r.m);
    r.depth_bits = bit_names("dp", ceil_log2(r.m));
    r.level_bits = bit_names("lv", r.h);
    r.rcd_bits = bit_names("rc", r.h);
    std::vector<std::string> outs = r.states;
    for (const auto* g : {&r.symbols, &r.ids, &r.depth_bits, &r.level_bits, &r.rcd_bits})
        outs.insert(outs.end(), g->begin(), g->end());
    outs.insert(outs.end(), {r.root, r.cell, r.pad});
    r.atoms = AtomSet::from({direction_atom}, outs);
    return r;
}

inline TreeReduction build_tree_reduction_binary(const NTMachine& mach, const std::vector<std::string>& input,
                                                 std::size_t p, std::size_t p_prime)
{
    using detail::all_iff_at;
    using detail::atoms_named;
    using detail::negated;
    using detail::none_of;
    const TreeReductionParamsBinary par = tree_reduction_params_binary(mach, p, p_prime);
    if (input.size() > par.cells) throw BoundTooSmall("input is longer than a configuration", input.size());
    const std::size_t m = par.m, L = par.levels, top_level = L - 1;
    const auto Q = atoms_named(par.states), S = atoms_named(par.symbols);
    const auto I = atoms_named(par.ids), DP = atoms_named(par.depth_bits);
    const auto LV = atoms_named(par.level_bits), RC = atoms_named(par.rcd_bits);
    const Formula root = make_atom(par.root), cell = make_atom(par.cell), pad = make_atom(par.pad);
    const Formula right = make_atom(direction_atom), left = make_not(right);
    const Formula any_state = disjunction(Q);
    const Formula no_content = make_and(none_of(Q), none_of(S));
    const std::uint64_t last_id = (std::uint64_t{1} << m) - 1;

    auto steps = [](Formula dir, std::size_t from, std::size_t n) {
        std::vector<Formula> c;
        for (std::size_t i = 0; i < n; ++i) c.push_back(make_next_n(dir, from + i));
        return conjunction(c);
    };
    const Formula all_left = steps(left, 0, m), all_right = steps(right, 0, m);
    // Inner tree of a level, and of a right-child depth on the last level.
    auto tree_guard = [&](std::size_t level, std::size_t rcd) {
        Formula g = delta_formula(LV, level);
        return par.is_last_level(level) ? make_and(g, delta_formula(RC, rcd)) : g;
    };
    auto rcd_range = [&](std::size_t level) { return par.is_last_level(level) ? L - 1 : std::size_t{1}; };

    std::vector<TreeConjunct> out;
    auto add = [&](std::string name, Formula f, bool structural) { out.push_back({std::move(name), f, structural}); };

    add("root_label",
        conjunction({root, make_not(cell), make_not(pad), delta_formula(LV, 0), delta_formula(RC, 0),
                     delta_formula(I, 0)}),
        true);
    {
        // Roots and the inner nodes below them.
        std::vector<Formula> c{delta_formula(DP, 0), make_not(cell), make_not(pad), no_content};
        for (std::size_t i = 1; i < m; ++i)
            c.push_back(make_and(make_and(all_iff_at(LV, i), all_iff_at(RC, i)),
                                 make_next_n(conjunction({make_not(root), make_not(cell), make_not(pad),
                                                          delta_formula(DP, i), delta_formula(I, 0), no_content}),
                                             i)));
        add("depth", make_globally(make_implies(root, conjunction(c))), true);
    }
    add("addr", make_globally(make_implies(root, addr_formula(root, I))), true);
    {
        const Formula leaf_common = make_next_n(make_and(make_not(pad), delta_formula(DP, 0)), m);
        const Formula as_cell = make_and(make_and(all_iff_at(LV, m), all_iff_at(RC, m)),
                                         make_next_n(make_and(cell, make_not(root)), m));
        const Formula child_root = make_next_n(conjunction({root, make_not(cell), make_not(pad)}), m);
        const Formula inner = make_not(delta_formula(LV, top_level));
        add("children",
            make_globally(make_implies(
                make_and(root, inner),
                conjunction({leaf_common,
                             make_implies(all_left, conjunction({child_root, inc_formula(LV, m),
                                                                 make_next_n(delta_formula(RC, 0), m)})),
                             make_implies(all_right, conjunction({child_root, inc_formula(LV, m), inc_formula(RC, m)})),
                             make_implies(make_and(make_not(all_left), make_not(all_right)), as_cell)}))),
            true);
        const Formula outer_leaf = conjunction({make_and(all_iff_at(LV, m), all_iff_at(RC, m)),
                                                make_next_n(conjunction({make_not(root), make_not(cell), no_content}), m)});
        add("last_level_leaves",
            make_globally(make_implies(
                make_and(root, delta_formula(LV, top_level)),
                conjunction({leaf_common, make_implies(make_or(all_left, all_right), outer_leaf),
                             make_implies(make_and(make_not(all_left), make_not(all_right)), as_cell)}))),
            true);
    }
    {
        // Last-level leaves: right returns to the own root, left jumps to the
        // parent of the next inner tree.
        const Formula back = conjunction(
            {make_implies(right, make_next(make_and(root, delta_formula(LV, top_level)))),
             make_implies(left, make_and(make_next(root), add_n_flip_formula(LV, RC)))});
        add("dfs", make_globally(make_implies(make_and(root, delta_formula(LV, top_level)), make_next_n(back, m))),
            true);
    }
    for (std::size_t level = 0; level < top_level; ++level) {
        const std::size_t ph = par.pad_height(level);
        std::vector<Formula> c;
        const Formula blank_pad = conjunction({pad, make_not(root), make_not(cell), none_of(I), none_of(DP), none_of(LV),
                                               none_of(RC), no_content});
        for (std::size_t i = 1; i <= ph; ++i) c.push_back(make_next_n(blank_pad, i));
        c.push_back(make_next_n(make_and(root, delta_formula(LV, level)), ph + 1));
        add("pad_" + std::to_string(level),
            make_globally(make_implies(make_and(cell, delta_formula(LV, level)), conjunction(c))), true);
    }
    add("cell_content",
        make_globally(make_implies(cell, make_and(detail::exactly_one(S), detail::at_most_one(Q)))), false);

    for (std::size_t level = 0; level < L; ++level) {
        const std::size_t s = par.to_root(level);
        const Formula back = par.is_last_level(level) ? right : make_true();
        add("one_state_" + std::to_string(level),
            make_globally(make_implies(
                conjunction({cell, delta_formula(LV, level), any_state, back, make_not(all_iff_at(I, s + m))}),
                make_next_n(make_not(any_state), s + m))),
            false);
    }
    {
        std::vector<Formula> c{make_implies(delta_formula(I, 1), Q[mach.initial_index()])};
        std::vector<Formula> not_input;
        for (std::size_t j = 0; j < input.size(); ++j) {
            c.push_back(make_implies(delta_formula(I, j + 1), S[mach.symbol_index(input[j])]));
            not_input.push_back(make_not(delta_formula(I, j + 1)));
        }
        c.push_back(make_implies(conjunction(not_input), S[mach.blank_index()]));
        add("init", make_next_n(make_implies(cell, conjunction(c)), m), false);
    }
    {
        std::vector<Formula> fin;
        for (std::size_t q = 0; q < Q.size(); ++q)
            if (mach.is_accepting(q)) fin.push_back(Q[q]);
        add("accept",
            make_implies(steps(right, 0, top_level * m), make_next_n(make_implies(any_state, disjunction(fin)), par.k)),
            false);
    }

    // Content of consecutive inner trees. From a cell, `to_next` reaches the
    // cell with the same id in the next inner tree at offset B; from there
    // the cells with id + 1 and id - 1 are reached through that tree's root.
    for (std::size_t level = 0; level < L; ++level)
        for (std::size_t rcd = 0; rcd < rcd_range(level); ++rcd) {
            const std::size_t s = par.to_root(level), nl = par.next_level(level, rcd);
            const std::size_t s2 = par.to_root(nl), B = s + 2 * m;
            const Formula to_next_root =
                par.is_last_level(level) ? make_and(left, steps(right, 1, m)) : steps(left, s, m);
            const Formula back2 = par.is_last_level(nl) ? right : make_true();
            const Formula to_next = conjunction({cell, tree_guard(level, rcd), to_next_root,
                                                 make_next_n(cell, B), all_iff_at(I, B)});
            const std::string tag = "_" + std::to_string(level) + (par.is_last_level(level) ? "_" + std::to_string(rcd) : "");
            // Neighbour at `to` whose id is the current one plus `dir`.
            auto neighbour = [&](std::size_t from, std::size_t to, int dir) {
                return conjunction({make_next_n(back2, from), make_next_n(cell, to),
                                    dir > 0 ? inc_formula(I, to) : dec_formula(I, to)});
            };
            for (std::size_t q = 0; q < Q.size(); ++q) {
                if (mach.is_accepting(q)) continue;
                for (std::size_t a = 0; a < S.size(); ++a) {
                    // Interior cells, the first cell (no left neighbour), the last cell (no right neighbour).
                    struct Case
                    {
                        Formula id_guard;
                        std::size_t plus, minus;   // 0 = move not available
                    };
                    const std::size_t C = B + s2 + m;
                    const std::vector<Case> cases{
                        {make_and(make_not(delta_formula(I, 1)), make_not(delta_formula(I, last_id - 1))), C, C + s2 + m},
                        {delta_formula(I, 1), C, 0},
                        {delta_formula(I, last_id - 1), 0, C}};
                    std::vector<Formula> parts;
                    for (const Case& cs : cases) {
                        std::vector<Formula> pre{Q[q], S[a], to_next, cs.id_guard};
                        if (cs.plus) pre.push_back(neighbour(B, cs.plus, 1));
                        if (cs.minus) pre.push_back(neighbour(cs.plus ? cs.plus : B, cs.minus, -1));
                        std::vector<Formula> alts;
                        for (std::size_t t : mach.applicable(q, a)) {
                            const Transition& tr = mach.transitions()[t];
                            const std::size_t at = tr.dir > 0 ? cs.plus : cs.minus;
                            if (at == 0) continue;
                            alts.push_back(make_and(make_next_n(S[mach.symbol_index(tr.write)], B),
                                                    make_next_n(Q[mach.state_index(tr.to)], at)));
                        }
                        parts.push_back(make_implies(conjunction(pre), disjunction(alts)));
                    }
                    add("config_" + par.states[q] + "_" + par.symbols[a] + tag, make_globally(conjunction(parts)),
                        false);
                }
            }
            std::vector<Formula> nonfinal;
            std::vector<Formula> keep;
            for (std::size_t q = 0; q < Q.size(); ++q) {
                if (mach.is_accepting(q))
                    keep.push_back(make_implies(Q[q], make_next_n(Q[q], B)));
                else
                    nonfinal.push_back(Q[q]);
            }
            std::vector<Formula> copies;
            for (std::size_t a = 0; a < S.size(); ++a)
                copies.push_back(make_implies(S[a], make_next_n(S[a], B)));
            add("copy" + tag,
                make_globally(make_implies(make_and(to_next, none_of(nonfinal)), conjunction(copies))), false);
            add("repeat" + tag, make_globally(make_implies(to_next, conjunction(keep))), false);
        }

    std::vector<Formula> all;
    for (const auto& c : out) all.push_back(c.formula);
    return TreeReduction{conjunction(all), par.k, std::move(out), par.atoms};
}

namespace detail
{
/// Where a node of the binary-reduction host tree sits.
struct BinaryPlace
{
    enum Kind { inner, cell, outer_leaf, pad } kind = inner;
    std::size_t level = 0, rcd = 0;
    std::size_t rel_depth = 0;   // within the inner tree, for inner nodes
    std::uint64_t id = 0;        // leaf id within the parent inner tree (roots, cells, outer leaves)
    std::size_t order = 0;       // depth-first index of the inner tree
};

inline BinaryPlace binary_place(const TreeReductionParamsBinary& par, const std::vector<bool>& path)
{
    BinaryPlace pl;
    const std::size_t m = par.m;
    std::size_t at = 0;
    for (;;) {
        const std::size_t rest = path.size() - at;
        if (rest < m) {
            pl.kind = BinaryPlace::inner;
            pl.rel_depth = rest;
            if (rest != 0) pl.id = 0;
            return pl;
        }
        const std::uint64_t id = bits_value(path, at, m);
        const bool outer = id == 0 || id == (std::uint64_t{1} << m) - 1;
        if (!outer) {
            pl.kind = rest == m ? BinaryPlace::cell : BinaryPlace::pad;
            pl.id = id;
            return pl;
        }
        if (par.is_last_level(pl.level)) {
            pl.kind = BinaryPlace::outer_leaf;
            pl.id = id;
            return pl;
        }
        // Descend into a child inner tree.
        const std::size_t below = (std::size_t{1} << (par.levels - 1 - pl.level)) - 1;   // trees under each child
        if (id == 0) {
            pl.order += 1;
            pl.rcd = 0;
        } else {
            pl.order += 1 + below;
            pl.rcd += 1;
        }
        pl.level += 1;
        pl.id = id;
        at += m;
    }
}
} // namespace detail

/// The host tree of an accepting run (or, without a run, its content-free
/// skeleton). The last configuration fills the remaining inner trees.
inline TreeModel encode_run_as_tree_binary(const NTMachine& mach, const RunTrace* run,
                                           const TreeReductionParamsBinary& par)
{
    if (run) detail::check_run_fits(*run, par.configs, par.cells);
    const AtomSet& A = par.atoms;
    TreeModel t(par.k, A);
    const TreeShape& sh = t.shape();
    using detail::BinaryPlace;
    for (std::size_t x = 0; x < t.nodes(); ++x) {
        const auto pl = detail::binary_place(par, detail::path_bits(sh, x));
        Letter l = 0;
        if (pl.kind != BinaryPlace::pad) {
            l |= detail::value_letter(A, par.level_bits, pl.level) | detail::value_letter(A, par.rcd_bits, pl.rcd);
            l |= detail::value_letter(A, par.ids, pl.id);
        }
        switch (pl.kind) {
        case BinaryPlace::inner:
            if (pl.rel_depth == 0) l |= A.letter({par.root});
            l |= detail::value_letter(A, par.depth_bits, pl.rel_depth);
            break;
        case BinaryPlace::pad: l = A.letter({par.pad}); break;
        case BinaryPlace::outer_leaf: break;
        case BinaryPlace::cell:
            l |= A.letter({par.cell});
            if (run) {
                const NTMConfig& c = run->configs[std::min(pl.order, run->configs.size() - 1)];
                const auto j = static_cast<std::int64_t>(pl.id - 1);
                l |= A.letter({par.symbols[c.read(j, mach.blank_index())]});
                if (c.head == j) l |= A.letter({par.states[c.state]});
            }
            break;
        }
        t.set_label(x, l);
    }
    const std::size_t right = detail::right_direction(t);
    for (std::size_t leaf = 0; leaf < sh.leaves(); ++leaf) {
        const auto pl = detail::binary_place(par, detail::path_bits(sh, sh.first_leaf() + leaf));
        for (std::size_t e = 0; e < t.directions(); ++e) {
            std::size_t level = pl.level;
            if (pl.kind != BinaryPlace::pad && e != right) {
                const std::size_t L = par.levels;
                level = L - 1 - (pl.rcd + 1) % L;
            }
            t.set_backedge(leaf, e, level * par.m);
        }
    }
    return t;
}

inline TreeModel encode_run_as_tree_binary(const NTMachine& mach, const RunTrace& run,
                                           const TreeReductionParamsBinary& par)
{
    return encode_run_as_tree_binary(mach, &run, par);
}

/// Structure of the binary host tree with every cell left empty.
inline TreeModel content_free_tree_binary(const NTMachine& mach, const TreeReductionParamsBinary& par)
{
    return encode_run_as_tree_binary(mach, nullptr, par);
}

/// Emission record of a tree reduction: k, atoms by role, conjunct names and
/// the content-free host tree.
inline nlohmann::json tree_manifest(const TreeReduction& r, const TreeModel& skeleton,
                                    const std::vector<std::string>& states, const std::vector<std::string>& symbols)
{
    nlohmann::json j;
    j["k"] = r.k;
    j["ap_inputs"] = r.atoms.names(AtomKind::input);
    j["ap_outputs"] = r.atoms.names(AtomKind::output);
    std::vector<std::string> structure;
    for (const auto& a : r.atoms.names(AtomKind::output))
        if (std::find(states.begin(), states.end(), a) == states.end() &&
            std::find(symbols.begin(), symbols.end(), a) == symbols.end())
            structure.push_back(a);
    j["atom_roles"] = {{"states", states}, {"symbols", symbols}, {"structure", structure}};
    nlohmann::json names = nlohmann::json::array();
    for (const auto& c : r.conjuncts) names.push_back({{"name", c.name}, {"structural", c.structural}});
    j["conjuncts"] = names;
    j["skeleton"] = tree_to_json(skeleton);
    return j;
}

} // namespace ltlcount

#endif // LTLCOUNT_REDUCE_TREE_HPP_
