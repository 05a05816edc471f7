#ifndef LTLCOUNT_REDUCE_WORD_HPP_
#define LTLCOUNT_REDUCE_WORD_HPP_

#include "ltlcount/atoms.hpp"
#include "ltlcount/counter.hpp"
#include "ltlcount/error.hpp"
#include "ltlcount/formula.hpp"
#include "ltlcount/tm.hpp"
#include "ltlcount/word.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ltlcount
{

// Word layout: l_r blocks of d = l_r + 3 letters, "$ id # c_1 .. c_lr", then a
// single bot letter that forms the period. Block i carries id i in binary; the
// last block has id l_r - 1.

inline std::string state_atom(const std::string& q) { return "st_" + q; }
inline std::string symbol_atom(const std::string& a) { return "sym_" + a; }

struct WordReductionParams
{
    std::size_t l_r = 0;
    std::size_t l_c = 0;
    std::size_t d = 0;
    std::size_t k = 0;
    std::vector<std::string> states;    // mangled, machine order
    std::vector<std::string> symbols;   // mangled, machine order
    std::vector<std::string> bits;      // b_1 (most significant) first
    std::string dollar = "sep_dollar";
    std::string hash = "sep_hash";
    std::string bot = "bot";
    AtomSet atoms;

    std::size_t block_start(std::size_t i) const { return i * d; }
    std::size_t cell_pos(std::size_t i, std::size_t j) const { return i * d + 3 + j; }
    std::uint64_t max_id() const { return l_r - 1; }
};

struct WordReduction
{
    Formula formula;
    std::size_t k = 0;
    WordReductionParams params;
};

inline WordReductionParams word_reduction_params(const NTMachine& m, std::size_t l_r,
                                                 std::optional<std::size_t> l_c = std::nullopt)
{
    if (l_r == 0) throw Error("run-length bound must be positive");
    WordReductionParams p;
    p.l_r = l_r;
    const std::size_t need = std::max<std::size_t>(1, ceil_log2(l_r));
    p.l_c = l_c.value_or(need);
    if (p.l_c < need) throw Error("counter width " + std::to_string(p.l_c) + " cannot hold " + std::to_string(l_r) + " ids");
    p.d = l_r + 3;
    p.k = l_r * (l_r + 3) + 1;
    for (const auto& q : m.states()) p.states.push_back(state_atom(q));
    for (const auto& a : m.alphabet()) p.symbols.push_back(symbol_atom(a));
    p.bits = bit_names("bit_", p.l_c);
    std::vector<std::string> all = p.states;
    all.insert(all.end(), p.symbols.begin(), p.symbols.end());
    all.insert(all.end(), p.bits.begin(), p.bits.end());
    all.insert(all.end(), {p.dollar, p.hash, p.bot});
    p.atoms = AtomSet::outputs(all);
    return p;
}

namespace detail
{
inline std::vector<Formula> atoms_named(const std::vector<std::string>& names)
{
    std::vector<Formula> out;
    for (const auto& n : names) out.push_back(make_atom(n));
    return out;
}

inline std::vector<Formula> negated(const std::vector<Formula>& fs)
{
    std::vector<Formula> out;
    for (Formula f : fs) out.push_back(make_not(f));
    return out;
}

/// Exactly one of fs holds.
inline Formula exactly_one(const std::vector<Formula>& fs)
{
    std::vector<Formula> alts;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        std::vector<Formula> c{fs[i]};
        for (std::size_t j = 0; j < fs.size(); ++j)
            if (j != i) c.push_back(make_not(fs[j]));
        alts.push_back(conjunction(c));
    }
    return disjunction(alts);
}

inline Formula at_most_one(const std::vector<Formula>& fs)
{
    std::vector<Formula> c;
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = i + 1; j < fs.size(); ++j) c.push_back(make_not(make_and(fs[i], fs[j])));
    return conjunction(c);
}
} // namespace detail

/// phi_M^w and k for the run-length bound l_r. A wider counter can be asked for
/// through l_c; the default is the smallest width holding ids 0..l_r-1.
inline WordReduction build_word_reduction(const NTMachine& m, const std::vector<std::string>& input, std::size_t l_r,
                                          std::optional<std::size_t> l_c = std::nullopt)
{
    using detail::atoms_named;
    using detail::negated;
    if (input.size() > l_r) throw BoundTooSmall("input is longer than the run-length bound", input.size());
    WordReductionParams p = word_reduction_params(m, l_r, l_c);
    const std::size_t d = p.d;

    const auto Q = atoms_named(p.states);
    const auto S = atoms_named(p.symbols);
    const auto B = atoms_named(p.bits);
    const Formula dollar = make_atom(p.dollar), hash = make_atom(p.hash), bot = make_atom(p.bot);
    const Formula is_max = delta_formula(B, p.max_id());
    const Formula not_max = make_not(is_max);
    const Formula open_block = make_and(dollar, make_next(not_max));   // a block that has a successor
    const Formula last_block = make_and(dollar, make_next(is_max));

    std::vector<Formula> nonfinal;
    std::vector<std::size_t> final_ix;
    for (std::size_t q = 0; q < Q.size(); ++q) {
        if (m.is_accepting(q))
            final_ix.push_back(q);
        else
            nonfinal.push_back(Q[q]);
    }

    std::vector<Formula> parts;

    // Id: ids start at zero and increase by one from block to block.
    parts.push_back(make_and(dollar, make_and(make_next(conjunction(negated(B))),
                                              make_globally(make_implies(open_block, make_next(inc_formula(B, d)))))));

    // Init: the initial configuration sits in the first block.
    {
        std::vector<Formula> c{hash, make_next(Q[m.initial_index()])};
        for (std::size_t j = 0; j < l_r; ++j) {
            const std::size_t a = j < input.size() ? m.symbol_index(input[j]) : m.blank_index();
            c.push_back(make_next_n(S[a], j + 1));
        }
        parts.push_back(make_next_n(conjunction(c), 2));
    }

    // Accept: the block with the largest id holds an accepting state.
    {
        std::vector<Formula> alts;
        for (std::size_t q : final_ix)
            for (std::size_t j = 0; j < l_r; ++j) alts.push_back(make_next_n(Q[q], j + 3));
        parts.push_back(make_globally(make_implies(last_block, disjunction(alts))));
    }

    // Transitions at the head cell.
    for (std::size_t q = 0; q < Q.size(); ++q) {
        if (m.is_accepting(q)) continue;
        for (std::size_t a = 0; a < S.size(); ++a) {
            std::vector<Formula> alts;
            for (std::size_t t : m.applicable(q, a)) {
                const Transition& tr = m.transitions()[t];
                alts.push_back(make_and(make_next_n(S[m.symbol_index(tr.write)], d),
                                        make_next_n(Q[m.state_index(tr.to)], tr.dir > 0 ? d + 1 : d - 1)));
            }
            parts.push_back(make_globally(make_implies(make_and(Q[q], S[a]), disjunction(alts))));
        }
    }

    // Cells without a working head keep their symbol.
    for (std::size_t a = 0; a < S.size(); ++a) {
        std::vector<Formula> cells;
        std::vector<Formula> guard = negated(nonfinal);
        guard.push_back(S[a]);
        const Formula keep = make_implies(conjunction(guard), make_next_n(S[a], d));
        for (std::size_t j = 0; j < l_r; ++j) cells.push_back(make_next_n(keep, j + 3));
        parts.push_back(make_globally(make_implies(open_block, conjunction(cells))));
    }

    // Repeat: accepting configurations are copied forward.
    {
        std::vector<Formula> cells;
        for (std::size_t q : final_ix)
            for (std::size_t j = 0; j < l_r; ++j)
                cells.push_back(make_next_n(make_implies(Q[q], make_next_n(Q[q], d)), j + 3));
        parts.push_back(make_globally(make_implies(open_block, conjunction(cells))));
    }

    // Loop: bot forever after the last block.
    parts.push_back(make_globally(make_implies(last_block, make_next_n(make_globally(bot), d))));

    // Well-formedness, position by position.
    {
        std::vector<Formula> everything = Q;
        everything.insert(everything.end(), S.begin(), S.end());
        everything.insert(everything.end(), B.begin(), B.end());
        everything.insert(everything.end(), {dollar, hash, bot});
        auto only = [&](const std::vector<Formula>& allowed, std::vector<Formula> required) {
            for (Formula f : everything)
                if (std::find(allowed.begin(), allowed.end(), f) == allowed.end()) required.push_back(make_not(f));
            return conjunction(required);
        };
        std::vector<Formula> cell_allowed = Q;
        cell_allowed.insert(cell_allowed.end(), S.begin(), S.end());
        const Formula sep_dollar = only({dollar}, {dollar});
        const Formula sep_hash = only({hash}, {hash});
        const Formula id_letter = only(B, {});
        const Formula cell = only(cell_allowed, {detail::exactly_one(S), detail::at_most_one(Q)});
        const Formula any_state = disjunction(Q);

        std::vector<Formula> wf;
        for (std::size_t i = 0; i < l_r; ++i) {
            const std::size_t s = p.block_start(i);
            wf.push_back(make_next_n(sep_dollar, s));
            wf.push_back(make_next_n(id_letter, s + 1));
            wf.push_back(make_next_n(sep_hash, s + 2));
            std::vector<Formula> some;
            for (std::size_t j = 0; j < l_r; ++j) {
                wf.push_back(make_next_n(cell, p.cell_pos(i, j)));
                some.push_back(make_next_n(any_state, p.cell_pos(i, j)));
                for (std::size_t j2 = j + 1; j2 < l_r; ++j2)
                    wf.push_back(make_next_n(make_implies(any_state, make_next_n(make_not(any_state), j2 - j)),
                                             p.cell_pos(i, j)));
            }
            wf.push_back(disjunction(some));
        }
        wf.push_back(make_next_n(make_globally(only({bot}, {bot})), p.k - 1));
        parts.push_back(conjunction(wf));
    }

    return WordReduction{conjunction(parts), p.k, std::move(p)};
}

/// Letters each position of a model can carry; the last position is the bot letter.
inline std::vector<std::vector<Letter>> word_skeleton(const WordReductionParams& p)
{
    std::vector<std::vector<Letter>> out(p.k);
    const Letter dollar = p.atoms.letter({p.dollar}), hash = p.atoms.letter({p.hash});
    std::vector<Letter> ids;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << p.l_c); ++v) {
        Letter l = 0;
        for (std::size_t i = 0; i < p.l_c; ++i)
            if ((v >> (p.l_c - 1 - i)) & 1U) l |= p.atoms.letter({p.bits[i]});
        ids.push_back(l);
    }
    std::vector<Letter> cells;
    for (const auto& a : p.symbols) cells.push_back(p.atoms.letter({a}));
    for (const auto& a : p.symbols)
        for (const auto& q : p.states) cells.push_back(p.atoms.letter({a, q}));
    for (std::size_t i = 0; i < p.l_r; ++i) {
        out[p.block_start(i)] = {dollar};
        out[p.block_start(i) + 1] = ids;
        out[p.block_start(i) + 2] = {hash};
        for (std::size_t j = 0; j < p.l_r; ++j) out[p.cell_pos(i, j)] = cells;
    }
    out[p.k - 1] = {p.atoms.letter({p.bot})};
    return out;
}

/// The k-word-model of an accepting run; its last configuration fills the
/// remaining blocks.
inline UltimatelyPeriodicWord encode_run_as_word(const NTMachine& m, const RunTrace& run, const WordReductionParams& p)
{
    if (run.configs.empty()) throw Error("run has no configurations");
    if (run.configs.size() > p.l_r)
        throw BoundTooSmall("run has " + std::to_string(run.configs.size()) + " configurations, bound is " +
                                std::to_string(p.l_r),
                            run.steps());
    std::vector<Letter> u(p.k - 1, 0);
    for (std::size_t i = 0; i < p.l_r; ++i) {
        const NTMConfig& c = run.configs[std::min(i, run.configs.size() - 1)];
        if (c.head < 0 || c.head >= static_cast<std::int64_t>(p.l_r))
            throw SpaceBoundError("head outside the " + std::to_string(p.l_r) + " encoded cells");
        if (!c.tape.empty() && (c.tape.begin()->first < 0 || c.tape.rbegin()->first >= static_cast<std::int64_t>(p.l_r)))
            throw SpaceBoundError("tape content outside the " + std::to_string(p.l_r) + " encoded cells");
        u[p.block_start(i)] = p.atoms.letter({p.dollar});
        Letter id = 0;
        for (std::size_t b = 0; b < p.l_c; ++b)
            if ((i >> (p.l_c - 1 - b)) & 1U) id |= p.atoms.letter({p.bits[b]});
        u[p.block_start(i) + 1] = id;
        u[p.block_start(i) + 2] = p.atoms.letter({p.hash});
        for (std::size_t j = 0; j < p.l_r; ++j) {
            Letter l = p.atoms.letter({p.symbols[c.read(static_cast<std::int64_t>(j), m.blank_index())]});
            if (c.head == static_cast<std::int64_t>(j)) l |= p.atoms.letter({p.states[c.state]});
            u[p.cell_pos(i, j)] = l;
        }
    }
    return UltimatelyPeriodicWord(std::move(u), {p.atoms.letter({p.bot})});
}

/// Sidecar for a reduction: bound, atoms and the per-position skeleton.
inline nlohmann::json word_manifest(const WordReductionParams& p)
{
    nlohmann::json j;
    j["k"] = p.k;
    j["ap_inputs"] = nlohmann::json::array();
    j["ap_outputs"] = p.atoms.names(AtomKind::output);
    std::vector<std::string> structure;
    for (const auto& a : p.atoms.names(AtomKind::output))
        if (std::find(p.states.begin(), p.states.end(), a) == p.states.end() &&
            std::find(p.symbols.begin(), p.symbols.end(), a) == p.symbols.end())
            structure.push_back(a);
    j["atom_roles"] = {{"states", p.states}, {"symbols", p.symbols}, {"structure", structure}};
    nlohmann::json sk = nlohmann::json::array();
    for (const auto& cands : word_skeleton(p)) {
        nlohmann::json pos = nlohmann::json::array();
        for (Letter l : cands) pos.push_back(p.atoms.letter_names(l));
        sk.push_back(std::move(pos));
    }
    j["skeleton"] = std::move(sk);
    return j;
}

} // namespace ltlcount

#endif // LTLCOUNT_REDUCE_WORD_HPP_
