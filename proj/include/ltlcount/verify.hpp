// End-to-end checks of the reductions against the run oracle.
#ifndef LTLCOUNT_VERIFY_HPP_
#define LTLCOUNT_VERIFY_HPP_

#include "ltlcount/reduce_tree.hpp"
#include "ltlcount/reduce_word.hpp"
#include "ltlcount/tm.hpp"
#include "ltlcount/tree_check.hpp"
#include "ltlcount/word_count.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace ltlcount
{

/// Throws BoundTooSmall if some choice sequence is cut off by the step bound
/// or leaves the encoded cells.
inline void require_bounds_cover_runs(const NTMachine& m, const std::vector<std::string>& input, std::size_t max_steps,
                                      std::size_t cells)
{
    const RunCensus c = census_runs(m, input, max_steps, cells);
    if (c.truncated != 0)
        throw BoundTooSmall("a run is still going after " + std::to_string(max_steps) + " steps", max_steps + 1);
    if (c.off_tape != 0)
        throw BoundTooSmall("a run leaves the " + std::to_string(cells) + " encoded cells", max_steps);
}

struct WordVerifyReport
{
    Count runs = 0, models = 0;
    bool pass() const { return runs == models; }
};

inline WordVerifyReport verify_word_reduction(const NTMachine& m, const std::vector<std::string>& input,
                                              const WordReduction& r, unsigned jobs = 1)
{
    WordVerifyReport rep;
    rep.runs = count_accepting_runs(m, input, r.params.l_r - 1, r.params.l_r);
    rep.models = count_word_models_constrained(r.formula, r.k, r.params.atoms, word_skeleton(r.params), default_budget,
                                               jobs);
    return rep;
}

/// One random single-point change: a flipped output atom at one node, or
/// (one time in four) one back-edge sent to another depth.
inline TreeModel random_tree_mutant(const TreeModel& t, std::mt19937_64& rng)
{
    std::vector<std::size_t> bits;
    const Letter outputs = t.atoms().kind_mask(AtomKind::output);
    for (std::size_t i = 0; i < t.atoms().size(); ++i)
        if ((outputs >> i) & 1U) bits.push_back(i);
    TreeModel u = t;
    if (bits.empty() || rng() % 4 == 0) {
        const std::size_t leaf = rng() % t.shape().leaves(), e = rng() % t.directions();
        std::size_t depth;
        do depth = rng() % (t.height() + 1);
        while (depth == t.backedge(leaf, e) && t.height() > 0);
        u.set_backedge(leaf, e, depth);
    } else {
        const std::size_t x = rng() % t.nodes();
        u.set_label(x, t.label(x) ^ (Letter{1} << bits[rng() % bits.size()]));
    }
    return u;
}

struct TreeVerifyReport
{
    std::size_t runs = 0, sound = 0, collisions = 0;
    std::size_t mutants = 0, falsified = 0, matched = 0;   // matched: equal to another run's tree
    bool pass() const { return sound == runs && collisions == 0 && falsified + matched == mutants; }
};

inline bool tree_satisfies(const TreeReduction& r, const TreeModel& t)
{
    return std::all_of(r.conjuncts.begin(), r.conjuncts.end(),
                       [&](const TreeConjunct& c) { return check_tree_fragment(c.formula, t); });
}

/// Soundness, injectivity and mutation sweep over the encodings of `runs`.
template <typename Encode>
TreeVerifyReport verify_tree_encodings(const TreeReduction& r, const std::vector<RunTrace>& runs, Encode&& encode,
                                       std::size_t mutants_per_run, std::uint64_t seed)
{
    TreeVerifyReport rep;
    rep.runs = runs.size();
    std::vector<TreeModel> trees;
    for (const auto& run : runs) {
        TreeModel t = encode(run);
        if (tree_satisfies(r, t)) ++rep.sound;
        if (std::find(trees.begin(), trees.end(), t) != trees.end()) ++rep.collisions;
        trees.push_back(std::move(t));
    }
    std::mt19937_64 rng(seed);
    for (const auto& t : trees)
        for (std::size_t i = 0; i < mutants_per_run; ++i) {
            const TreeModel u = random_tree_mutant(t, rng);
            ++rep.mutants;
            if (std::find(trees.begin(), trees.end(), u) != trees.end())
                ++rep.matched;
            else if (!tree_satisfies(r, u))
                ++rep.falsified;
        }
    return rep;
}

inline TreeVerifyReport verify_tree_reduction_unary(const NTMachine& m, const std::vector<std::string>& input,
                                                    std::size_t p, std::size_t mutants_per_run, std::uint64_t seed)
{
    const auto par = tree_reduction_params_unary(m, p);
    const auto r = build_tree_reduction_unary(m, input, p);
    const auto runs = enumerate_accepting_runs(m, input, par.l_r - 1, par.l_r);
    return verify_tree_encodings(
        r, runs, [&](const RunTrace& run) { return encode_run_as_tree_unary(m, run, par); }, mutants_per_run, seed);
}

inline TreeVerifyReport verify_tree_reduction_binary(const NTMachine& m, const std::vector<std::string>& input,
                                                     std::size_t p, std::size_t p_prime, std::size_t mutants_per_run,
                                                     std::uint64_t seed)
{
    const auto par = tree_reduction_params_binary(m, p, p_prime);
    const auto r = build_tree_reduction_binary(m, input, p, p_prime);
    const auto runs = enumerate_accepting_runs(m, input, par.configs - 1, par.cells);
    return verify_tree_encodings(
        r, runs, [&](const RunTrace& run) { return encode_run_as_tree_binary(m, run, par); }, mutants_per_run, seed);
}

} // namespace ltlcount

#endif // LTLCOUNT_VERIFY_HPP_
