// Random generators shared by the property tests.
#ifndef LTLCOUNT_TESTS_SUPPORT_HPP_
#define LTLCOUNT_TESTS_SUPPORT_HPP_

#include "ltlcount/atoms.hpp"
#include "ltlcount/formula.hpp"
#include "ltlcount/tree.hpp"
#include "ltlcount/word.hpp"

#include <random>
#include <string>
#include <vector>

namespace testsupport
{

using namespace ltlcount;

inline std::size_t pick(std::mt19937_64& rng, std::size_t n)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// Random formula with exactly `ops` operators over the given atom names.
inline Formula random_formula(std::mt19937_64& rng, const std::vector<std::string>& names, std::size_t ops)
{
    if (ops == 0) {
        std::size_t r = pick(rng, names.size() + 2);
        if (r == names.size()) return make_true();
        if (r == names.size() + 1) return make_false();
        return make_atom(names[r]);
    }
    static const Op all[] = {Op::neg, Op::conj, Op::disj, Op::implies, Op::iff, Op::next,
                             Op::until, Op::release, Op::eventually, Op::globally};
    Op op = all[pick(rng, std::size(all))];
    if (is_unary(op)) {
        Formula c = random_formula(rng, names, ops - 1);
        return Formula::make(op, "", &c);
    }
    std::size_t left = pick(rng, ops);
    Formula a = random_formula(rng, names, left);
    Formula b = random_formula(rng, names, ops - 1 - left);
    return Formula::make(op, "", &a, &b);
}

/// Random formula with at most `max_ops` operators.
inline Formula random_formula_upto(std::mt19937_64& rng, const std::vector<std::string>& names, std::size_t max_ops)
{
    return random_formula(rng, names, pick(rng, max_ops + 1));
}

inline Letter random_letter(std::mt19937_64& rng, std::size_t n_atoms)
{
    return n_atoms == 0 ? 0 : rng() & ((Letter{1} << n_atoms) - 1);
}

/// Random lasso with total length in [1, max_len].
inline UltimatelyPeriodicWord random_lasso(std::mt19937_64& rng, std::size_t n_atoms, std::size_t max_len)
{
    const std::size_t k = 1 + pick(rng, max_len);
    const std::size_t split = pick(rng, k);
    std::vector<Letter> u, v;
    for (std::size_t j = 0; j < k; ++j) (j < split ? u : v).push_back(random_letter(rng, n_atoms));
    return UltimatelyPeriodicWord(u, v);
}

inline std::vector<std::string> atom_names(std::size_t n)
{
    static const char* pool[] = {"p", "q", "r", "s"};
    return {pool, pool + n};
}

/// Random next-bounded formula: boolean connectives and next only.
inline Formula random_bounded(std::mt19937_64& rng, const std::vector<std::string>& names, std::size_t ops)
{
    if (ops == 0) return make_atom(names[pick(rng, names.size())]);
    switch (pick(rng, 4)) {
    case 0: return make_not(random_bounded(rng, names, ops - 1));
    case 1: return make_next(random_bounded(rng, names, ops - 1));
    default: {
        std::size_t left = pick(rng, ops);
        Formula a = random_bounded(rng, names, left);
        Formula b = random_bounded(rng, names, ops - 1 - left);
        return pick(rng, 2) ? make_and(a, b) : make_or(a, b);
    }
    }
}

/// Random member of the lookahead fragment F ::= B | X F | F & F | G B | B R F.
inline Formula random_fragment(std::mt19937_64& rng, const std::vector<std::string>& names, std::size_t size)
{
    auto bounded = [&] { return random_bounded(rng, names, pick(rng, 3)); };
    if (size == 0) return bounded();
    switch (pick(rng, 5)) {
    case 0: return bounded();
    case 1: return make_next(random_fragment(rng, names, size - 1));
    case 2: {
        Formula a = random_fragment(rng, names, size / 2);
        Formula b = random_fragment(rng, names, size - 1 - size / 2);
        return make_and(a, b);
    }
    case 3: return make_globally(bounded());
    default: {
        Formula a = bounded();
        return make_release(a, random_fragment(rng, names, size - 1));
    }
    }
}

/// Tree with uniformly random labels and back-edges.
inline TreeModel random_tree(std::mt19937_64& rng, std::size_t k, const AtomSet& atoms)
{
    TreeModel t(k, atoms);
    const Letter outs = atoms.kind_mask(AtomKind::output);
    for (std::size_t x = 0; x < t.nodes(); ++x) t.set_label(x, rng() & outs);
    for (std::size_t l = 0; l < t.shape().leaves(); ++l)
        for (std::size_t d = 0; d < t.directions(); ++d) t.set_backedge(l, d, pick(rng, k + 1));
    return t;
}

} // namespace testsupport

#endif // LTLCOUNT_TESTS_SUPPORT_HPP_
