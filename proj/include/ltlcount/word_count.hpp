#ifndef LTLCOUNT_WORD_COUNT_HPP_
#define LTLCOUNT_WORD_COUNT_HPP_

#include "ltlcount/atoms.hpp"
#include "ltlcount/bounded.hpp"
#include "ltlcount/count.hpp"
#include "ltlcount/error.hpp"
#include "ltlcount/formula.hpp"
#include "ltlcount/word.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace ltlcount
{

inline constexpr std::uint64_t default_budget = 100'000'000;

namespace detail
{

/// Depth-first enumeration of letter sequences with early rejection by the
/// bounded obligations of f, followed by a full check of every split at the
/// leaves.
class WordCounter
{
public:
    WordCounter(Formula f, std::size_t k, const AtomSet& atoms, const std::vector<std::vector<Letter>>& candidates,
                std::uint64_t node_budget)
        : k_(k), candidates_(candidates), closure_(desugar(f), atoms), node_budget_(node_budget)
    {
        if (candidates_.size() != k_) throw Error("need one candidate list per position");
        for (const auto& c : candidates_) {
            if (c.empty()) throw Error("empty candidate list");
            for (Letter a : c)
                if ((a & ~atoms.all_mask()) != 0) throw Error("candidate letter uses unknown atoms");
        }
        checks_.resize(k_);
        for (const auto& ob : bounded_obligations(f)) {
            const std::size_t id = bodies_.size();
            bodies_.emplace_back(ob.body, atoms);
            const BoundedFormula& b = bodies_.back();
            if (ob.from + b.depth() >= k_) continue;
            const std::size_t last = ob.global ? k_ - 1 - b.depth() : ob.from;
            for (std::size_t p = ob.from; p <= last; ++p)
                for (std::uint32_t d : b.offsets()) checks_[p + d].push_back({id, p});
            // Literal-free bodies are decided at their anchor.
            if (b.offsets().empty())
                for (std::size_t p = ob.from; p <= last; ++p) checks_[p].push_back({id, p});
        }
    }

    std::size_t first_choices() const { return candidates_.front().size(); }

    /// Models whose first letter is candidates[0][first].
    Count count_from(std::size_t first)
    {
        std::vector<Letter> word(k_, 0);
        std::vector<std::vector<char>> val;
        Count total = 0;
        word[0] = candidates_[0][first];
        tick();
        if (passes(word, 0)) descend(word, 1, val, total);
        return total;
    }

private:
    struct Check
    {
        std::size_t body;
        std::size_t anchor;
    };

    void tick()
    {
        if (nodes_.fetch_add(1, std::memory_order_relaxed) + 1 > node_budget_)
            throw BudgetExceeded("search exceeded the node budget of " + std::to_string(node_budget_));
    }

    bool passes(const std::vector<Letter>& word, std::size_t j) const
    {
        for (const Check& c : checks_[j]) {
            auto lit = [&](int atom, std::uint32_t off) {
                const std::size_t q = c.anchor + off;
                if (q > j) return Tri::unknown;
                return ((word[q] >> atom) & 1U) ? Tri::yes : Tri::no;
            };
            if (bodies_[c.body].eval(lit) == Tri::no) return false;
        }
        return true;
    }

    void descend(std::vector<Letter>& word, std::size_t j, std::vector<std::vector<char>>& val, Count& total)
    {
        if (j == k_) {
            total += leaf(word, val);
            return;
        }
        for (Letter a : candidates_[j]) {
            tick();
            word[j] = a;
            if (passes(word, j)) descend(word, j + 1, val, total);
        }
    }

    std::uint64_t leaf(const std::vector<Letter>& word, std::vector<std::vector<char>>& val) const
    {
        std::uint64_t n = 0;
        for (std::size_t i = 0; i < k_; ++i) {
            UltimatelyPeriodicWord w(std::vector<Letter>(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(i)),
                                     std::vector<Letter>(word.begin() + static_cast<std::ptrdiff_t>(i), word.end()));
            backward_values(closure_, w, val);
            if (val.back()[0]) ++n;
        }
        return n;
    }

    std::size_t k_;
    const std::vector<std::vector<Letter>>& candidates_;
    IndexedClosure closure_;
    std::vector<BoundedFormula> bodies_;
    std::vector<std::vector<Check>> checks_;
    std::uint64_t node_budget_;
    std::atomic<std::uint64_t> nodes_{0};
};

} // namespace detail

/// Number of pairs (u, v) with |u.v| = k and w(j) in candidates[j] whose lasso
/// satisfies f. The budget bounds the number of visited search nodes.
inline Count count_word_models_constrained(Formula f, std::size_t k, const AtomSet& atoms,
                                           const std::vector<std::vector<Letter>>& candidates,
                                           std::uint64_t budget = default_budget, unsigned jobs = 1)
{
    check_atoms(f, atoms);
    if (k == 0) return 0;
    detail::WordCounter counter(f, k, atoms, candidates, budget);
    const std::size_t n = counter.first_choices();
    std::vector<Count> part(n);
    jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) part[i] = counter.count_from(i);
    } else {
        std::vector<std::exception_ptr> errors(jobs);
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < n; i += jobs) part[i] = counter.count_from(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    Count total = 0;
    for (const Count& c : part) total += c;
    return total;
}

/// Number of k-word-models of f over 2^atoms. Refuses with BudgetExceeded
/// when k * 2^(|atoms| k) exceeds the budget.
inline Count count_word_models(Formula f, std::size_t k, const AtomSet& atoms, std::uint64_t budget = default_budget,
                               unsigned jobs = 1)
{
    check_atoms(f, atoms);
    if (k == 0) return 0;
    const std::size_t n = atoms.size();
    const Count space = Count(k) * pow_capped(Count(2), static_cast<std::uint64_t>(n) * k, Count(budget) + 1);
    if (space > budget)
        throw BudgetExceeded("k * 2^(|AP| k) exceeds the budget of " + std::to_string(budget));
    std::vector<Letter> all;
    for (Letter a = 0; a < (Letter{1} << n); ++a) all.push_back(a);
    std::vector<std::vector<Letter>> candidates(k, all);
    return count_word_models_constrained(f, k, atoms, candidates, budget, jobs);
}

} // namespace ltlcount

#endif // LTLCOUNT_WORD_COUNT_HPP_
