#include "ltlcount/word.hpp"
#include "ltlcount/word_count.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace ltlcount;

namespace
{
const AtomSet p_only = AtomSet::outputs({"p"});
const AtomSet pq = AtomSet::outputs({"p", "q"});

Letter L(const AtomSet& a, std::vector<std::string> names) { return a.letter(names); }

/// Reference count: every split of every letter sequence, evaluated directly.
Count brute_count(Formula f, std::size_t k, const AtomSet& atoms)
{
    const std::size_t n = atoms.size();
    const std::uint64_t letters = std::uint64_t{1} << n;
    std::uint64_t total = 1;
    for (std::size_t j = 0; j < k; ++j) total *= letters;
    Count c = 0;
    std::vector<Letter> word(k);
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t x = code;
        for (std::size_t j = 0; j < k; ++j) {
            word[j] = x % letters;
            x /= letters;
        }
        for (std::size_t i = 0; i < k; ++i) {
            UltimatelyPeriodicWord w({word.begin(), word.begin() + static_cast<long>(i)},
                                     {word.begin() + static_cast<long>(i), word.end()});
            if (eval_direct(f, w, atoms)) ++c;
        }
    }
    return c;
}
} // namespace

TEST_CASE("direct evaluation on small lassos")
{
    const Letter p = L(pq, {"p"}), q = L(pq, {"q"});
    CHECK(eval_direct(parse("G p", pq), UltimatelyPeriodicWord({}, {p}), pq));
    CHECK(eval_direct(parse("p U q", pq), UltimatelyPeriodicWord({p}, {q}), pq));
    CHECK_FALSE(eval_direct(parse("F G p", pq), UltimatelyPeriodicWord({p}, {0}), pq));
    CHECK_FALSE(eval_direct(parse("p U q", pq), UltimatelyPeriodicWord({}, {p, 0}), pq));
    CHECK(eval_direct(parse("G F q", pq), UltimatelyPeriodicWord({0, 0}, {p, q}), pq));
    CHECK_THROWS(UltimatelyPeriodicWord({p}, {}));
}

TEST_CASE("backward evaluation builds the satisfaction table")
{
    const Letter p = L(p_only, {"p"});
    Formula f = parse("X p", p_only);
    UltimatelyPeriodicWord w({0}, {p});
    auto [holds, table] = eval_backward(f, w, p_only);
    CHECK(holds);
    CHECK(table.at(1) == std::vector<Formula>{make_atom("p"), f});
    CHECK(table.at(0) == std::vector<Formula>{f});
    CHECK(table_is_consistent(table, w, p_only));

    auto [h2, t2] = eval_backward(parse("p U q", pq), UltimatelyPeriodicWord({}, {L(pq, {"p"}), 0}), pq);
    CHECK_FALSE(h2);
    CHECK(table_is_consistent(t2, UltimatelyPeriodicWord({}, {L(pq, {"p"}), 0}), pq));
}

TEST_CASE("evaluators agree and tables are sound")
{
    std::mt19937_64 rng(21);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t n = 1 + testsupport::pick(rng, 3);
        auto names = testsupport::atom_names(n);
        AtomSet atoms = AtomSet::outputs(names);
        Formula f = testsupport::random_formula_upto(rng, names, 7);
        auto w = testsupport::random_lasso(rng, n, 7);
        INFO(print(f));
        auto [holds, table] = eval_backward(f, w, atoms);
        REQUIRE(holds == eval_direct(f, w, atoms));
        CHECK(table_is_consistent(table, w, atoms));
        // Every entry matches direct evaluation of that subformula from j.
        for (Formula g : table.closure()) {
            for (std::size_t j = 0; j < w.length(); ++j) {
                UltimatelyPeriodicWord suffix = j < w.loop_start()
                    ? UltimatelyPeriodicWord({w.prefix.begin() + static_cast<long>(j), w.prefix.end()}, w.period)
                    : UltimatelyPeriodicWord({}, [&] {
                          std::vector<Letter> v(w.period.begin() + static_cast<long>(j - w.loop_start()),
                                                w.period.end());
                          v.insert(v.end(), w.period.begin(),
                                   w.period.begin() + static_cast<long>(j - w.loop_start()));
                          return v;
                      }());
                CHECK(table.contains(j, g) == eval_direct(g, suffix, atoms));
            }
        }
    }
}

TEST_CASE("semantics do not depend on the split")
{
    std::mt19937_64 rng(22);
    for (int i = 0; i < 1000; ++i) {
        Formula f = testsupport::random_formula_upto(rng, {"p", "q"}, 6);
        auto w = testsupport::random_lasso(rng, 2, 5);
        std::vector<Letter> uv = w.prefix;
        uv.insert(uv.end(), w.period.begin(), w.period.end());
        UltimatelyPeriodicWord unrolled(uv, w.period);
        CHECK(eval_direct(f, w, pq) == eval_direct(f, unrolled, pq));
    }
}

TEST_CASE("count_word_models examples")
{
    CHECK(count_word_models(make_true(), 2, p_only) == 8);
    CHECK(count_word_models(parse("G p", p_only), 2, p_only) == 2);
    CHECK(count_word_models(parse("p", p_only), 1, p_only) == 1);
    CHECK(count_word_models(parse("p", p_only), 0, p_only) == 0);
    CHECK_THROWS_AS(count_word_models(make_true(), 30, pq, 1000), BudgetExceeded);
    CHECK_THROWS_AS(count_word_models(parse("z", p_only), 1, p_only), UnknownAtomError);
}

TEST_CASE("count_word_models matches brute force")
{
    std::mt19937_64 rng(23);
    for (int i = 0; i < 150; ++i) {
        const std::size_t n = 1 + testsupport::pick(rng, 2);
        auto names = testsupport::atom_names(n);
        AtomSet atoms = AtomSet::outputs(names);
        Formula f = testsupport::random_formula_upto(rng, names, 6);
        const std::size_t k = 1 + testsupport::pick(rng, n == 1 ? 6 : 4);
        INFO(print(f) << " k=" << k);
        CHECK(count_word_models(f, k, atoms) == brute_count(f, k, atoms));
    }
}

TEST_CASE("bounded pruning keeps counts exact")
{
    // Formulas whose conjuncts are pruned during the search.
    const char* texts[] = {"G (p -> X q)", "p & X X !q & G (q | X p)", "G (p <-> X !p) & F q",
                           "X (G (p & q)) | G q", "q & G (X p -> q) & (p U q)", "G X X p & G (p | q)"};
    for (const char* t : texts) {
        Formula f = parse(t, pq);
        for (std::size_t k = 1; k <= 5; ++k) {
            INFO(t << " k=" << k);
            CHECK(count_word_models(f, k, pq) == brute_count(f, k, pq));
        }
    }
}

TEST_CASE("parallel counting is deterministic")
{
    Formula f = parse("G (p -> F q) & X !q", pq);
    const Count one = count_word_models(f, 5, pq, default_budget, 1);
    CHECK(count_word_models(f, 5, pq, default_budget, 4) == one);
    CHECK(count_word_models(f, 5, pq, default_budget, 3) == one);
}

TEST_CASE("constrained counting")
{
    const Letter p = L(p_only, {"p"});
    // f = true: k times the product of the candidate sizes.
    std::vector<std::vector<Letter>> c{{0, p}, {p}, {0, p}};
    CHECK(count_word_models_constrained(make_true(), 3, p_only, c) == 3 * 4);
    // Singletons: number of satisfying splits.
    std::vector<std::vector<Letter>> s{{p}, {p}, {0}};
    CHECK(count_word_models_constrained(parse("F !p", p_only), 3, p_only, s) == 3);
    CHECK(count_word_models_constrained(parse("G p", p_only), 3, p_only, s) == 0);
    std::vector<std::vector<Letter>> s2{{0}, {p}, {p}};
    // Only the split whose period contains the empty letter satisfies G F !p.
    CHECK(count_word_models_constrained(parse("G F !p", p_only), 3, p_only, s2) == 1);
    // Full candidates reproduce the unconstrained count.
    std::vector<std::vector<Letter>> all(4, std::vector<Letter>{0, p});
    Formula f = parse("p U (X !p)", p_only);
    CHECK(count_word_models_constrained(f, 4, p_only, all) == count_word_models(f, 4, p_only));
    // The node budget is enforced.
    CHECK_THROWS_AS(count_word_models_constrained(make_true(), 4, p_only, all, 5), BudgetExceeded);
}
