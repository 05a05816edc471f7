#include "ltlcount/nba.hpp"
#include "ltlcount/tree.hpp"
#include "ltlcount/tree_check.hpp"
#include "ltlcount/word.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <fstream>
#include <set>

using namespace ltlcount;

namespace
{
const AtomSet io = AtomSet::from({"d"}, {"a"});

TreeModel load_sample_tree()
{
    std::ifstream in(std::string(LTLCOUNT_TEST_DATA) + "/sample_tree.json");
    return tree_from_json(nlohmann::json::parse(in));
}

/// All direction words of length n.
std::vector<std::vector<std::size_t>> words(std::size_t dirs, std::size_t n)
{
    std::vector<std::vector<std::size_t>> out{{}};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& w : out)
            for (std::size_t d = 0; d < dirs; ++d) {
                next.push_back(w);
                next.back().push_back(d);
            }
        out = std::move(next);
    }
    return out;
}

/// Independent oracle: every path is a lasso in the finite graph of
/// (node, direction) pairs, so a violating path can be taken ultimately
/// periodic. Lassos up to length 8 suffice for the small formulas used here.
bool all_paths_oracle(Formula f, const TreeModel& t)
{
    const std::size_t dirs = t.directions();
    // Enumerate simple-enough lassos: walk a direction word, then repeat a
    // cycle of directions from a revisited (node, position-in-cycle) state.
    for (std::size_t len = 1; len <= 8; ++len) {
        for (const auto& w : words(dirs, len)) {
            std::vector<std::size_t> states{0};
            for (std::size_t d : w) states.push_back(t.next(states.back(), d));
            // The word w followed by cycling w[i..] forever is a lasso when the
            // state after w equals the state at position i.
            for (std::size_t i = 0; i < len; ++i) {
                if (states[len] != states[i]) continue;
                std::vector<Letter> u, v;
                for (std::size_t j = 0; j < len; ++j) (j < i ? u : v).push_back(t.letter(states[j], w[j]));
                if (!eval_direct(f, UltimatelyPeriodicWord(u, v), t.atoms())) return false;
            }
        }
    }
    return true;
}
} // namespace

TEST_CASE("tree shape and breadth-first numbering")
{
    TreeModel t(2, io);
    CHECK(t.nodes() == 7);
    CHECK(t.shape().leaves() == 4);
    CHECK(t.shape().first_leaf() == 3);
    CHECK(t.shape().child(1, 1) == 4);
    CHECK(t.shape().depth(6) == 2);
    CHECK(t.shape().ancestor(5, 0) == 0);
    CHECK(t.shape().ancestor(5, 1) == 2);
    t.set_backedge(2, 0, 1);
    CHECK(t.next(5, 0) == 2);
    CHECK(t.next(5, 1) == 0);
    CHECK_THROWS(t.set_backedge(0, 0, 3));

    AtomSet two = AtomSet::from({"y", "x"}, {});
    auto dirs = direction_letters(two);
    REQUIRE(dirs.size() == 4);
    CHECK(dirs[0] == 0);
    CHECK(dirs[1] == two.letter({"x"}));
    CHECK(dirs[2] == two.letter({"x", "y"}));
    CHECK(dirs[3] == two.letter({"y"}));
}

TEST_CASE("sample tree: path letters")
{
    TreeModel t = load_sample_tree();
    const AtomSet& a = t.atoms();
    // e1 is the empty direction, e2 = {e}.
    auto trace = t.trace({0, 0, 1, 1, 0});
    std::vector<Letter> expect{a.letter({"a"}), a.letter({"b"}), a.letter({"a", "e"}), a.letter({"c", "e"}),
                               a.letter({"c"})};
    CHECK(trace == expect);
    CHECK(t.next(1, 0) == 0);
    CHECK(t.next(1, 1) == 1);
    CHECK(t.next(2, 0) == 2);
    CHECK(tree_to_json(tree_from_json(tree_to_json(t))) == tree_to_json(t));
    CHECK(tree_from_json(tree_to_json(t)) == t);
    CHECK(check_tree_nba(parse("a & X (b | c)", a), t));
    CHECK(check_tree_nba(parse("G (a | b | c)", a), t));
    CHECK_FALSE(check_tree_nba(parse("G F a", a), t));
    CHECK(check_tree_nba(parse("G (c -> X c)", a), t));
    CHECK(check_tree_fragment(parse("G (c -> X c)", a), t));
}

TEST_CASE("tree JSON rejects malformed input")
{
    auto j = tree_to_json(load_sample_tree());
    auto bad = j;
    bad["labels"].erase(0);
    CHECK_THROWS_AS(tree_from_json(bad), FormatError);
    bad = j;
    bad["backedges"][0][0] = 2;
    CHECK_THROWS_AS(tree_from_json(bad), FormatError);
    bad = j;
    bad["labels"][0] = {"e"};
    CHECK_THROWS_AS(tree_from_json(bad), FormatError);
    bad = j;
    bad.erase("k");
    CHECK_THROWS_AS(tree_from_json(bad), FormatError);
}

TEST_CASE("automaton membership examples")
{
    const AtomSet p = AtomSet::outputs({"p"});
    auto a = ltl_to_nba(parse("G p", p), p);
    CHECK(nba_accepts(a, UltimatelyPeriodicWord({}, {1})));
    CHECK_FALSE(nba_accepts(a, UltimatelyPeriodicWord({1}, {0})));
    CHECK(eval_nba(parse("G F p", p), UltimatelyPeriodicWord({0, 0}, {0, 1}), p));
    CHECK_FALSE(eval_nba(parse("F G p", p), UltimatelyPeriodicWord({}, {0, 1}), p));
    CHECK(eval_nba(make_true(), UltimatelyPeriodicWord({}, {0}), p));
    CHECK_FALSE(eval_nba(make_false(), UltimatelyPeriodicWord({}, {0}), p));
}

TEST_CASE("automaton membership agrees with direct evaluation")
{
    std::mt19937_64 rng(31);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 1 + testsupport::pick(rng, 3);
        auto names = testsupport::atom_names(n);
        AtomSet atoms = AtomSet::outputs(names);
        Formula f = testsupport::random_formula_upto(rng, names, 6);
        auto w = testsupport::random_lasso(rng, n, 6);
        INFO(print(f));
        CHECK(eval_nba(f, w, atoms) == eval_direct(f, w, atoms));
    }
}

TEST_CASE("tableau cap is enforced")
{
    std::vector<Formula> parts;
    std::vector<std::string> names;
    for (int i = 0; i < 30; ++i) names.push_back("x" + std::to_string(i));
    AtomSet atoms = AtomSet::outputs(names);
    for (const auto& nm : names) parts.push_back(make_eventually(make_atom(nm)));
    CHECK_THROWS_AS(ltl_to_nba(conjunction(parts), atoms), CapExceeded);
}

TEST_CASE("tree checker examples")
{
    TreeModel t(1, io);
    for (std::size_t x = 0; x < 3; ++x) t.set_label(x, io.letter({"a"}));
    CHECK(check_tree_nba(make_true(), t));
    CHECK(check_tree_nba(parse("G a", io), t));
    CHECK(check_tree_fragment(parse("G a", io), t));
    CHECK(check_tree_fragment(parse("G (a -> X a)", io), t));
    t.set_label(2, 0);
    CHECK_FALSE(check_tree_nba(parse("G a", io), t));
    CHECK_FALSE(check_tree_fragment(parse("G a", io), t));

    // X X a: position 2 is reached after one back-edge. With the right leaf
    // (unlabelled) looping to itself, the word (right, right) sees it twice.
    TreeModel u(1, io);
    u.set_label(0, io.letter({"a"}));
    u.set_label(1, io.letter({"a"}));
    u.set_backedge(0, 0, 0);
    u.set_backedge(0, 1, 0);
    u.set_backedge(1, 0, 0);
    u.set_backedge(1, 1, 1);
    CHECK_FALSE(check_tree_fragment(parse("X X a", io), u));
    CHECK_FALSE(check_tree_nba(parse("X X a", io), u));
    u.set_backedge(1, 1, 0);
    // Now every length-2 walk returns to the root.
    CHECK(check_tree_fragment(parse("X X a", io), u));
    CHECK(check_tree_nba(parse("X X a", io), u));

    CHECK_THROWS_AS(check_tree_fragment(parse("F a", io), t), NotInFragment);
    CHECK_THROWS_AS(check_tree_fragment(parse("G F a", io), t), NotInFragment);
    CHECK(FragmentFormula::in_fragment(parse("(a & d) R (X G a & a)", io)));
    CHECK_FALSE(FragmentFormula::in_fragment(parse("a U a", io)));
}

TEST_CASE("tree checkers agree with a lasso oracle")
{
    std::mt19937_64 rng(32);
    const AtomSet atoms = AtomSet::from({"d"}, {"a", "b"});
    for (int i = 0; i < 150; ++i) {
        TreeModel t = testsupport::random_tree(rng, testsupport::pick(rng, 2), atoms);
        Formula f = testsupport::random_formula_upto(rng, {"a", "b", "d"}, 5);
        INFO(print(f) << "\n" << tree_to_json(t).dump());
        const bool nba = check_tree_nba(f, t);
        CHECK(nba == all_paths_oracle(f, t));
        if (FragmentFormula::in_fragment(f)) CHECK(check_tree_fragment(f, t) == nba);
    }
}

TEST_CASE("fragment checker agrees with the automaton product")
{
    std::mt19937_64 rng(33);
    const AtomSet atoms = AtomSet::from({"d"}, {"a", "b"});
    for (int i = 0; i < 400; ++i) {
        TreeModel t = testsupport::random_tree(rng, 1 + testsupport::pick(rng, 2), atoms);
        Formula f = testsupport::random_fragment(rng, {"a", "b", "d"}, 1 + testsupport::pick(rng, 4));
        INFO(print(f) << "\n" << tree_to_json(t).dump());
        CHECK(check_tree_fragment(f, t) == check_tree_nba(f, t));
    }
}

TEST_CASE("tree enumeration")
{
    CHECK(tree_model_total(1, io) == 128);
    CHECK(tree_model_total(0, io) == 2);
    CHECK(tree_model_total(2, io) == 839808);
    std::set<std::string> seen;
    std::size_t n = 0;
    enumerate_tree_models(1, io, 1000, [&](const TreeModel& t) {
        seen.insert(tree_to_json(t).dump());
        ++n;
        return true;
    });
    CHECK(n == 128);
    CHECK(seen.size() == 128);
    n = 0;
    enumerate_tree_models(0, io, 1000, [&](const TreeModel& t) {
        CHECK(t.next(0, 0) == 0);
        ++n;
        return true;
    });
    CHECK(n == 2);
    CHECK_THROWS_AS(enumerate_tree_models(2, io, 1000, [](const TreeModel&) { return true; }), BudgetExceeded);

    // seek() lands on the same model as advancing.
    TreeModelEnumerator e(1, io, 1000), f(1, io, 1000);
    e.seek(0);
    for (int i = 0; i < 77; ++i) e.advance();
    f.seek(77);
    CHECK(e.current() == f.current());
}

TEST_CASE("tree counting")
{
    const AtomSet a_only = AtomSet::from({"d"}, {"a"});
    CHECK(count_tree_models(make_true(), 1, io) == 128);
    CHECK(count_tree_models(parse("G a", a_only), 1, a_only) == 16);
    CHECK(count_tree_models(make_false(), 1, io) == 0);
    // Universal path semantics: a tree can be a model of neither f nor !f.
    CHECK(count_tree_models(parse("d", io), 1, io) == 0);
    CHECK(count_tree_models(parse("!d", io), 1, io) == 0);
    std::mt19937_64 rng(34);
    for (int i = 0; i < 20; ++i) {
        Formula f = testsupport::random_formula_upto(rng, {"a", "d"}, 4);
        INFO(print(f));
        CHECK(count_tree_models(f, 1, io) + count_tree_models(make_not(f), 1, io) <= 128);
        // Root-label formulas cannot distinguish paths, so they partition.
        Formula g = testsupport::random_bounded(rng, {"a"}, testsupport::pick(rng, 3));
        if (g.x_depth() == 0) CHECK(count_tree_models(g, 1, io) + count_tree_models(make_not(g), 1, io) == 128);
    }
}
