#include "ltlcount/formula.hpp"
#include "ltlcount/word.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace ltlcount;

namespace
{
const AtomSet pq = AtomSet::outputs({"p", "q"});
}

TEST_CASE("parse follows the grammar")
{
    Formula p = make_atom("p"), q = make_atom("q");
    CHECK(parse("p U q", pq) == make_until(p, q));
    CHECK(parse("X X p", pq) == make_next(make_next(p)));
    CHECK(parse("p U q U p", pq) == make_until(p, make_until(q, p)));
    CHECK(parse("p & q | p", pq) == make_or(make_and(p, q), p));
    CHECK(parse("p -> q -> p", pq) == make_implies(p, make_implies(q, p)));
    CHECK(parse("p <-> q", pq) == make_iff(p, q));
    CHECK(parse("!p U q", pq) == make_until(make_not(p), q));
    CHECK(parse("G F p", pq) == make_globally(make_eventually(p)));
    CHECK(parse(" ( p\n R q ) ", pq) == make_release(p, q));
    CHECK(parse("true & false", pq) == make_and(make_true(), make_false()));
    CHECK(parse("p & q U p", pq) == make_and(p, make_until(q, p)));
}

TEST_CASE("parse reports position of syntax errors")
{
    CHECK_THROWS_AS(parse("p U", pq), ParseError);
    CHECK_THROWS_AS(parse("(p", pq), ParseError);
    CHECK_THROWS_AS(parse("p q", pq), ParseError);
    CHECK_THROWS_AS(parse("", pq), ParseError);
    try {
        parse("p &\n  & q", pq);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 3);
    }
    CHECK_THROWS_AS(parse("p & z", pq), UnknownAtomError);
}

TEST_CASE("print is fully parenthesized")
{
    Formula p = make_atom("p"), q = make_atom("q"), a = make_atom("a");
    CHECK(print(make_until(p, q)) == "(p U q)");
    CHECK(print(make_next(make_next(p))) == "(X (X p))");
    CHECK(print(make_globally(a)) == "(G a)");
    CHECK(print(make_not(p)) == "(! p)");
    CHECK(print(make_true()) == "true");
}

TEST_CASE("print and parse round-trip on random formulas")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        Formula f = testsupport::random_formula_upto(rng, {"p", "q"}, 8);
        INFO(print(f));
        CHECK(parse(print(f), pq) == f);
    }
}

TEST_CASE("negation normal form")
{
    Formula p = make_atom("p"), q = make_atom("q");
    CHECK(negation_normal_form(make_not(make_until(p, q))) == make_release(make_not(p), make_not(q)));
    CHECK(negation_normal_form(make_not(make_next(p))) == make_next(make_not(p)));
    CHECK(negation_normal_form(make_globally(p)) == make_release(make_false(), p));
}

namespace
{
bool only_atom_negations(Formula f)
{
    for (Formula g : closure(f)) {
        if (g.op() == Op::neg && g.child().op() != Op::atom) return false;
        if (g.op() == Op::implies || g.op() == Op::iff || g.op() == Op::eventually || g.op() == Op::globally)
            return false;
    }
    return true;
}
} // namespace

TEST_CASE("negation normal form preserves semantics")
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 1000; ++i) {
        Formula f = testsupport::random_formula_upto(rng, {"p", "q"}, 6);
        auto w = testsupport::random_lasso(rng, 2, 6);
        Formula n = negation_normal_form(f);
        INFO(print(f));
        CHECK(only_atom_negations(n));
        CHECK(eval_direct(n, w, pq) == eval_direct(f, w, pq));
    }
}

TEST_CASE("closure lists subformulas bottom-up")
{
    Formula p = make_atom("p"), q = make_atom("q");
    CHECK(closure(make_until(p, q)) == std::vector<Formula>{p, q, make_until(p, q)});
    Formula xp = make_next(p);
    CHECK(closure(make_and(xp, p)) == std::vector<Formula>{p, xp, make_and(xp, p)});
    CHECK(closure(p) == std::vector<Formula>{p});

    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i) {
        Formula f = testsupport::random_formula_upto(rng, {"p", "q"}, 10);
        auto c = closure(f);
        CHECK(c.size() <= f.node_count());
        CHECK(c.back() == f);
        CHECK(closure(f) == c);
    }
}

TEST_CASE("deep next chains stay iterative")
{
    Formula f = make_next_n(make_atom("p"), 20000);
    CHECK(f.x_depth() == 20000);
    CHECK(closure(f).size() == 20001);
    CHECK(desugar(f) == f);
    CHECK(negation_normal_form(make_not(f)) == make_next_n(make_not(make_atom("p")), 20000));
    Formula g = make_next_n(make_atom("p"), 2000);
    CHECK(parse(print(g), pq) == g);
}
