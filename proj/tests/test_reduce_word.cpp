#include "ltlcount/reduce_word.hpp"
#include "ltlcount/word_count.hpp"
#include "machines.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

using namespace ltlcount;

namespace
{
/// Letter over b1..bl holding value v, b1 most significant.
Letter value_letter(std::uint64_t v, std::size_t l)
{
    Letter x = 0;
    for (std::size_t i = 0; i < l; ++i)
        if ((v >> (l - 1 - i)) & 1U) x |= Letter{1} << i;
    return x;
}

/// Word whose positions 0, d, 2d, ... carry the given values.
UltimatelyPeriodicWord spaced(const std::vector<std::uint64_t>& vals, std::size_t l, std::size_t d)
{
    std::vector<Letter> u((vals.size() - 1) * d + 1, 0);
    for (std::size_t i = 0; i < vals.size(); ++i) u[i * d] = value_letter(vals[i], l);
    return UltimatelyPeriodicWord(u, {0});
}

std::size_t smallest_bound(const testsupport::MicroInstance& inst)
{
    return std::max<std::size_t>({inst.steps + 1, inst.input.size(), 2});
}

Count oracle(const NTMachine& m, const std::vector<std::string>& input, std::size_t l_r)
{
    return count_accepting_runs(m, input, l_r - 1, l_r);
}
} // namespace

TEST_CASE("Inc and Dec truth tables")
{
    for (std::size_t l = 1; l <= 3; ++l) {
        const auto names = bit_names("b", l);
        const AtomSet atoms = AtomSet::outputs(names);
        const auto bits = bit_atoms("b", l);
        const std::uint64_t top = (std::uint64_t{1} << l) - 1;
        for (std::size_t d = 1; d <= 3; ++d) {
            const Formula inc = inc_formula(bits, d), dec = dec_formula(bits, d);
            for (std::uint64_t v = 0; v <= top; ++v)
                for (std::uint64_t w = 0; w <= top; ++w) {
                    const auto word = spaced({v, w}, l, d);
                    CHECK(eval_direct(inc, word, atoms) == (v == top || w == v + 1));
                    CHECK(eval_direct(dec, word, atoms) == (v == 0 || w + 1 == v));
                    CHECK(eval_direct(delta_formula(bits, v), word, atoms));
                    CHECK(eval_direct(delta_formula(bits, w), word, atoms) == (v == w));
                }
        }
    }
    const auto bits = bit_atoms("b", 2);
    const AtomSet atoms = AtomSet::outputs(bit_names("b", 2));
    CHECK(eval_direct(inc_formula(bits, 1), spaced({1, 2}, 2, 1), atoms));
    CHECK(eval_direct(inc_formula(bits, 1), spaced({3, 1}, 2, 1), atoms));
    CHECK_FALSE(eval_direct(inc_formula(bits, 1), spaced({0, 2}, 2, 1), atoms));
    CHECK(eval_direct(dec_formula(bits, 1), spaced({2, 1}, 2, 1), atoms));
    CHECK(eval_direct(dec_formula(bits, 1), spaced({0, 3}, 2, 1), atoms));
    CHECK_THROWS_AS(inc_formula({}, 1), Error);
    CHECK_THROWS_AS(inc_formula(bits, 0), Error);
}

TEST_CASE("Inc then Dec returns to the start value")
{
    const auto bits = bit_atoms("b", 3);
    const AtomSet atoms = AtomSet::outputs(bit_names("b", 3));
    const std::size_t d = 2;
    const Formula both = make_and(inc_formula(bits, d), make_next_n(dec_formula(bits, d), d));
    for (std::uint64_t v = 1; v <= 6; ++v)
        for (std::uint64_t w = 0; w <= 7; ++w) CHECK(eval_direct(both, spaced({v, v + 1, w}, 3, d), atoms) == (w == v));
}

TEST_CASE("reduction parameters and skeleton")
{
    const NTMachine m = testsupport::load_machine("two_choice");
    const auto r = build_word_reduction(m, {"1"}, 3);
    CHECK(r.k == 19);
    CHECK(r.params.d == 6);
    CHECK(r.params.l_c == 2);
    CHECK(word_reduction_params(m, 1).l_c == 1);
    CHECK(word_reduction_params(m, 4).l_c == 2);
    CHECK(word_reduction_params(m, 5).l_c == 3);
    CHECK_THROWS_AS(word_reduction_params(m, 5, 2), Error);
    CHECK_THROWS_AS(build_word_reduction(m, {"1", "1"}, 1), BoundTooSmall);

    const auto sk = word_skeleton(r.params);
    REQUIRE(sk.size() == 19);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(sk[r.params.block_start(i)].size() == 1);
        CHECK(sk[r.params.block_start(i) + 1].size() == 4);
        CHECK(sk[r.params.block_start(i) + 2].size() == 1);
        for (std::size_t j = 0; j < 3; ++j) CHECK(sk[r.params.cell_pos(i, j)].size() == 6);
    }
    CHECK(sk[18] == std::vector<Letter>{r.params.atoms.letter({"bot"})});

    // Atoms are mangled and disjoint; every atom of the formula is declared.
    CHECK(r.params.atoms.contains("st_q0"));
    CHECK(r.params.atoms.contains("sym_1"));
    CHECK(r.params.atoms.contains("bit_2"));
    CHECK_NOTHROW(check_atoms(r.formula, r.params.atoms));

    const auto man = word_manifest(r.params);
    CHECK(man["k"] == 19);
    CHECK(man["ap_inputs"].empty());
    CHECK(man["skeleton"].size() == 19);
    CHECK(man["skeleton"][0][0] == nlohmann::json::array({"sep_dollar"}));

    // Printed formula parses back to itself.
    CHECK(parse(print(r.formula), r.params.atoms) == r.formula);
}

TEST_CASE("encoded runs satisfy the formula and are distinct")
{
    for (const auto& inst : testsupport::micro_instances()) {
        INFO(inst.name);
        const NTMachine m = testsupport::load_machine(inst.name);
        for (std::size_t l_r = smallest_bound(inst); l_r <= smallest_bound(inst) + 1; ++l_r) {
            INFO("l_r = " << l_r);
            const auto r = build_word_reduction(m, inst.input, l_r);
            const auto runs = enumerate_accepting_runs(m, inst.input, l_r - 1, l_r);
            std::set<std::vector<Letter>> seen;
            const auto sk = word_skeleton(r.params);
            for (const auto& run : runs) {
                const auto w = encode_run_as_word(m, run, r.params);
                CHECK(w.length() == r.k);
                CHECK(w.period.size() == 1);
                CHECK(eval_direct(r.formula, w, r.params.atoms));
                CHECK(eval_backward(r.formula, w, r.params.atoms).first);
                for (std::size_t j = 0; j < r.k; ++j)
                    CHECK(std::count(sk[j].begin(), sk[j].end(), w.at(j)) == 1);
                seen.insert(w.prefix);
            }
            CHECK(seen.size() == runs.size());
        }
    }
}

TEST_CASE("constrained model count equals the accepting-run count")
{
    for (const auto& inst : testsupport::micro_instances()) {
        INFO(inst.name);
        const NTMachine m = testsupport::load_machine(inst.name);
        for (std::size_t l_r = smallest_bound(inst); l_r <= smallest_bound(inst) + 1; ++l_r) {
            INFO("l_r = " << l_r);
            const auto r = build_word_reduction(m, inst.input, l_r);
            const Count models = count_word_models_constrained(r.formula, r.k, r.params.atoms, word_skeleton(r.params));
            CHECK(models == oracle(m, inst.input, l_r));
            if (l_r == smallest_bound(inst)) CHECK(models == inst.runs);
        }
    }
}

TEST_CASE("short bound cuts runs off")
{
    // left needs four configurations; with three only its one-step run remains.
    const NTMachine m = testsupport::load_machine("left");
    const auto r = build_word_reduction(m, {"0", "1"}, 3);
    const Count models = count_word_models_constrained(r.formula, r.k, r.params.atoms, word_skeleton(r.params));
    CHECK(models == oracle(m, {"0", "1"}, 3));
    CHECK(models < 2);
    const auto runs = enumerate_accepting_runs(m, {"0", "1"}, 3, 4);
    const auto longest = *std::max_element(runs.begin(), runs.end(),
                                           [](const RunTrace& a, const RunTrace& b) { return a.steps() < b.steps(); });
    CHECK_THROWS_AS(encode_run_as_word(m, longest, r.params), BoundTooSmall);
}

TEST_CASE("mutating a deterministic run's encoding falsifies the formula")
{
    const NTMachine m = testsupport::load_machine("det");
    const auto r = build_word_reduction(m, {"1"}, 3);
    const auto runs = enumerate_accepting_runs(m, {"1"}, 2, 3);
    REQUIRE(runs.size() == 1);
    const auto w = encode_run_as_word(m, runs[0], r.params);
    const auto sk = word_skeleton(r.params);
    std::size_t tried = 0;
    for (std::size_t j = 0; j + 1 < r.k; ++j)
        for (Letter l : sk[j]) {
            if (l == w.prefix[j]) continue;
            auto v = w;
            v.prefix[j] = l;
            INFO("position " << j);
            CHECK_FALSE(eval_backward(r.formula, v, r.params.atoms).first);
            ++tried;
        }
    CHECK(tried > 0);
}

TEST_CASE("out-of-skeleton corruptions falsify the formula")
{
    std::mt19937_64 rng(7);
    std::size_t done = 0;
    for (const auto& inst : testsupport::micro_instances()) {
        const NTMachine m = testsupport::load_machine(inst.name);
        const std::size_t l_r = smallest_bound(inst);
        const auto r = build_word_reduction(m, inst.input, l_r);
        const auto sk = word_skeleton(r.params);
        const Letter all = r.params.atoms.all_mask();
        for (const auto& run : enumerate_accepting_runs(m, inst.input, l_r - 1, l_r)) {
            const auto w = encode_run_as_word(m, run, r.params);
            for (int i = 0; i < 150; ++i) {
                auto v = w;
                const std::size_t j = rng() % r.k;
                Letter l;
                do l = rng() & all;
                while (std::count(sk[j].begin(), sk[j].end(), l) != 0);
                if (j + 1 < r.k)
                    v.prefix[j] = l;
                else
                    v.period[0] = l;
                CHECK_FALSE(eval_backward(r.formula, v, r.params.atoms).first);
                ++done;
            }
        }
    }
    CHECK(done >= 1000);
}

TEST_CASE("wider counters only add bits")
{
    const NTMachine m = testsupport::load_machine("two_choice");
    const auto narrow = build_word_reduction(m, {"1"}, 3);
    const auto wide = build_word_reduction(m, {"1"}, 3, 5);
    CHECK(wide.k == narrow.k);
    CHECK(wide.params.atoms.size() == narrow.params.atoms.size() + 3);
    CHECK(wide.formula.node_count() > narrow.formula.node_count());
    CHECK(count_word_models_constrained(wide.formula, wide.k, wide.params.atoms, word_skeleton(wide.params)) == 2);
    for (const auto& run : enumerate_accepting_runs(m, {"1"}, 2, 3))
        CHECK(eval_direct(wide.formula, encode_run_as_word(m, run, wide.params), wide.params.atoms));
}
