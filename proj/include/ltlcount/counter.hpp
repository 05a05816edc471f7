#ifndef LTLCOUNT_COUNTER_HPP_
#define LTLCOUNT_COUNTER_HPP_

#include "ltlcount/error.hpp"
#include "ltlcount/formula.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ltlcount
{

// Binary counters over atoms b_1..b_l; b_1 is the most significant bit.

/// The bits encode exactly the value h.
inline Formula delta_formula(const std::vector<Formula>& bits, std::uint64_t h)
{
    const std::size_t l = bits.size();
    if (l < 64 && h >= (std::uint64_t{1} << l)) throw Error("value does not fit the counter width");
    std::vector<Formula> lits;
    for (std::size_t i = 0; i < l; ++i) {
        const bool one = ((h >> (l - 1 - i)) & 1U) != 0;
        lits.push_back(one ? bits[i] : make_not(bits[i]));
    }
    return conjunction(lits);
}

/// Unless all bits are one, the value d steps ahead is the current value plus one.
inline Formula inc_formula(const std::vector<Formula>& bits, std::size_t d)
{
    if (bits.empty() || d == 0) throw Error("counter needs at least one bit and a positive distance");
    std::vector<Formula> not_all, cases;
    for (Formula b : bits) not_all.push_back(make_not(b));
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const Formula b = bits[i];
        std::vector<Formula> lower(bits.begin() + static_cast<std::ptrdiff_t>(i) + 1, bits.end());
        const Formula carry = conjunction(lower);   // all less significant bits are one
        cases.push_back(make_implies(make_and(make_not(b), carry), make_next_n(b, d)));
        cases.push_back(make_implies(make_and(make_not(b), make_not(carry)), make_next_n(make_not(b), d)));
        cases.push_back(make_implies(make_and(b, carry), make_next_n(make_not(b), d)));
        cases.push_back(make_implies(make_and(b, make_not(carry)), make_next_n(b, d)));
    }
    return make_implies(disjunction(not_all), conjunction(cases));
}

/// Unless all bits are zero, the value d steps ahead is the current value minus one.
inline Formula dec_formula(const std::vector<Formula>& bits, std::size_t d)
{
    if (bits.empty() || d == 0) throw Error("counter needs at least one bit and a positive distance");
    std::vector<Formula> cases;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const Formula b = bits[i];
        std::vector<Formula> lower;
        for (std::size_t j = i + 1; j < bits.size(); ++j) lower.push_back(make_not(bits[j]));
        const Formula borrow = conjunction(lower);   // all less significant bits are zero
        cases.push_back(make_implies(make_and(make_not(b), borrow), make_next_n(b, d)));
        cases.push_back(make_implies(make_and(make_not(b), make_not(borrow)), make_next_n(make_not(b), d)));
        cases.push_back(make_implies(make_and(b, borrow), make_next_n(make_not(b), d)));
        cases.push_back(make_implies(make_and(b, make_not(borrow)), make_next_n(b, d)));
    }
    return make_implies(disjunction(bits), conjunction(cases));
}

/// Atoms named prefix1..prefixN.
inline std::vector<Formula> bit_atoms(const std::string& prefix, std::size_t n)
{
    std::vector<Formula> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back(make_atom(prefix + std::to_string(i)));
    return out;
}

inline std::vector<std::string> bit_names(const std::string& prefix, std::size_t n)
{
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

/// Smallest w >= 1 with 2^w >= n.
inline std::size_t ceil_log2(std::uint64_t n)
{
    std::size_t w = 0;
    while (w < 63 && (std::uint64_t{1} << w) < n) ++w;
    return w;
}

} // namespace ltlcount

#endif // LTLCOUNT_COUNTER_HPP_
