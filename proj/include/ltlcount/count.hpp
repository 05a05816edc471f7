#ifndef LTLCOUNT_COUNT_HPP_
#define LTLCOUNT_COUNT_HPP_

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace ltlcount
{

/// Exact natural number; model counts overflow any machine word quickly.
using Count = boost::multiprecision::cpp_int;

inline std::string to_decimal(const Count& c) { return c.str(); }

inline Count pow_count(const Count& base, std::uint64_t exp)
{
    Count result = 1;
    Count b = base;
    while (exp != 0) {
        if (exp & 1U) result *= b;
        exp >>= 1U;
        if (exp != 0) b *= b;
    }
    return result;
}

/// Saturating power: stops multiplying once the value exceeds `cap`.
inline Count pow_capped(const Count& base, std::uint64_t exp, const Count& cap)
{
    Count result = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        result *= base;
        if (result > cap) return result;
    }
    return result;
}

} // namespace ltlcount

#endif // LTLCOUNT_COUNT_HPP_
