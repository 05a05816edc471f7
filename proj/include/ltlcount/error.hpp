#ifndef LTLCOUNT_ERROR_HPP_
#define LTLCOUNT_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltlcount
{

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed formula text; carries a 1-based line/column.
class ParseError : public Error
{
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line),
          column_(column)
    {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class UnknownAtomError : public Error
{
public:
    using Error::Error;
};

/// Counting refused because the candidate space exceeds the caller's budget.
class BudgetExceeded : public Error
{
public:
    using Error::Error;
};

/// Tableau construction refused because the closure is too large.
class CapExceeded : public Error
{
public:
    using Error::Error;
};

class NotInFragment : public Error
{
public:
    using Error::Error;
};

/// A machine run does not fit the bounds chosen for a reduction.
class BoundTooSmall : public Error
{
public:
    BoundTooSmall(const std::string& what, std::size_t run_length)
        : Error(what), run_length_(run_length)
    {}
    std::size_t run_length() const noexcept { return run_length_; }

private:
    std::size_t run_length_;
};

class SpaceBoundError : public Error
{
public:
    using Error::Error;
};

class FormatError : public Error
{
public:
    using Error::Error;
};

} // namespace ltlcount

#endif // LTLCOUNT_ERROR_HPP_
