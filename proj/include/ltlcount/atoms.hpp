#ifndef LTLCOUNT_ATOMS_HPP_
#define LTLCOUNT_ATOMS_HPP_

#include "ltlcount/error.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ltlcount
{

enum class AtomKind : std::uint8_t { input, output };

struct Atom
{
    std::string name;
    AtomKind kind = AtomKind::output;

    friend bool operator==(const Atom&, const Atom&) = default;
};

inline bool is_identifier(std::string_view s)
{
    if (s.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s.front())) return false;
    return std::all_of(s.begin() + 1, s.end(), [&](char c) { return alpha(c) || digit(c); });
}

/// Words reserved by the formula grammar; they cannot name atoms.
inline bool is_reserved_word(std::string_view s)
{
    return s == "X" || s == "F" || s == "G" || s == "U" || s == "R" || s == "true" || s == "false";
}

/// A letter is a subset of an AtomSet, stored as a bit mask over atom indices.
using Letter = std::uint64_t;

inline constexpr std::size_t max_atoms = 64;

/// Ordered, duplicate-free set of atoms partitioned into inputs and outputs.
/// Atom i corresponds to bit i of a Letter.
class AtomSet
{
public:
    AtomSet() = default;

    AtomSet(std::initializer_list<Atom> atoms)
    {
        for (const auto& a : atoms) add(a.name, a.kind);
    }

    static AtomSet outputs(const std::vector<std::string>& names)
    {
        AtomSet s;
        for (const auto& n : names) s.add(n, AtomKind::output);
        return s;
    }

    static AtomSet from(const std::vector<std::string>& inputs, const std::vector<std::string>& outputs)
    {
        AtomSet s;
        for (const auto& n : inputs) s.add(n, AtomKind::input);
        for (const auto& n : outputs) s.add(n, AtomKind::output);
        return s;
    }

    std::size_t add(const std::string& name, AtomKind kind)
    {
        if (!is_identifier(name) || is_reserved_word(name))
            throw Error("invalid atom name '" + name + "'");
        if (index_.count(name) != 0) throw Error("duplicate atom '" + name + "'");
        if (atoms_.size() >= max_atoms)
            throw Error("atom sets are limited to " + std::to_string(max_atoms) + " atoms");
        index_.emplace(name, atoms_.size());
        atoms_.push_back(Atom{name, kind});
        return atoms_.size() - 1;
    }

    std::size_t size() const noexcept { return atoms_.size(); }
    bool empty() const noexcept { return atoms_.empty(); }
    const Atom& operator[](std::size_t i) const { return atoms_[i]; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    auto begin() const { return atoms_.begin(); }
    auto end() const { return atoms_.end(); }

    std::optional<std::size_t> find(std::string_view name) const
    {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t index_of(std::string_view name) const
    {
        auto i = find(name);
        if (!i) throw UnknownAtomError("unknown atom '" + std::string(name) + "'");
        return *i;
    }

    bool contains(std::string_view name) const { return find(name).has_value(); }

    Letter all_mask() const noexcept
    {
        return atoms_.size() == 64 ? ~Letter{0} : ((Letter{1} << atoms_.size()) - 1);
    }

    Letter kind_mask(AtomKind kind) const noexcept
    {
        Letter m = 0;
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if (atoms_[i].kind == kind) m |= Letter{1} << i;
        return m;
    }

    std::vector<std::string> names(AtomKind kind) const
    {
        std::vector<std::string> out;
        for (const auto& a : atoms_)
            if (a.kind == kind) out.push_back(a.name);
        return out;
    }

    Letter letter(const std::vector<std::string>& names) const
    {
        Letter l = 0;
        for (const auto& n : names) l |= Letter{1} << index_of(n);
        return l;
    }

    /// Sorted atom names of a letter.
    std::vector<std::string> letter_names(Letter l) const
    {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if ((l >> i) & 1U) out.push_back(atoms_[i].name);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::string format_letter(Letter l) const
    {
        std::string s = "{";
        bool first = true;
        for (const auto& n : letter_names(l)) {
            if (!first) s += ",";
            s += n;
            first = false;
        }
        return s + "}";
    }

    friend bool operator==(const AtomSet& a, const AtomSet& b) { return a.atoms_ == b.atoms_; }

private:
    std::vector<Atom> atoms_;
    std::unordered_map<std::string, std::size_t> index_;
};

} // namespace ltlcount

#endif // LTLCOUNT_ATOMS_HPP_
