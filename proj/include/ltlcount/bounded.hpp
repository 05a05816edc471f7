#ifndef LTLCOUNT_BOUNDED_HPP_
#define LTLCOUNT_BOUNDED_HPP_

#include "ltlcount/atoms.hpp"
#include "ltlcount/error.hpp"
#include "ltlcount/formula.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace ltlcount
{

/// Kleene truth value used when only part of a trace is known.
enum class Tri : std::uint8_t { no = 0, yes = 1, unknown = 2 };

inline Tri tri_not(Tri a)
{
    return a == Tri::unknown ? Tri::unknown : (a == Tri::yes ? Tri::no : Tri::yes);
}

/// A next-bounded formula with every next pushed down to its literals, so the
/// formula becomes a boolean combination of (atom, offset) literals. Deep
/// next-chains cost nothing at evaluation time.
class BoundedFormula
{
public:
    enum class Kind : std::uint8_t { tt, ff, lit, neg, conj, disj, implies, iff };

    struct Node
    {
        Kind kind;
        int atom;
        std::uint32_t offset;
        int a;
        int b;
    };

    BoundedFormula() = default;

    BoundedFormula(Formula f, const AtomSet& atoms)
    {
        if (!f.is_bounded()) throw NotInFragment("formula is not next-bounded: " + print(f));
        root_ = compile(f, 0, atoms);
        std::sort(offsets_.begin(), offsets_.end());
        offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
    }

    /// Largest offset of any literal.
    std::uint32_t depth() const noexcept { return depth_; }
    /// Distinct literal offsets, ascending.
    const std::vector<std::uint32_t>& offsets() const noexcept { return offsets_; }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }

    /// Evaluates with `lit(atom, offset) -> Tri`, short-circuiting.
    template <typename Lit>
    Tri eval(Lit&& lit) const
    {
        return eval_node(root_, lit);
    }

private:
    int compile(Formula f, std::uint32_t offset, const AtomSet& atoms)
    {
        while (f.op() == Op::next) {
            ++offset;
            f = f.child();
        }
        auto key = std::make_pair(f.id(), offset);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        Node n{Kind::tt, -1, offset, -1, -1};
        switch (f.op()) {
        case Op::tt: n.kind = Kind::tt; break;
        case Op::ff: n.kind = Kind::ff; break;
        case Op::atom:
            n.kind = Kind::lit;
            n.atom = static_cast<int>(atoms.index_of(f.atom_name()));
            depth_ = std::max(depth_, offset);
            offsets_.push_back(offset);
            break;
        case Op::neg:
            n.kind = Kind::neg;
            n.a = compile(f.child(), offset, atoms);
            break;
        case Op::conj:
        case Op::disj:
        case Op::implies:
        case Op::iff:
            n.kind = f.op() == Op::conj      ? Kind::conj
                     : f.op() == Op::disj    ? Kind::disj
                     : f.op() == Op::implies ? Kind::implies
                                             : Kind::iff;
            n.a = compile(f.lhs(), offset, atoms);
            n.b = compile(f.rhs(), offset, atoms);
            break;
        default: throw NotInFragment("temporal operator inside a bounded formula");
        }
        nodes_.push_back(n);
        const int id = static_cast<int>(nodes_.size() - 1);
        memo_.emplace(key, id);
        return id;
    }

    template <typename Lit>
    Tri eval_node(int i, Lit& lit) const
    {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        switch (n.kind) {
        case Kind::tt: return Tri::yes;
        case Kind::ff: return Tri::no;
        case Kind::lit: return lit(n.atom, n.offset);
        case Kind::neg: return tri_not(eval_node(n.a, lit));
        case Kind::conj: {
            Tri x = eval_node(n.a, lit);
            if (x == Tri::no) return Tri::no;
            Tri y = eval_node(n.b, lit);
            if (y == Tri::no) return Tri::no;
            return (x == Tri::yes && y == Tri::yes) ? Tri::yes : Tri::unknown;
        }
        case Kind::disj: {
            Tri x = eval_node(n.a, lit);
            if (x == Tri::yes) return Tri::yes;
            Tri y = eval_node(n.b, lit);
            if (y == Tri::yes) return Tri::yes;
            return (x == Tri::no && y == Tri::no) ? Tri::no : Tri::unknown;
        }
        case Kind::implies: {
            Tri x = eval_node(n.a, lit);
            if (x == Tri::no) return Tri::yes;
            Tri y = eval_node(n.b, lit);
            if (y == Tri::yes) return Tri::yes;
            return (x == Tri::yes && y == Tri::no) ? Tri::no : Tri::unknown;
        }
        case Kind::iff: {
            Tri x = eval_node(n.a, lit);
            if (x == Tri::unknown) return Tri::unknown;
            Tri y = eval_node(n.b, lit);
            if (y == Tri::unknown) return Tri::unknown;
            return x == y ? Tri::yes : Tri::no;
        }
        }
        return Tri::unknown;
    }

    std::vector<Node> nodes_;
    int root_ = -1;
    std::uint32_t depth_ = 0;
    std::vector<std::uint32_t> offsets_;
    std::map<std::pair<std::uint64_t, std::uint32_t>, int> memo_;
};

/// A bounded obligation extracted from a formula: `body` must hold at position
/// `from` (or, if `global`, at every position from `from` on).
struct BoundedObligation
{
    Formula body;
    std::size_t from = 0;
    bool global = false;
};

/// Splits the top-level conjunction of f into bounded obligations, pushing
/// next and globally through conjunctions. Conjuncts that are not of this shape
/// are returned in `rest`.
inline std::vector<BoundedObligation> bounded_obligations(Formula f, std::vector<Formula>* rest = nullptr)
{
    std::vector<BoundedObligation> out;
    struct Item
    {
        Formula f;
        std::size_t offset;
        bool global;
    };
    std::vector<Item> stack{{f, 0, false}};
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        Formula g = it.f;
        if (g.op() == Op::conj) {
            stack.push_back({g.rhs(), it.offset, it.global});
            stack.push_back({g.lhs(), it.offset, it.global});
        } else if (g.op() == Op::next) {
            stack.push_back({g.child(), it.offset + 1, it.global});
        } else if (g.op() == Op::globally) {
            stack.push_back({g.child(), it.offset, true});
        } else if (g.op() == Op::release && g.lhs().op() == Op::ff) {
            stack.push_back({g.rhs(), it.offset, true});
        } else if (g.is_bounded()) {
            out.push_back({g, it.offset, it.global});
        } else if (rest) {
            rest->push_back(make_next_n(it.global ? make_globally(g) : g, it.offset));
        }
    }
    return out;
}

} // namespace ltlcount

#endif // LTLCOUNT_BOUNDED_HPP_
