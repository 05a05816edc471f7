#ifndef LTLCOUNT_WORD_HPP_
#define LTLCOUNT_WORD_HPP_

#include "ltlcount/atoms.hpp"
#include "ltlcount/error.hpp"
#include "ltlcount/formula.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ltlcount
{

/// The lasso u.v^omega given by a prefix u and a nonempty period v. The pair is
/// the counted object: (u, v) and (u.v, v) are different words here even
/// though they induce the same infinite sequence.
struct UltimatelyPeriodicWord
{
    std::vector<Letter> prefix;
    std::vector<Letter> period;

    UltimatelyPeriodicWord() = default;
    UltimatelyPeriodicWord(std::vector<Letter> u, std::vector<Letter> v) : prefix(std::move(u)), period(std::move(v))
    {
        if (period.empty()) throw Error("ultimately periodic word needs a nonempty period");
    }

    std::size_t length() const noexcept { return prefix.size() + period.size(); }
    std::size_t loop_start() const noexcept { return prefix.size(); }

    Letter at(std::size_t j) const { return j < prefix.size() ? prefix[j] : period[j - prefix.size()]; }

    /// Position following j in u.v^omega, folded back into [0, k).
    std::size_t succ(std::size_t j) const noexcept { return j + 1 < length() ? j + 1 : prefix.size(); }

    friend bool operator==(const UltimatelyPeriodicWord&, const UltimatelyPeriodicWord&) = default;
};

inline void check_letters(const UltimatelyPeriodicWord& w, const AtomSet& atoms)
{
    if (w.period.empty()) throw Error("ultimately periodic word needs a nonempty period");
    const Letter all = atoms.all_mask();
    for (std::size_t j = 0; j < w.length(); ++j)
        if ((w.at(j) & ~all) != 0) throw Error("letter uses atoms outside the atom set");
}

namespace detail
{

/// Closure of a desugared formula with children and atoms resolved to indices.
struct IndexedClosure
{
    std::vector<Formula> subs;
    std::vector<int> lhs;
    std::vector<int> rhs;
    std::vector<int> bit;   // atom index for atom nodes

    explicit IndexedClosure(Formula f, const AtomSet& atoms)
    {
        subs = closure(f);
        std::unordered_map<std::uint64_t, int> pos;
        for (std::size_t i = 0; i < subs.size(); ++i) pos.emplace(subs[i].id(), static_cast<int>(i));
        lhs.assign(subs.size(), -1);
        rhs.assign(subs.size(), -1);
        bit.assign(subs.size(), -1);
        for (std::size_t i = 0; i < subs.size(); ++i) {
            Formula g = subs[i];
            if (g.has_lhs()) lhs[i] = pos.at(g.lhs().id());
            if (is_binary(g.op())) rhs[i] = pos.at(g.rhs().id());
            if (g.op() == Op::atom) bit[i] = static_cast<int>(atoms.index_of(g.atom_name()));
        }
    }

    std::size_t size() const noexcept { return subs.size(); }
};

/// Value of a non-temporal closure entry at position j given its children.
inline bool local_value(Op op, const std::vector<std::vector<char>>& val, int l, int r, int bit, Letter letter,
                        std::size_t j)
{
    switch (op) {
    case Op::tt: return true;
    case Op::ff: return false;
    case Op::atom: return ((letter >> bit) & 1U) != 0;
    case Op::neg: return !val[l][j];
    case Op::conj: return val[l][j] && val[r][j];
    case Op::disj: return val[l][j] || val[r][j];
    default: throw std::logic_error("local_value on temporal operator");
    }
}

} // namespace detail

/// Truth of every subformula of `f` at every position, computed directly from
/// the semantics: until/release scan forward along the lasso until a position
/// repeats.
inline std::vector<std::vector<char>> eval_direct_positions(Formula f, const UltimatelyPeriodicWord& w,
                                                            const AtomSet& atoms,
                                                            std::vector<Formula>* subs_out = nullptr)
{
    check_letters(w, atoms);
    detail::IndexedClosure cl(desugar(f), atoms);
    const std::size_t k = w.length();
    std::vector<std::vector<char>> val(cl.size(), std::vector<char>(k, 0));
    for (std::size_t i = 0; i < cl.size(); ++i) {
        const Op op = cl.subs[i].op();
        const int l = cl.lhs[i], r = cl.rhs[i];
        for (std::size_t j = 0; j < k; ++j) {
            switch (op) {
            case Op::next: val[i][j] = val[l][w.succ(j)]; break;
            case Op::until: {
                // Within k steps from j every reachable position has been seen.
                bool holds = false;
                std::size_t t = j;
                for (std::size_t s = 0; s < k; ++s) {
                    if (val[r][t]) {
                        holds = true;
                        break;
                    }
                    if (!val[l][t]) break;
                    t = w.succ(t);
                }
                val[i][j] = holds;
                break;
            }
            case Op::release: {
                bool holds = true;
                std::size_t t = j;
                for (std::size_t s = 0; s < k; ++s) {
                    if (!val[r][t]) {
                        holds = false;
                        break;
                    }
                    if (val[l][t]) break;
                    t = w.succ(t);
                }
                val[i][j] = holds;
                break;
            }
            default: val[i][j] = detail::local_value(op, val, l, r, cl.bit[i], w.at(j), j); break;
            }
        }
    }
    if (subs_out) *subs_out = cl.subs;
    return val;
}

/// u.v^omega |= f under the standard semantics.
inline bool eval_direct(Formula f, const UltimatelyPeriodicWord& w, const AtomSet& atoms)
{
    auto val = eval_direct_positions(f, w, atoms);
    return val.back()[0] != 0;
}

/// Position-indexed sets C_j of closure formulas true at position j.
class SatisfactionTable
{
public:
    SatisfactionTable() = default;
    SatisfactionTable(std::vector<Formula> subs, std::vector<std::vector<char>> member)
        : subs_(std::move(subs)), member_(std::move(member))
    {
        for (std::size_t i = 0; i < subs_.size(); ++i) index_.emplace(subs_[i].id(), i);
    }

    const std::vector<Formula>& closure() const noexcept { return subs_; }
    std::size_t positions() const noexcept { return member_.empty() ? 0 : member_.front().size(); }

    bool contains(std::size_t j, Formula f) const
    {
        auto it = index_.find(f.id());
        if (it == index_.end()) throw Error("formula is not in the closure");
        return member_[it->second][j] != 0;
    }

    /// Members of C_j in closure order.
    std::vector<Formula> at(std::size_t j) const
    {
        std::vector<Formula> out;
        for (std::size_t i = 0; i < subs_.size(); ++i)
            if (member_[i][j]) out.push_back(subs_[i]);
        return out;
    }

private:
    std::vector<Formula> subs_;
    std::vector<std::vector<char>> member_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Checks the local consistency rules between C_j and C_{j+1}, the two
/// wrap-around rules relating C_{k-1} with C_{|u|}, letter consistency, and
/// the eventuality requirement for until-formulas on the period.
inline bool table_is_consistent(const SatisfactionTable& t, const UltimatelyPeriodicWord& w, const AtomSet& atoms)
{
    const auto& subs = t.closure();
    const std::size_t k = w.length();
    const std::size_t loop = w.loop_start();
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t nj = w.succ(j);
        for (Formula g : subs) {
            const bool in = t.contains(j, g);
            bool expect = in;
            switch (g.op()) {
            case Op::tt: expect = true; break;
            case Op::ff: expect = false; break;
            case Op::atom: expect = ((w.at(j) >> atoms.index_of(g.atom_name())) & 1U) != 0; break;
            case Op::neg: expect = !t.contains(j, g.child()); break;
            case Op::conj: expect = t.contains(j, g.lhs()) && t.contains(j, g.rhs()); break;
            case Op::disj: expect = t.contains(j, g.lhs()) || t.contains(j, g.rhs()); break;
            case Op::next: expect = t.contains(nj, g.child()); break;
            case Op::until:
                expect = t.contains(j, g.rhs()) || (t.contains(j, g.lhs()) && t.contains(nj, g));
                break;
            case Op::release:
                expect = t.contains(j, g.rhs()) && (t.contains(j, g.lhs()) || t.contains(nj, g));
                break;
            default: return false;
            }
            if (in != expect) return false;
        }
    }
    for (Formula g : subs) {
        if (g.op() != Op::until && g.op() != Op::release) continue;
        bool pending = false, fulfilled = false;
        for (std::size_t j = loop; j < k; ++j) {
            if (g.op() == Op::until) {
                pending = pending || t.contains(j, g);
                fulfilled = fulfilled || t.contains(j, g.rhs());
            } else {
                // Dual: a release that fails somewhere on the cycle must see its
                // right operand fail somewhere on the cycle.
                pending = pending || !t.contains(j, g);
                fulfilled = fulfilled || !t.contains(j, g.rhs());
            }
        }
        if (pending && !fulfilled) return false;
    }
    return true;
}

namespace detail
{

/// Backward propagation of the sets C_j over a precompiled closure; writes
/// val[i][j] = (subformula i holds at position j).
inline void backward_values(const IndexedClosure& cl, const UltimatelyPeriodicWord& w,
                            std::vector<std::vector<char>>& val)
{
    const std::size_t k = w.length();
    const std::size_t loop = w.loop_start();
    val.resize(cl.size());
    for (std::size_t i = 0; i < cl.size(); ++i) {
        const Op op = cl.subs[i].op();
        const int l = cl.lhs[i], r = cl.rhs[i];
        auto& v = val[i];
        v.assign(k, 0);
        if (op == Op::next) {
            for (std::size_t j = k; j-- > 0;) v[j] = val[l][w.succ(j)];
        } else if (op == Op::until || op == Op::release) {
            const bool is_until = op == Op::until;
            auto step = [&](std::size_t j, bool next) -> char {
                return is_until ? static_cast<char>(val[r][j] || (val[l][j] && next))
                                : static_cast<char>(val[r][j] && (val[l][j] || next));
            };
            // Start from the fixpoint's extreme value at the wrap target and
            // sweep the cycle backwards until the wrap value is stable.
            bool at_loop = !is_until;
            for (;;) {
                bool next = at_loop;
                for (std::size_t j = k; j-- > loop;) {
                    v[j] = step(j, next);
                    next = v[j] != 0;
                }
                if ((v[loop] != 0) == at_loop) break;
                at_loop = v[loop] != 0;
            }
            for (std::size_t j = loop; j-- > 0;) v[j] = step(j, v[j + 1] != 0);
        } else {
            for (std::size_t j = k; j-- > 0;) v[j] = local_value(op, val, l, r, cl.bit[i], w.at(j), j);
        }
    }
}

} // namespace detail

/// Backward propagation of the sets C_j. The guess of C_{k-1} is determinized
/// per subformula: until is the least and release the greatest fixpoint of
/// its local rule over the period, found by repeated backward sweeps.
inline std::pair<bool, SatisfactionTable> eval_backward(Formula f, const UltimatelyPeriodicWord& w,
                                                        const AtomSet& atoms)
{
    check_letters(w, atoms);
    detail::IndexedClosure cl(desugar(f), atoms);
    std::vector<std::vector<char>> val;
    detail::backward_values(cl, w, val);
    const bool holds = val.back()[0] != 0;
    return {holds, SatisfactionTable(cl.subs, std::move(val))};
}

} // namespace ltlcount

#endif // LTLCOUNT_WORD_HPP_
