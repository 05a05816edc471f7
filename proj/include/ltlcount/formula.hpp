#ifndef LTLCOUNT_FORMULA_HPP_
#define LTLCOUNT_FORMULA_HPP_

#include "ltlcount/atoms.hpp"
#include "ltlcount/error.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ltlcount
{

enum class Op : std::uint8_t {
    tt,
    ff,
    atom,
    neg,
    conj,
    disj,
    implies,
    iff,
    next,
    until,
    release,
    eventually,
    globally,
};

inline bool is_binary(Op op)
{
    switch (op) {
    case Op::conj:
    case Op::disj:
    case Op::implies:
    case Op::iff:
    case Op::until:
    case Op::release:
        return true;
    default:
        return false;
    }
}

inline bool is_unary(Op op)
{
    return op == Op::neg || op == Op::next || op == Op::eventually || op == Op::globally;
}

namespace detail
{

struct Node
{
    Op op;
    std::string atom;
    const Node* lhs;
    const Node* rhs;
    std::uint64_t id;
    std::uint32_t x_depth;
    bool bounded;          // no until/release/eventually/globally below
    std::uint64_t size;    // syntactic tree size, saturating
};

/// Process-wide hash-consing table. Nodes are never freed, so structurally
/// equal formulas share one node and equality is pointer identity.
class NodeTable
{
public:
    static NodeTable& instance()
    {
        static NodeTable table;
        return table;
    }

    const Node* make(Op op, std::string_view atom, const Node* lhs, const Node* rhs)
    {
        Key key{op, std::string(atom), lhs ? lhs->id : 0, rhs ? rhs->id : 0};
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        std::uint32_t xd = 0;
        bool bounded = true;
        std::uint64_t size = 1;
        for (const Node* c : {lhs, rhs}) {
            if (c == nullptr) continue;
            xd = std::max(xd, c->x_depth);
            bounded = bounded && c->bounded;
            size = saturating_add(size, c->size);
        }
        if (op == Op::next) ++xd;
        if (op == Op::until || op == Op::release || op == Op::eventually || op == Op::globally)
            bounded = false;
        nodes_.push_back(Node{op, std::string(atom), lhs, rhs, nodes_.size() + 1, xd, bounded, size});
        const Node* n = &nodes_.back();
        index_.emplace(std::move(key), n);
        return n;
    }

private:
    struct Key
    {
        Op op;
        std::string atom;
        std::uint64_t lhs;
        std::uint64_t rhs;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash
    {
        std::size_t operator()(const Key& k) const noexcept
        {
            std::size_t h = std::hash<std::string>{}(k.atom);
            h ^= static_cast<std::size_t>(k.op) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h ^= std::hash<std::uint64_t>{}(k.lhs) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h ^= std::hash<std::uint64_t>{}(k.rhs) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            return h;
        }
    };

    static std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b)
    {
        return a > UINT64_MAX - b ? UINT64_MAX : a + b;
    }

    std::mutex mutex_;
    std::deque<Node> nodes_;
    std::unordered_map<Key, const Node*, KeyHash> index_;
};

} // namespace detail

/// Immutable LTL formula handle. Two handles compare equal iff the formulas
/// are structurally equal.
class Formula
{
public:
    Formula() : node_(detail::NodeTable::instance().make(Op::tt, "", nullptr, nullptr)) {}

    Op op() const noexcept { return node_->op; }
    const std::string& atom_name() const noexcept { return node_->atom; }
    Formula lhs() const { return Formula(node_->lhs); }
    Formula rhs() const { return Formula(node_->rhs); }
    /// Operand of a unary operator.
    Formula child() const { return Formula(node_->lhs); }
    bool has_lhs() const noexcept { return node_->lhs != nullptr; }

    std::uint64_t id() const noexcept { return node_->id; }
    /// Maximal nesting of next along any branch.
    std::uint32_t x_depth() const noexcept { return node_->x_depth; }
    /// True iff the formula contains no until/release/eventually/globally.
    bool is_bounded() const noexcept { return node_->bounded; }
    std::uint64_t node_count() const noexcept { return node_->size; }

    friend bool operator==(Formula a, Formula b) noexcept { return a.node_ == b.node_; }
    friend bool operator!=(Formula a, Formula b) noexcept { return a.node_ != b.node_; }
    friend bool operator<(Formula a, Formula b) noexcept { return a.node_->id < b.node_->id; }

    static Formula make(Op op, std::string_view atom = "", const Formula* lhs = nullptr,
                        const Formula* rhs = nullptr)
    {
        return Formula(detail::NodeTable::instance().make(op, atom, lhs ? lhs->node_ : nullptr,
                                                          rhs ? rhs->node_ : nullptr));
    }

private:
    explicit Formula(const detail::Node* n) : node_(n) {}
    const detail::Node* node_;
};

struct FormulaHash
{
    std::size_t operator()(Formula f) const noexcept { return std::hash<std::uint64_t>{}(f.id()); }
};

// ---------------------------------------------------------------------------
// Builders

inline Formula make_true() { return Formula::make(Op::tt); }
inline Formula make_false() { return Formula::make(Op::ff); }
inline Formula make_atom(std::string_view name) { return Formula::make(Op::atom, name); }
inline Formula make_not(Formula f) { return Formula::make(Op::neg, "", &f); }
inline Formula make_and(Formula a, Formula b) { return Formula::make(Op::conj, "", &a, &b); }
inline Formula make_or(Formula a, Formula b) { return Formula::make(Op::disj, "", &a, &b); }
inline Formula make_implies(Formula a, Formula b) { return Formula::make(Op::implies, "", &a, &b); }
inline Formula make_iff(Formula a, Formula b) { return Formula::make(Op::iff, "", &a, &b); }
inline Formula make_next(Formula f) { return Formula::make(Op::next, "", &f); }
inline Formula make_until(Formula a, Formula b) { return Formula::make(Op::until, "", &a, &b); }
inline Formula make_release(Formula a, Formula b) { return Formula::make(Op::release, "", &a, &b); }
inline Formula make_eventually(Formula f) { return Formula::make(Op::eventually, "", &f); }
inline Formula make_globally(Formula f) { return Formula::make(Op::globally, "", &f); }

/// X^n f as n nested next nodes.
inline Formula make_next_n(Formula f, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) f = make_next(f);
    return f;
}

/// Left-nested conjunction; the empty conjunction is true.
inline Formula conjunction(const std::vector<Formula>& fs)
{
    if (fs.empty()) return make_true();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = make_and(acc, fs[i]);
    return acc;
}

/// Left-nested disjunction; the empty disjunction is false.
inline Formula disjunction(const std::vector<Formula>& fs)
{
    if (fs.empty()) return make_false();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = make_or(acc, fs[i]);
    return acc;
}

// ---------------------------------------------------------------------------
// Printing

namespace detail
{

inline const char* unary_symbol(Op op)
{
    switch (op) {
    case Op::neg: return "!";
    case Op::next: return "X";
    case Op::eventually: return "F";
    case Op::globally: return "G";
    default: return "?";
    }
}

inline const char* binary_symbol(Op op)
{
    switch (op) {
    case Op::conj: return "&";
    case Op::disj: return "|";
    case Op::implies: return "->";
    case Op::iff: return "<->";
    case Op::until: return "U";
    case Op::release: return "R";
    default: return "?";
    }
}

} // namespace detail

/// Fully parenthesized text form, e.g. "(p U q)", "(X (X p))".
inline std::string print(Formula f)
{
    std::string out;
    // Explicit stack: long next-chains must not exhaust the call stack.
    struct Frame
    {
        Formula f;
        int stage;
    };
    std::vector<Frame> stack{{f, 0}};
    while (!stack.empty()) {
        Frame& fr = stack.back();
        Formula g = fr.f;
        switch (g.op()) {
        case Op::tt: out += "true"; stack.pop_back(); continue;
        case Op::ff: out += "false"; stack.pop_back(); continue;
        case Op::atom: out += g.atom_name(); stack.pop_back(); continue;
        default: break;
        }
        if (is_unary(g.op())) {
            if (fr.stage == 0) {
                out += "(";
                out += detail::unary_symbol(g.op());
                out += " ";
                fr.stage = 1;
                stack.push_back({g.child(), 0});
            } else {
                out += ")";
                stack.pop_back();
            }
        } else {
            if (fr.stage == 0) {
                out += "(";
                fr.stage = 1;
                stack.push_back({g.lhs(), 0});
            } else if (fr.stage == 1) {
                out += " ";
                out += detail::binary_symbol(g.op());
                out += " ";
                fr.stage = 2;
                stack.push_back({g.rhs(), 0});
            } else {
                out += ")";
                stack.pop_back();
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail
{

class Parser
{
public:
    /// Without an atom set every identifier is accepted as an atom.
    Parser(std::string_view text, const AtomSet* atoms) : text_(text), atoms_(atoms) {}

    Formula parse_all()
    {
        Formula f = parse_implication();
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return f;
    }

private:
    enum class Tok { end, ident, lparen, rparen, bang, amp, bar, arrow, dbl_arrow, other };

    [[noreturn]] void fail(const std::string& msg) const
    {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(msg, line, col);
    }

    void skip_ws()
    {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
            ++pos_;
    }

    static bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

    /// Classifies the next token without consuming it; `word` receives identifiers.
    Tok peek(std::string_view* word = nullptr)
    {
        skip_ws();
        if (pos_ >= text_.size()) return Tok::end;
        char c = text_[pos_];
        if (ident_start(c)) {
            std::size_t e = pos_;
            while (e < text_.size() && ident_char(text_[e])) ++e;
            if (word) *word = text_.substr(pos_, e - pos_);
            return Tok::ident;
        }
        switch (c) {
        case '(': return Tok::lparen;
        case ')': return Tok::rparen;
        case '!': return Tok::bang;
        case '&': return Tok::amp;
        case '|': return Tok::bar;
        case '-':
            if (text_.substr(pos_, 2) == "->") return Tok::arrow;
            return Tok::other;
        case '<':
            if (text_.substr(pos_, 3) == "<->") return Tok::dbl_arrow;
            return Tok::other;
        default: return Tok::other;
        }
    }

    bool peek_word(std::string_view w)
    {
        std::string_view word;
        return peek(&word) == Tok::ident && word == w;
    }

    Formula parse_implication()
    {
        Formula lhs = parse_or();
        Tok t = peek();
        if (t == Tok::arrow) {
            pos_ += 2;
            return make_implies(lhs, parse_implication());
        }
        if (t == Tok::dbl_arrow) {
            pos_ += 3;
            return make_iff(lhs, parse_implication());
        }
        return lhs;
    }

    Formula parse_or()
    {
        Formula acc = parse_and();
        while (peek() == Tok::bar) {
            ++pos_;
            acc = make_or(acc, parse_and());
        }
        return acc;
    }

    Formula parse_and()
    {
        Formula acc = parse_temporal();
        while (peek() == Tok::amp) {
            ++pos_;
            acc = make_and(acc, parse_temporal());
        }
        return acc;
    }

    Formula parse_temporal()
    {
        Formula lhs = parse_unary();
        if (peek_word("U")) {
            ++pos_;
            return make_until(lhs, parse_temporal());
        }
        if (peek_word("R")) {
            ++pos_;
            return make_release(lhs, parse_temporal());
        }
        return lhs;
    }

    Formula parse_unary()
    {
        std::vector<Op> prefix;
        for (;;) {
            std::string_view word;
            Tok t = peek(&word);
            if (t == Tok::bang) {
                ++pos_;
                prefix.push_back(Op::neg);
            } else if (t == Tok::ident && (word == "X" || word == "F" || word == "G")) {
                pos_ += 1;
                prefix.push_back(word == "X" ? Op::next : word == "F" ? Op::eventually : Op::globally);
            } else {
                break;
            }
        }
        Formula f = parse_primary();
        for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) f = Formula::make(*it, "", &f);
        return f;
    }

    Formula parse_primary()
    {
        std::string_view word;
        Tok t = peek(&word);
        switch (t) {
        case Tok::lparen: {
            ++pos_;
            Formula f = parse_implication();
            if (peek() != Tok::rparen) fail("expected ')'");
            ++pos_;
            return f;
        }
        case Tok::ident: {
            if (word == "true") {
                pos_ += word.size();
                return make_true();
            }
            if (word == "false") {
                pos_ += word.size();
                return make_false();
            }
            if (is_reserved_word(word)) fail("operator '" + std::string(word) + "' is missing an operand");
            if (atoms_ && !atoms_->contains(word)) {
                throw UnknownAtomError("unknown atom '" + std::string(word) + "'");
            }
            pos_ += word.size();
            return make_atom(word);
        }
        case Tok::end: fail("unexpected end of input");
        default: fail("unexpected token");
        }
    }

    std::string_view text_;
    const AtomSet* atoms_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses formula text. Unary `!`, `X`, `F`, `G` bind tightest; then
/// right-associative `U`/`R`; then `&`; then `|`; then right-associative
/// `->`/`<->`.
inline Formula parse(std::string_view text, const AtomSet& atoms)
{
    return detail::Parser(text, &atoms).parse_all();
}

/// Parses formula text taking every identifier as an atom.
inline Formula parse_any(std::string_view text) { return detail::Parser(text, nullptr).parse_all(); }

// ---------------------------------------------------------------------------
// Rewriting

/// Distinct subformulas in post-order (children before parents, left before
/// right). Iterative, so arbitrarily long next-chains are fine.
inline std::vector<Formula> closure(Formula f)
{
    std::vector<Formula> order;
    std::unordered_set<std::uint64_t> seen;
    struct Frame
    {
        Formula f;
        int stage;
    };
    std::vector<Frame> stack{{f, 0}};
    while (!stack.empty()) {
        Frame& fr = stack.back();
        Formula g = fr.f;
        if (fr.stage == 0 && seen.count(g.id()) != 0) {
            stack.pop_back();
            continue;
        }
        if (fr.stage == 0) {
            fr.stage = 1;
            if (g.has_lhs()) {
                stack.push_back({g.lhs(), 0});
                continue;
            }
        }
        if (fr.stage == 1) {
            fr.stage = 2;
            if (is_binary(g.op())) {
                stack.push_back({g.rhs(), 0});
                continue;
            }
        }
        if (seen.insert(g.id()).second) order.push_back(g);
        stack.pop_back();
    }
    return order;
}

/// Negations pushed onto atoms; F, G, -> and <-> replaced by U, R, & and |.
/// Computed bottom-up over the closure for both polarities.
inline Formula negation_normal_form(Formula f)
{
    std::unordered_map<std::uint64_t, std::pair<Formula, Formula>> nnf;   // (positive, negated)
    for (Formula g : closure(f)) {
        auto get = [&](Formula h) { return nnf.at(h.id()); };
        Formula p, n;
        switch (g.op()) {
        case Op::tt: p = make_true(); n = make_false(); break;
        case Op::ff: p = make_false(); n = make_true(); break;
        case Op::atom: p = g; n = make_not(g); break;
        case Op::neg: std::tie(n, p) = get(g.child()); break;
        case Op::conj:
        case Op::disj:
        case Op::implies:
        case Op::iff:
        case Op::until:
        case Op::release: {
            auto [a, na] = get(g.lhs());
            auto [b, nb] = get(g.rhs());
            switch (g.op()) {
            case Op::conj: p = make_and(a, b); n = make_or(na, nb); break;
            case Op::disj: p = make_or(a, b); n = make_and(na, nb); break;
            case Op::implies: p = make_or(na, b); n = make_and(a, nb); break;
            case Op::iff:
                p = make_or(make_and(a, b), make_and(na, nb));
                n = make_or(make_and(a, nb), make_and(na, b));
                break;
            case Op::until: p = make_until(a, b); n = make_release(na, nb); break;
            default: p = make_release(a, b); n = make_until(na, nb); break;
            }
            break;
        }
        case Op::next: {
            auto [a, na] = get(g.child());
            p = make_next(a);
            n = make_next(na);
            break;
        }
        case Op::eventually: {
            auto [a, na] = get(g.child());
            p = make_until(make_true(), a);
            n = make_release(make_false(), na);
            break;
        }
        case Op::globally: {
            auto [a, na] = get(g.child());
            p = make_release(make_false(), a);
            n = make_until(make_true(), na);
            break;
        }
        }
        nnf.emplace(g.id(), std::make_pair(p, n));
    }
    return nnf.at(f.id()).first;
}

/// Replaces ->, <->, F and G by the core connectives; negations stay in place.
inline Formula desugar(Formula f)
{
    std::unordered_map<std::uint64_t, Formula> out;
    for (Formula g : closure(f)) {
        auto get = [&](Formula h) { return out.at(h.id()); };
        Formula r;
        switch (g.op()) {
        case Op::tt:
        case Op::ff:
        case Op::atom: r = g; break;
        case Op::neg: r = make_not(get(g.child())); break;
        case Op::next: r = make_next(get(g.child())); break;
        case Op::conj: r = make_and(get(g.lhs()), get(g.rhs())); break;
        case Op::disj: r = make_or(get(g.lhs()), get(g.rhs())); break;
        case Op::until: r = make_until(get(g.lhs()), get(g.rhs())); break;
        case Op::release: r = make_release(get(g.lhs()), get(g.rhs())); break;
        case Op::implies: r = make_or(make_not(get(g.lhs())), get(g.rhs())); break;
        case Op::iff: {
            Formula a = get(g.lhs()), b = get(g.rhs());
            r = make_or(make_and(a, b), make_and(make_not(a), make_not(b)));
            break;
        }
        case Op::eventually: r = make_until(make_true(), get(g.child())); break;
        case Op::globally: r = make_release(make_false(), get(g.child())); break;
        }
        out.emplace(g.id(), r);
    }
    return out.at(f.id());
}

/// Sorted names of atoms occurring in f.
inline std::vector<std::string> atoms_of(Formula f)
{
    std::set<std::string> names;
    for (Formula g : closure(f))
        if (g.op() == Op::atom) names.insert(g.atom_name());
    return {names.begin(), names.end()};
}

/// Checks that every atom of f is declared in `atoms`.
inline void check_atoms(Formula f, const AtomSet& atoms)
{
    for (const auto& n : atoms_of(f))
        if (!atoms.contains(n)) throw UnknownAtomError("unknown atom '" + n + "'");
}

/// Splits nested conjunctions into their conjuncts (left to right).
inline std::vector<Formula> conjuncts(Formula f)
{
    std::vector<Formula> out;
    std::vector<Formula> stack{f};
    while (!stack.empty()) {
        Formula g = stack.back();
        stack.pop_back();
        if (g.op() == Op::conj) {
            stack.push_back(g.rhs());
            stack.push_back(g.lhs());
        } else {
            out.push_back(g);
        }
    }
    return out;
}

} // namespace ltlcount

#endif // LTLCOUNT_FORMULA_HPP_
