#ifndef LTLCOUNT_TREE_HPP_
#define LTLCOUNT_TREE_HPP_

#include "ltlcount/atoms.hpp"
#include "ltlcount/count.hpp"
#include "ltlcount/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace ltlcount
{

/// Shape of the complete tree of height k whose branching is the number of
/// directions. Nodes are numbered breadth-first; the children of x are
/// branching*x + 1 + d.
class TreeShape
{
public:
    TreeShape() = default;

    TreeShape(std::size_t k, std::size_t branching) : k_(k), b_(branching)
    {
        if (b_ == 0) throw Error("tree needs at least one direction");
        std::size_t level = 1;
        level_start_.push_back(0);
        for (std::size_t d = 0; d <= k_; ++d) {
            level_start_.push_back(level_start_.back() + level);
            if (d < k_) {
                if (level > (std::size_t{1} << 40) / b_) throw Error("tree too large");
                level *= b_;
            }
        }
    }

    std::size_t height() const noexcept { return k_; }
    std::size_t branching() const noexcept { return b_; }
    std::size_t nodes() const noexcept { return level_start_.back(); }
    std::size_t leaves() const noexcept { return level_start_[k_ + 1] - level_start_[k_]; }
    std::size_t first_leaf() const noexcept { return level_start_[k_]; }
    bool is_leaf(std::size_t x) const noexcept { return x >= first_leaf(); }

    std::size_t depth(std::size_t x) const noexcept
    {
        std::size_t d = 0;
        while (level_start_[d + 1] <= x) ++d;
        return d;
    }

    std::size_t child(std::size_t x, std::size_t dir) const noexcept { return b_ * x + 1 + dir; }
    std::size_t parent(std::size_t x) const noexcept { return (x - 1) / b_; }

    /// Ancestor of x at the given depth (x itself at its own depth).
    std::size_t ancestor(std::size_t x, std::size_t at_depth) const noexcept
    {
        for (std::size_t d = depth(x); d > at_depth; --d) x = parent(x);
        return x;
    }

private:
    std::size_t k_ = 0;
    std::size_t b_ = 1;
    std::vector<std::size_t> level_start_;
};

/// Directions are the subsets of the input atoms, ordered by their sorted
/// name lists in lexicographic order (the empty set first).
inline std::vector<Letter> direction_letters(const AtomSet& atoms)
{
    const auto inputs = atoms.names(AtomKind::input);
    std::vector<std::pair<std::vector<std::string>, Letter>> subsets;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << inputs.size()); ++m) {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < inputs.size(); ++i)
            if ((m >> i) & 1U) names.push_back(inputs[i]);
        std::sort(names.begin(), names.end());
        subsets.emplace_back(names, atoms.letter(names));
    }
    std::sort(subsets.begin(), subsets.end());
    std::vector<Letter> out;
    for (const auto& s : subsets) out.push_back(s.second);
    return out;
}

/// A k-tree-model: output labels on every node and, at each leaf, one
/// back-edge per direction to the ancestor at the given depth (depth k is the
/// leaf itself).
class TreeModel
{
public:
    TreeModel() = default;

    TreeModel(std::size_t k, AtomSet atoms)
        : atoms_(std::move(atoms)), dirs_(direction_letters(atoms_)), shape_(k, dirs_.size())
    {
        if (atoms_.names(AtomKind::input).size() > 16) throw Error("too many input atoms for a tree");
        labels_.assign(shape_.nodes(), 0);
        backedges_.assign(shape_.leaves() * dirs_.size(), 0);
    }

    std::size_t height() const noexcept { return shape_.height(); }
    const AtomSet& atoms() const noexcept { return atoms_; }
    const TreeShape& shape() const noexcept { return shape_; }
    std::size_t directions() const noexcept { return dirs_.size(); }
    Letter direction_letter(std::size_t d) const { return dirs_[d]; }
    std::size_t nodes() const noexcept { return shape_.nodes(); }

    Letter label(std::size_t x) const { return labels_[x]; }
    void set_label(std::size_t x, Letter l)
    {
        if ((l & ~atoms_.kind_mask(AtomKind::output)) != 0) throw Error("node label must use output atoms only");
        labels_[x] = l;
    }

    /// Target depth of the back-edge of leaf number `leaf` (0-based among leaves).
    std::size_t backedge(std::size_t leaf, std::size_t dir) const { return backedges_[leaf * dirs_.size() + dir]; }
    void set_backedge(std::size_t leaf, std::size_t dir, std::size_t depth)
    {
        if (depth > height()) throw Error("back-edge target depth out of range");
        backedges_[leaf * dirs_.size() + dir] = static_cast<std::uint8_t>(depth);
    }

    /// Transition function: child for inner nodes, back-edge target for leaves.
    std::size_t next(std::size_t x, std::size_t dir) const
    {
        if (!shape_.is_leaf(x)) return shape_.child(x, dir);
        return shape_.ancestor(x, backedge(x - shape_.first_leaf(), dir));
    }

    /// Letter seen at node x when leaving along direction `dir`.
    Letter letter(std::size_t x, std::size_t dir) const { return labels_[x] | dirs_[dir]; }

    /// Trace letters along a finite direction word from the root.
    std::vector<Letter> trace(const std::vector<std::size_t>& dirs) const
    {
        std::vector<Letter> out;
        std::size_t x = 0;
        for (std::size_t d : dirs) {
            out.push_back(letter(x, d));
            x = next(x, d);
        }
        return out;
    }

    friend bool operator==(const TreeModel& a, const TreeModel& b)
    {
        return a.height() == b.height() && a.atoms_ == b.atoms_ && a.labels_ == b.labels_ &&
               a.backedges_ == b.backedges_;
    }

    const std::vector<Letter>& labels() const noexcept { return labels_; }
    const std::vector<std::uint8_t>& backedge_table() const noexcept { return backedges_; }

private:
    AtomSet atoms_;
    std::vector<Letter> dirs_;
    TreeShape shape_;
    std::vector<Letter> labels_;
    std::vector<std::uint8_t> backedges_;
};

/// Total number of k-tree-models: 2^(|O| n_k) (k+1)^(2^|I| l_k).
inline Count tree_model_total(std::size_t k, const AtomSet& atoms)
{
    const std::size_t outs = atoms.names(AtomKind::output).size();
    const std::size_t ins = atoms.names(AtomKind::input).size();
    TreeShape shape(k, std::size_t{1} << ins);
    return pow_count(2, outs * shape.nodes()) * pow_count(k + 1, (std::size_t{1} << ins) * shape.leaves());
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json tree_to_json(const TreeModel& t)
{
    const AtomSet& a = t.atoms();
    auto sorted = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    nlohmann::json j;
    j["k"] = t.height();
    j["inputs"] = sorted(a.names(AtomKind::input));
    j["outputs"] = sorted(a.names(AtomKind::output));
    nlohmann::json labels = nlohmann::json::array();
    for (std::size_t x = 0; x < t.nodes(); ++x) labels.push_back(a.letter_names(t.label(x)));
    j["labels"] = labels;
    nlohmann::json back = nlohmann::json::array();
    for (std::size_t l = 0; l < t.shape().leaves(); ++l) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t d = 0; d < t.directions(); ++d) row.push_back(t.backedge(l, d));
        back.push_back(row);
    }
    j["backedges"] = back;
    return j;
}

inline TreeModel tree_from_json(const nlohmann::json& j)
{
    try {
        const std::size_t k = j.at("k").get<std::size_t>();
        auto inputs = j.at("inputs").get<std::vector<std::string>>();
        auto outputs = j.at("outputs").get<std::vector<std::string>>();
        TreeModel t(k, AtomSet::from(inputs, outputs));
        const auto& labels = j.at("labels");
        if (labels.size() != t.nodes()) throw FormatError("labels must have one entry per node");
        for (std::size_t x = 0; x < t.nodes(); ++x) {
            Letter l = 0;
            for (const auto& name : labels[x].get<std::vector<std::string>>()) {
                const std::size_t i = t.atoms().index_of(name);
                if (t.atoms()[i].kind != AtomKind::output) throw FormatError("label uses input atom '" + name + "'");
                l |= Letter{1} << i;
            }
            t.set_label(x, l);
        }
        const auto& back = j.at("backedges");
        if (back.size() != t.shape().leaves()) throw FormatError("backedges must have one entry per leaf");
        for (std::size_t l = 0; l < back.size(); ++l) {
            if (back[l].size() != t.directions()) throw FormatError("each leaf needs one back-edge per direction");
            for (std::size_t d = 0; d < t.directions(); ++d) {
                const auto depth = back[l][d].get<std::size_t>();
                if (depth > k) throw FormatError("back-edge target depth out of range");
                t.set_backedge(l, d, depth);
            }
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed tree JSON: ") + e.what());
    } catch (const UnknownAtomError& e) {
        throw FormatError(e.what());
    }
}

// ---------------------------------------------------------------------------
// Enumeration

/// Mixed-radix odometer over all label and back-edge assignments. Digit order:
/// node labels (BFS order), then back-edges (leaf-major, direction-minor).
class TreeModelEnumerator
{
public:
    TreeModelEnumerator(std::size_t k, const AtomSet& atoms, std::uint64_t budget)
        : tree_(k, atoms)
    {
        const Count total = tree_model_total(k, atoms);
        if (total > budget) throw BudgetExceeded("tree model space of " + to_decimal(total) + " exceeds the budget");
        total_ = static_cast<std::uint64_t>(total);
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (atoms[i].kind == AtomKind::output) out_bits_.push_back(i);
    }

    std::uint64_t total() const noexcept { return total_; }

    /// Positions the enumerator on model number `index`.
    void seek(std::uint64_t index)
    {
        index_ = index;
        const std::uint64_t label_radix = std::uint64_t{1} << out_bits_.size();
        const std::size_t k1 = tree_.height() + 1;
        std::uint64_t x = index;
        for (std::size_t n = 0; n < tree_.nodes(); ++n) {
            tree_.set_label(n, expand(x % label_radix));
            x /= label_radix;
        }
        for (std::size_t l = 0; l < tree_.shape().leaves(); ++l)
            for (std::size_t d = 0; d < tree_.directions(); ++d) {
                tree_.set_backedge(l, d, x % k1);
                x /= k1;
            }
    }

    /// Current model, valid while index() < total().
    const TreeModel& current() const noexcept { return tree_; }
    std::uint64_t index() const noexcept { return index_; }

    /// Advances to the next model; false after the last one.
    bool advance()
    {
        if (++index_ >= total_) return false;
        const std::uint64_t label_radix = std::uint64_t{1} << out_bits_.size();
        for (std::size_t n = 0; n < tree_.nodes(); ++n) {
            std::uint64_t v = compress(tree_.label(n)) + 1;
            if (v < label_radix) {
                tree_.set_label(n, expand(v));
                return true;
            }
            tree_.set_label(n, 0);
        }
        for (std::size_t l = 0; l < tree_.shape().leaves(); ++l)
            for (std::size_t d = 0; d < tree_.directions(); ++d) {
                const std::size_t v = tree_.backedge(l, d) + 1;
                if (v <= tree_.height()) {
                    tree_.set_backedge(l, d, v);
                    return true;
                }
                tree_.set_backedge(l, d, 0);
            }
        return false;
    }

private:
    Letter expand(std::uint64_t v) const
    {
        Letter l = 0;
        for (std::size_t i = 0; i < out_bits_.size(); ++i)
            if ((v >> i) & 1U) l |= Letter{1} << out_bits_[i];
        return l;
    }

    std::uint64_t compress(Letter l) const
    {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < out_bits_.size(); ++i)
            if ((l >> out_bits_[i]) & 1U) v |= std::uint64_t{1} << i;
        return v;
    }

    TreeModel tree_;
    std::vector<std::size_t> out_bits_;
    std::uint64_t total_ = 0;
    std::uint64_t index_ = 0;
};

/// Calls fn on every k-tree-model over the atoms; fn returns false to stop.
template <typename Fn>
void enumerate_tree_models(std::size_t k, const AtomSet& atoms, std::uint64_t budget, Fn&& fn)
{
    TreeModelEnumerator e(k, atoms, budget);
    e.seek(0);
    do {
        if (!fn(e.current())) return;
    } while (e.advance());
}

} // namespace ltlcount

#endif // LTLCOUNT_TREE_HPP_
