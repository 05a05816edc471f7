#ifndef LTLCOUNT_TM_HPP_
#define LTLCOUNT_TM_HPP_

#include "ltlcount/count.hpp"
#include "ltlcount/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace ltlcount
{

struct Transition
{
    std::string from;
    std::string read;
    std::string to;
    std::string write;
    int dir = 1;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// One-tape nondeterministic Turing machine. Accepting states are terminal.
class NTMachine
{
public:
    NTMachine() = default;

    NTMachine(std::vector<std::string> states, std::string initial, std::vector<std::string> accepting,
              std::vector<std::string> alphabet, std::string blank, std::vector<Transition> transitions)
        : states_(std::move(states)),
          initial_(std::move(initial)),
          accepting_(std::move(accepting)),
          alphabet_(std::move(alphabet)),
          blank_(std::move(blank)),
          transitions_(std::move(transitions))
    {
        validate();
    }

    const std::vector<std::string>& states() const noexcept { return states_; }
    const std::string& initial() const noexcept { return initial_; }
    const std::vector<std::string>& accepting() const noexcept { return accepting_; }
    const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
    const std::string& blank() const noexcept { return blank_; }
    const std::vector<Transition>& transitions() const noexcept { return transitions_; }

    std::size_t state_index(const std::string& q) const { return lookup(state_ix_, q, "state"); }
    std::size_t symbol_index(const std::string& a) const { return lookup(symbol_ix_, a, "symbol"); }
    std::size_t initial_index() const { return state_index(initial_); }
    std::size_t blank_index() const { return symbol_index(blank_); }
    bool is_accepting(std::size_t q) const { return accepting_ix_.count(q) != 0; }

    /// Indices of the transitions applicable in state q reading symbol a, in list order.
    const std::vector<std::size_t>& applicable(std::size_t q, std::size_t a) const
    {
        return table_[q * alphabet_.size() + a];
    }

    friend bool operator==(const NTMachine& a, const NTMachine& b)
    {
        return a.states_ == b.states_ && a.initial_ == b.initial_ && a.accepting_ == b.accepting_ &&
               a.alphabet_ == b.alphabet_ && a.blank_ == b.blank_ && a.transitions_ == b.transitions_;
    }

private:
    static std::size_t lookup(const std::unordered_map<std::string, std::size_t>& m, const std::string& k,
                              const char* what)
    {
        auto it = m.find(k);
        if (it == m.end()) throw FormatError(std::string("unknown ") + what + " '" + k + "'");
        return it->second;
    }

    void validate()
    {
        if (states_.empty()) throw FormatError("machine needs at least one state");
        if (alphabet_.empty()) throw FormatError("machine needs a nonempty alphabet");
        for (std::size_t i = 0; i < states_.size(); ++i)
            if (!state_ix_.emplace(states_[i], i).second) throw FormatError("duplicate state '" + states_[i] + "'");
        for (std::size_t i = 0; i < alphabet_.size(); ++i)
            if (!symbol_ix_.emplace(alphabet_[i], i).second)
                throw FormatError("duplicate symbol '" + alphabet_[i] + "'");
        state_index(initial_);
        blank_index();
        for (const auto& q : accepting_) accepting_ix_.insert(state_index(q));
        table_.assign(states_.size() * alphabet_.size(), {});
        std::set<std::tuple<std::string, std::string, std::string, std::string, int>> seen;
        for (std::size_t i = 0; i < transitions_.size(); ++i) {
            const Transition& t = transitions_[i];
            const std::size_t q = state_index(t.from), a = symbol_index(t.read);
            state_index(t.to);
            symbol_index(t.write);
            if (t.dir != -1 && t.dir != 1) throw FormatError("transition direction must be -1 or 1");
            if (is_accepting(q)) throw FormatError("accepting state '" + t.from + "' must be terminal");
            if (!seen.emplace(t.from, t.read, t.to, t.write, t.dir).second)
                throw FormatError("duplicate transition from '" + t.from + "' on '" + t.read + "'");
            table_[q * alphabet_.size() + a].push_back(i);
        }
    }

    std::vector<std::string> states_;
    std::string initial_;
    std::vector<std::string> accepting_;
    std::vector<std::string> alphabet_;
    std::string blank_;
    std::vector<Transition> transitions_;

    std::unordered_map<std::string, std::size_t> state_ix_;
    std::unordered_map<std::string, std::size_t> symbol_ix_;
    std::set<std::size_t> accepting_ix_;
    std::vector<std::vector<std::size_t>> table_;
};

/// Instantaneous configuration; tape cells not stored hold the blank.
struct NTMConfig
{
    std::size_t state = 0;
    std::map<std::int64_t, std::size_t> tape;   // non-blank cells only
    std::int64_t head = 0;

    std::size_t read(std::int64_t cell, std::size_t blank) const
    {
        auto it = tape.find(cell);
        return it == tape.end() ? blank : it->second;
    }

    void write(std::int64_t cell, std::size_t symbol, std::size_t blank)
    {
        if (symbol == blank)
            tape.erase(cell);
        else
            tape[cell] = symbol;
    }

    friend bool operator==(const NTMConfig&, const NTMConfig&) = default;
};

/// A run: configurations c_0..c_n and the transition index chosen at each step.
struct RunTrace
{
    std::vector<NTMConfig> configs;
    std::vector<std::size_t> choices;

    std::size_t steps() const noexcept { return choices.size(); }
    friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

inline NTMConfig initial_config(const NTMachine& m, const std::vector<std::string>& input)
{
    NTMConfig c;
    c.state = m.initial_index();
    for (std::size_t i = 0; i < input.size(); ++i)
        c.write(static_cast<std::int64_t>(i), m.symbol_index(input[i]), m.blank_index());
    return c;
}

/// Applies transition `t`; nullopt if the head leaves [0, max_cells).
inline std::optional<NTMConfig> apply_transition(const NTMachine& m, const NTMConfig& c, std::size_t t,
                                                 std::optional<std::size_t> max_cells = std::nullopt)
{
    const Transition& tr = m.transitions()[t];
    NTMConfig n = c;
    n.write(c.head, m.symbol_index(tr.write), m.blank_index());
    n.state = m.state_index(tr.to);
    n.head = c.head + tr.dir;
    if (max_cells && (n.head < 0 || n.head >= static_cast<std::int64_t>(*max_cells))) return std::nullopt;
    return n;
}

/// One successor per applicable transition, in transition-list order. With a
/// space bound, a move off [0, max_cells) raises SpaceBoundError.
inline std::vector<NTMConfig> successors(const NTMachine& m, const NTMConfig& c,
                                         std::optional<std::size_t> max_cells = std::nullopt)
{
    std::vector<NTMConfig> out;
    if (m.is_accepting(c.state)) return out;
    for (std::size_t t : m.applicable(c.state, c.read(c.head, m.blank_index()))) {
        auto n = apply_transition(m, c, t, max_cells);
        if (!n) throw SpaceBoundError("head leaves the tape bound of " + std::to_string(*max_cells) + " cells");
        out.push_back(std::move(*n));
    }
    return out;
}

/// Summary of a bounded run search.
struct RunCensus
{
    Count accepting = 0;
    Count truncated = 0;         // choice sequences still running after max_steps
    Count off_tape = 0;          // moves dropped by the space bound
    std::size_t longest = 0;     // steps of the longest accepting run
};

namespace detail
{

/// Depth-first search over choice sequences; `on_accept` sees each accepting run.
template <typename OnAccept>
void search_runs(const NTMachine& m, const std::vector<std::string>& input, std::size_t max_steps,
                 std::optional<std::size_t> max_cells, RunCensus& census, OnAccept&& on_accept)
{
    RunTrace trace;
    trace.configs.push_back(initial_config(m, input));
    if (max_cells && *max_cells == 0) {
        census.off_tape += 1;
        return;
    }
    struct Frame
    {
        std::vector<std::size_t> options;
        std::size_t next = 0;
    };
    std::vector<Frame> stack;
    auto open = [&] {
        const NTMConfig& c = trace.configs.back();
        if (m.is_accepting(c.state)) {
            census.accepting += 1;
            census.longest = std::max(census.longest, trace.steps());
            on_accept(trace);
            return false;
        }
        const auto& opts = m.applicable(c.state, c.read(c.head, m.blank_index()));
        if (opts.empty()) return false;
        if (trace.steps() >= max_steps) {
            census.truncated += 1;
            return false;
        }
        stack.push_back({opts, 0});
        return true;
    };
    open();
    while (!stack.empty()) {
        Frame& fr = stack.back();
        if (fr.next == fr.options.size()) {
            stack.pop_back();
            if (!trace.choices.empty()) {
                trace.choices.pop_back();
                trace.configs.pop_back();
            }
            continue;
        }
        const std::size_t t = fr.options[fr.next++];
        auto n = apply_transition(m, trace.configs.back(), t, max_cells);
        if (!n) {
            census.off_tape += 1;
            continue;
        }
        trace.configs.push_back(std::move(*n));
        trace.choices.push_back(t);
        if (!open()) {
            trace.choices.pop_back();
            trace.configs.pop_back();
        }
    }
}

} // namespace detail

/// Census of all choice sequences of at most max_steps steps.
inline RunCensus census_runs(const NTMachine& m, const std::vector<std::string>& input, std::size_t max_steps,
                             std::optional<std::size_t> max_cells = std::nullopt)
{
    RunCensus census;
    detail::search_runs(m, input, max_steps, max_cells, census, [](const RunTrace&) {});
    return census;
}

/// Number of accepting runs of length at most max_steps. In clamped mode a
/// move off [0, max_cells) ends that choice sequence without acceptance.
inline Count count_accepting_runs(const NTMachine& m, const std::vector<std::string>& input, std::size_t max_steps,
                                  std::optional<std::size_t> max_cells = std::nullopt)
{
    return census_runs(m, input, max_steps, max_cells).accepting;
}

/// Accepting runs in depth-first, transition-list order.
inline std::vector<RunTrace> enumerate_accepting_runs(const NTMachine& m, const std::vector<std::string>& input,
                                                      std::size_t max_steps,
                                                      std::optional<std::size_t> max_cells = std::nullopt)
{
    std::vector<RunTrace> out;
    RunCensus census;
    detail::search_runs(m, input, max_steps, max_cells, census, [&](const RunTrace& r) { out.push_back(r); });
    return out;
}

/// Replays a trace through `successors`; false if any step is not a valid move.
inline bool replay_is_valid(const NTMachine& m, const std::vector<std::string>& input, const RunTrace& r,
                            std::optional<std::size_t> max_cells = std::nullopt)
{
    if (r.configs.size() != r.choices.size() + 1) return false;
    if (r.configs.front() != initial_config(m, input)) return false;
    for (std::size_t i = 0; i < r.choices.size(); ++i) {
        const NTMConfig& c = r.configs[i];
        const auto& opts = m.applicable(c.state, c.read(c.head, m.blank_index()));
        if (std::find(opts.begin(), opts.end(), r.choices[i]) == opts.end()) return false;
        auto n = apply_transition(m, c, r.choices[i], max_cells);
        if (!n || *n != r.configs[i + 1]) return false;
    }
    return m.is_accepting(r.configs.back().state);
}

// ---------------------------------------------------------------------------
// JSON

inline NTMachine machine_from_json(const nlohmann::json& j)
{
    try {
        std::vector<Transition> ts;
        for (const auto& t : j.at("transitions"))
            ts.push_back({t.at("from").get<std::string>(), t.at("read").get<std::string>(),
                          t.at("to").get<std::string>(), t.at("write").get<std::string>(), t.at("dir").get<int>()});
        return NTMachine(j.at("states").get<std::vector<std::string>>(), j.at("initial").get<std::string>(),
                         j.at("accepting").get<std::vector<std::string>>(),
                         j.at("alphabet").get<std::vector<std::string>>(), j.at("blank").get<std::string>(), ts);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed machine JSON: ") + e.what());
    }
}

inline nlohmann::json machine_to_json(const NTMachine& m)
{
    nlohmann::json ts = nlohmann::json::array();
    for (const auto& t : m.transitions())
        ts.push_back({{"from", t.from}, {"read", t.read}, {"to", t.to}, {"write", t.write}, {"dir", t.dir}});
    return {{"states", m.states()},       {"initial", m.initial()}, {"accepting", m.accepting()},
            {"alphabet", m.alphabet()},   {"blank", m.blank()},     {"transitions", ts}};
}

} // namespace ltlcount

#endif // LTLCOUNT_TM_HPP_
