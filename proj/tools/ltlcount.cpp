// ltlcount: count word and tree models of LTL formulas, build and verify the
// Turing-machine reductions, check single models.
//
// Exit codes: 0 ok, 1 verification failed, 2 malformed input, 3 budget or
// cap refusal, 4 bound too small.

#include "ltlcount/ltlcount.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace ltlcount;

namespace
{

enum Exit { ok = 0, verify_failed = 1, bad_input = 2, refused = 3, bound = 4 };

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json read_json(const std::string& path)
{
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

/// Tape input: comma-separated symbols, or one symbol per character.
std::vector<std::string> parse_input(const std::string& s)
{
    if (s.find(',') != std::string::npos) return split_list(s);
    std::vector<std::string> out;
    for (char c : s)
        if (c != ' ') out.emplace_back(1, c);
    return out;
}

/// k as written: a tally of 1s (unary) or a decimal numeral (binary).
std::size_t parse_bound(const std::string& text, const std::string& encoding, std::uint64_t budget)
{
    Count k = 0;
    if (encoding == "unary") {
        if (text.find_first_not_of('1') != std::string::npos) throw FormatError("unary bound must be a string of 1s");
        k = Count(text.size());
    } else {
        if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
            throw FormatError("bound must be a decimal numeral");
        k = Count(text);
    }
    if (k > Count(budget)) throw BudgetExceeded("k = " + to_decimal(k) + " exceeds the budget of " + std::to_string(budget));
    return static_cast<std::size_t>(k);
}

/// Letters in braces, prefix and period separated by '/': {p,q}{}/{p}.
UltimatelyPeriodicWord parse_word(const std::string& s, const AtomSet& atoms)
{
    const auto slash = s.find('/');
    if (slash == std::string::npos) throw FormatError("word needs the form prefix/period");
    auto letters = [&](const std::string& part) {
        std::vector<Letter> out;
        std::size_t i = 0;
        while (i < part.size()) {
            if (part[i] == ' ') {
                ++i;
                continue;
            }
            if (part[i] != '{') throw FormatError("expected '{' in word at '" + part.substr(i) + "'");
            const auto close = part.find('}', i);
            if (close == std::string::npos) throw FormatError("unclosed '{' in word");
            Letter l = 0;
            for (const auto& a : split_list(part.substr(i + 1, close - i - 1))) l |= Letter{1} << atoms.index_of(a);
            out.push_back(l);
            i = close + 1;
        }
        return out;
    };
    auto u = letters(s.substr(0, slash));
    auto v = letters(s.substr(slash + 1));
    if (v.empty()) throw FormatError("word period must be nonempty");
    return UltimatelyPeriodicWord(std::move(u), std::move(v));
}

struct FormulaSource
{
    std::string file, text;

    std::string get() const
    {
        if (!text.empty()) return text;
        if (file.empty()) throw FormatError("no formula given");
        return read_file(file);
    }

    void attach(CLI::App* app)
    {
        app->add_option("formula", file, "File holding the formula");
        app->add_option("-e,--expr", text, "Formula text instead of a file");
    }
};

struct ReduceArgs
{
    std::string mode = "word", machine, input, out;
    std::size_t lr = 0, lc = 0, p = 0, p_prime = 0;
    bool allow_cut = false;

    void attach(CLI::App* app, bool with_out)
    {
        app->add_option("--mode", mode, "word | tree-unary | tree-binary")
            ->check(CLI::IsMember({"word", "tree-unary", "tree-binary"}));
        app->add_option("--machine", machine, "Machine JSON")->required();
        app->add_option("--input", input, "Input word: symbols, comma-separated or one per character");
        app->add_option("--lr", lr, "Word mode: configurations per run (run length bound)");
        app->add_option("--lc", lc, "Word mode: width of the configuration id counter");
        app->add_option("--p", p, "Tree modes: p");
        app->add_option("--p-prime", p_prime, "Binary tree mode: p'");
        app->add_flag("--allow-cut", allow_cut, "Do not refuse bounds that cut runs off");
        if (with_out) app->add_option("-o,--out", out, "Output prefix: writes PREFIX.ltl and PREFIX.json")->required();
    }

    void need(bool ok, const std::string& what) const
    {
        if (!ok) throw FormatError(mode + " mode needs " + what);
    }

    /// Step and cell bounds of the chosen encoding.
    std::pair<std::size_t, std::size_t> bounds(const NTMachine& m) const
    {
        if (mode == "word") return {lr - 1, lr};
        if (mode == "tree-unary") {
            const auto par = tree_reduction_params_unary(m, p);
            return {par.l_r - 1, par.l_r};
        }
        const auto par = tree_reduction_params_binary(m, p, p_prime);
        return {par.configs - 1, par.cells};
    }

    void check(const NTMachine& m, const std::vector<std::string>& in) const
    {
        if (mode == "word") need(lr >= 1, "--lr >= 1");
        if (mode != "word") need(p >= 1, "--p >= 1");
        if (mode == "tree-binary") need(p_prime >= 1, "--p-prime >= 1");
        if (allow_cut) return;
        const auto [steps, cells] = bounds(m);
        require_bounds_cover_runs(m, in, steps, cells);
    }
};

int cmd_count_words(const FormulaSource& fs, const std::string& ap_in, const std::string& ap_out, const std::string& k,
                    const std::string& enc, std::uint64_t budget, unsigned jobs)
{
    const AtomSet atoms = AtomSet::from(split_list(ap_in), split_list(ap_out));
    const Formula f = parse(fs.get(), atoms);
    std::cout << to_decimal(count_word_models(f, parse_bound(k, enc, budget), atoms, budget, jobs)) << "\n";
    return ok;
}

int cmd_count_trees(const FormulaSource& fs, const std::string& ins, const std::string& outs, const std::string& k,
                    const std::string& enc, std::uint64_t budget, unsigned jobs)
{
    const AtomSet atoms = AtomSet::from(split_list(ins), split_list(outs));
    const Formula f = parse(fs.get(), atoms);
    std::cout << to_decimal(count_tree_models(f, parse_bound(k, enc, budget), atoms, budget, jobs)) << "\n";
    return ok;
}

int cmd_reduce(const ReduceArgs& a)
{
    const NTMachine m = machine_from_json(read_json(a.machine));
    const auto input = parse_input(a.input);
    a.check(m, input);
    std::string text;
    nlohmann::json manifest;
    if (a.mode == "word") {
        const auto r = build_word_reduction(m, input, a.lr, a.lc ? std::optional<std::size_t>(a.lc) : std::nullopt);
        text = print(r.formula);
        manifest = word_manifest(r.params);
    } else if (a.mode == "tree-unary") {
        const auto par = tree_reduction_params_unary(m, a.p);
        const auto r = build_tree_reduction_unary(m, input, a.p);
        text = print(r.formula);
        manifest = tree_manifest(r, content_free_tree_unary(m, par), par.states, par.symbols);
    } else {
        const auto par = tree_reduction_params_binary(m, a.p, a.p_prime);
        const auto r = build_tree_reduction_binary(m, input, a.p, a.p_prime);
        text = print(r.formula);
        manifest = tree_manifest(r, content_free_tree_binary(m, par), par.states, par.symbols);
    }
    std::ofstream(a.out + ".ltl") << text << "\n";
    std::ofstream(a.out + ".json") << manifest.dump(1) << "\n";
    std::cout << "k=" << manifest["k"].get<std::size_t>() << "\n";
    return ok;
}

int cmd_verify(const ReduceArgs& a, std::size_t mutants, std::uint64_t seed, unsigned jobs)
{
    const NTMachine m = machine_from_json(read_json(a.machine));
    const auto input = parse_input(a.input);
    a.check(m, input);
    bool pass = false;
    if (a.mode == "word") {
        const auto r = build_word_reduction(m, input, a.lr, a.lc ? std::optional<std::size_t>(a.lc) : std::nullopt);
        const auto rep = verify_word_reduction(m, input, r, jobs);
        pass = rep.pass();
        std::cout << "runs=" << to_decimal(rep.runs) << " models=" << to_decimal(rep.models);
    } else {
        const auto rep = a.mode == "tree-unary"
                             ? verify_tree_reduction_unary(m, input, a.p, mutants, seed)
                             : verify_tree_reduction_binary(m, input, a.p, a.p_prime, mutants, seed);
        pass = rep.pass();
        std::cout << "runs=" << rep.runs << " sound=" << rep.sound << " collisions=" << rep.collisions
                  << " mutants=" << rep.mutants << " falsified=" << rep.falsified << " matched=" << rep.matched;
    }
    std::cout << (pass ? " PASS" : " FAIL") << "\n";
    return pass ? ok : verify_failed;
}

int cmd_check(const FormulaSource& fs, const std::string& word, const std::string& tree_file, const std::string& ap)
{
    if (word.empty() == tree_file.empty()) throw FormatError("give exactly one of --word and --tree");
    bool sat;
    if (!word.empty()) {
        AtomSet atoms;
        if (!ap.empty()) {
            atoms = AtomSet::outputs(split_list(ap));
        } else {
            // Without --ap the atoms are those of the formula.
            atoms = AtomSet::outputs(atoms_of(parse_any(fs.get())));
        }
        const Formula f = parse(fs.get(), atoms);
        sat = eval_direct(f, parse_word(word, atoms), atoms);
    } else {
        const TreeModel t = tree_from_json(read_json(tree_file));
        const Formula f = parse(fs.get(), t.atoms());
        sat = TreeChecker(f, t.atoms())(t);
    }
    std::cout << (sat ? "SAT" : "UNSAT") << "\n";
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Count models of LTL formulas over bounded words and trees"};
    app.require_subcommand(1);
    std::uint64_t budget = default_budget;
    unsigned jobs = 1;
    std::string k, encoding = "binary";

    FormulaSource cw_f, ct_f, ck_f;
    std::string ap_in, ap_out, ins, outs;
    auto* cw = app.add_subcommand("count-words", "Count k-word-models (lassos of length k)");
    cw_f.attach(cw);
    cw->add_option("--ap-in", ap_in, "Input atoms, comma-separated");
    cw->add_option("--ap-out", ap_out, "Output atoms, comma-separated");
    auto* ct = app.add_subcommand("count-trees", "Count k-tree-models");
    ct_f.attach(ct);
    ct->add_option("--inputs", ins, "Input atoms, comma-separated");
    ct->add_option("--outputs", outs, "Output atoms, comma-separated");
    for (auto* c : {cw, ct}) {
        c->add_option("-k", k, "Bound")->required();
        c->add_option("--bound-encoding", encoding, "How k is written: unary (1s) or binary (a numeral)")
            ->check(CLI::IsMember({"unary", "binary"}));
        c->add_option("--budget", budget, "Largest candidate space to enumerate");
        c->add_option("--jobs", jobs, "Worker threads");
    }

    ReduceArgs red, ver;
    auto* rd = app.add_subcommand("reduce", "Write the formula and manifest of a machine reduction");
    red.attach(rd, true);
    auto* vf = app.add_subcommand("verify", "Compare a reduction against the machine's accepting runs");
    ver.attach(vf, false);
    std::size_t mutants = 200;
    std::uint64_t seed = 1;
    vf->add_option("--mutations", mutants, "Tree modes: random single-point mutations per run");
    vf->add_option("--seed", seed, "Tree modes: mutation seed");
    vf->add_option("--jobs", jobs, "Worker threads");

    std::string word, tree_file, ap;
    auto* ck = app.add_subcommand("check", "Check one word or tree against a formula");
    ck_f.attach(ck);
    ck->add_option("--word", word, "Lasso as prefix/period, letters in braces: {p,q}{}/{p}");
    ck->add_option("--tree", tree_file, "Tree model JSON");
    ck->add_option("--ap", ap, "Word atoms, comma-separated (default: the formula's)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : bad_input;
    }

    try {
        if (*cw) return cmd_count_words(cw_f, ap_in, ap_out, k, encoding, budget, jobs);
        if (*ct) return cmd_count_trees(ct_f, ins, outs, k, encoding, budget, jobs);
        if (*rd) return cmd_reduce(red);
        if (*vf) return cmd_verify(ver, mutants, seed, jobs);
        if (*ck) return cmd_check(ck_f, word, tree_file, ap);
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return refused;
    } catch (const CapExceeded& e) {
        std::cerr << "cap: " << e.what() << "\n";
        return refused;
    } catch (const BoundTooSmall& e) {
        std::cerr << "bound too small (run length " << e.run_length() << "): " << e.what() << "\n";
        return bound;
    } catch (const SpaceBoundError& e) {
        std::cerr << "bound too small: " << e.what() << "\n";
        return bound;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bad_input;
    }
    return bad_input;
}
