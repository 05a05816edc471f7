// Micro machines from tests/data.
#ifndef LTLCOUNT_TESTS_MACHINES_HPP_
#define LTLCOUNT_TESTS_MACHINES_HPP_

#include "ltlcount/tm.hpp"

#include <fstream>
#include <string>

namespace testsupport
{

inline ltlcount::NTMachine load_machine(const std::string& name)
{
    std::ifstream in(std::string(LTLCOUNT_TEST_DATA) + "/" + name + ".json");
    if (!in) throw std::runtime_error("missing test machine " + name);
    return ltlcount::machine_from_json(nlohmann::json::parse(in));
}

/// A machine, its input, and its accepting-run count as computed by hand.
struct MicroInstance
{
    std::string name;
    std::vector<std::string> input;
    std::size_t runs;
    std::size_t steps;   // longest accepting run
};

inline const std::vector<MicroInstance>& micro_instances()
{
    static const std::vector<MicroInstance> all{
        {"two_choice", {"1"}, 2, 1},
        {"chain", {}, 4, 2},
        {"left", {"0", "1"}, 2, 3},
        {"stuck", {"1"}, 0, 0},
        {"det", {"1"}, 1, 2},
    };
    return all;
}

} // namespace testsupport

#endif // LTLCOUNT_TESTS_MACHINES_HPP_
