#pragma once

#include <splitkit/problems.hpp>

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace splitkit::cli {

// Flat key=value configuration with typed coercion. Unknown keys are rejected on set().
class Settings {
public:
    static const std::vector<std::string>& known_keys();

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string str(const std::string& key, const std::string& def = "") const;
    double number(const std::string& key, double def) const;
    int integer(const std::string& key, int def) const;
    Schedule schedule(const std::string& key, const std::string& def) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Lines of key=value; '#' starts a comment.
void read_config(std::istream& is, Settings& s);
void read_config_file(const std::string& path, Settings& s);

// LoopConfig from mode, relax|mu|lambda, eps, max_iter, tol, stall_limit, inertia, seed.
// Timing is off so traces are reproducible.
LoopConfig loop_config(const Settings& s);

struct Outcome {
    RunResult result;
    PrimalDualPair candidate;  // compared against the problem's residual and oracle
    bool oracle_comparable = true;
    bool solves_problem = true;  // false for entries that solve an approximation or a relaxation
};

struct AlgoEntry {
    std::string name;
    std::string summary;
    std::vector<std::string> kinds;  // problem kinds the entry can build
    std::function<Outcome(const ProblemInstance&, const Settings&)> run;
    std::string default_problem;     // empty: the first kind with default parameters
};

const std::vector<AlgoEntry>& registry();
const AlgoEntry& find_algorithm(const std::string& name);

// Inline spec ("lasso:n=6") or a file written by write_problem. The seed setting fills in
// a missing seed= entry.
ProblemInstance load_problem(const std::string& text, std::uint64_t default_seed);

// Whole command line; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace splitkit::cli
