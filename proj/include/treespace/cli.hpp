#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "treespace/global_search.hpp"
#include "treespace/orthant_optimizer.hpp"

namespace treespace::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kNotOptimal = 1;
inline constexpr int kError = 2;

enum class Command { Dist, Geodesic, Mean, Verify, Canon };
enum class Format { Text, Json };
enum class Algo { Sturm, Orthant, Hybrid };

struct CliConfig {
    Command command = Command::Dist;
    std::vector<std::string> inputs;
    Format format = Format::Text;
    Algo algo = Algo::Hybrid;
    double lambda = 0.5;
    NewtonConfig newton;
    std::size_t max_steps = 1000000;
    double tol = 1e-10;
    bool random_order = false;
    std::uint64_t seed = 0;
    std::string trace_path;
    std::size_t trace_every = 1;
    std::string orthant_path;  // topology source for --algo orthant

    void validate() const;  // throws std::invalid_argument
    ProximalSchedule schedule() const;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-empty, non-comment lines parsed as Newick. All trees must share a
// leaf count. Parser warnings are appended with a path:line prefix.
std::vector<Tree> read_trees(const std::string& path, std::vector<std::string>* warnings = nullptr);
Tree read_single_tree(const std::string& path, std::vector<std::string>* warnings = nullptr);

// Each command writes its report to `out` and parser warnings to `err`.
int cmd_dist(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_geodesic(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_mean(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_canon(const CliConfig& cfg, std::ostream& out, std::ostream& err);

// Parses arguments (args[0] is the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace treespace::cli
