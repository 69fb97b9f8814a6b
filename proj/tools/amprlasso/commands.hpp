#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "CLI11.hpp"
#include "run_dir.hpp"

namespace amprlasso {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitDivergence = 4;
inline constexpr int kExitIo = 5;

struct Globals {
    std::string out;
    unsigned workers = 0;
    std::uint64_t seed = 1;
    bool quiet = false;
};

/// The subcommand picked on the command line.
struct Selected {
    std::string name;
    std::function<int(RunDir&)> run;  ///< commands that write a run directory
    std::function<int()> run_plain;   ///< fetch-wine
};

void add_commands(CLI::App& app, Globals& globals, Selected& selected);

/// Downloads (or copies, for file:// URLs) the white wine table into `dest`
/// and records its sha256 next to it.
struct FetchOptions {
    std::string url;
    std::string dest;
    std::string sha256;
    bool force = false;
    bool quiet = false;
};
int fetch_wine(const FetchOptions& options);

/// Directory holding downloaded datasets: $AMPR_DATA_DIR, else ./data.
std::string data_dir();

}  // namespace amprlasso
