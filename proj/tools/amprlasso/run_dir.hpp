#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "ampr/report.hpp"

namespace amprlasso {

/// Output directory of one command: config.json, tables, summary.json, log.txt.
class RunDir {
public:
    /// Creates `path`, or runs/<command>-<timestamp> when empty. Throws ampr::IoError.
    RunDir(std::filesystem::path path, const std::string& command, bool quiet);

    const std::filesystem::path& path() const noexcept { return path_; }

    /// Appends a line to log.txt (and stderr unless quiet), prefixed with elapsed seconds.
    void log(const std::string& line);

    /// Writes a file in the run directory through `fill`. Throws ampr::IoError.
    void write(const std::string& name, const std::function<void(std::ostream&)>& fill);
    void write_text(const std::string& name, const std::string& text);

    /// Stamps wall_seconds and writes summary.json.
    void finish(ampr::RunSummary summary);

    double elapsed() const;

private:
    std::filesystem::path path_;
    std::ofstream log_;
    bool quiet_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace amprlasso
