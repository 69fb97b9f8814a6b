#include "run_dir.hpp"

#include <cstdio>
#include <ctime>
#include <iostream>

#include "ampr/errors.hpp"

namespace amprlasso {

namespace fs = std::filesystem;

namespace {

fs::path default_path(const std::string& command) {
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", std::localtime(&now));
    fs::path base = fs::path("runs") / (command + "-" + stamp);
    fs::path candidate = base;
    for (int k = 2; fs::exists(candidate); ++k) candidate = base.string() + "-" + std::to_string(k);
    return candidate;
}

}  // namespace

RunDir::RunDir(fs::path path, const std::string& command, bool quiet)
    : path_(path.empty() ? default_path(command) : std::move(path)),
      quiet_(quiet),
      start_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    fs::create_directories(path_, ec);
    if (ec) throw ampr::IoError("cannot create run directory " + path_.string() + ": " + ec.message());
    log_.open(path_ / "log.txt");
    if (!log_) throw ampr::IoError("cannot write " + (path_ / "log.txt").string());
}

double RunDir::elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

void RunDir::log(const std::string& line) {
    char stamp[32];
    std::snprintf(stamp, sizeof stamp, "[%9.3fs] ", elapsed());
    log_ << stamp << line << '\n';
    log_.flush();
    if (!quiet_) std::cerr << stamp << line << '\n';
}

void RunDir::write(const std::string& name, const std::function<void(std::ostream&)>& fill) {
    const fs::path file = path_ / name;
    std::ofstream out(file);
    if (!out) throw ampr::IoError("cannot write " + file.string());
    fill(out);
    out.close();
    if (!out) throw ampr::IoError("write failed: " + file.string());
}

void RunDir::write_text(const std::string& name, const std::string& text) {
    write(name, [&](std::ostream& out) { out << text; });
}

void RunDir::finish(ampr::RunSummary summary) {
    summary.wall_seconds = elapsed();
    write_text("summary.json", ampr::to_json(summary) + "\n");
    log("done in " + std::to_string(summary.wall_seconds) + " s");
}

}  // namespace amprlasso
