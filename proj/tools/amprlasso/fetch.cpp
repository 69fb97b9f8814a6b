#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <openssl/evp.h>

// before httplib.h: <resolv.h> defines a macro _res that clashes with Eigen
#include "ampr/data.hpp"
#include "ampr/errors.hpp"
#include "commands.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace amprlasso {

namespace fs = std::filesystem;

namespace {

constexpr const char* kFileName = "winequality-white.csv";
constexpr int kRows = 4898;
constexpr int kFeatures = 11;

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw ampr::IoError("sha256 computation failed");
    }
    std::string hex;
    char byte[3];
    for (unsigned int k = 0; k < length; ++k) {
        std::snprintf(byte, sizeof byte, "%02x", digest[k]);
        hex += byte;
    }
    return hex;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ampr::IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// First token of a sha256sum-style sidecar.
std::string recorded_hash(const fs::path& sidecar) {
    if (!fs::exists(sidecar)) return {};
    std::istringstream in(read_file(sidecar));
    std::string hash;
    in >> hash;
    return hash;
}

std::string download(const std::string& url) {
    if (url.rfind("file://", 0) == 0) return read_file(url.substr(7));

    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ampr::ConfigError("fetch-wine: malformed URL " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    const auto res = client.Get(path);
    if (!res) throw ampr::IoError("fetch-wine: " + url + ": " + httplib::to_string(res.error()));
    if (res->status != 200) throw ampr::IoError("fetch-wine: " + url + ": HTTP " + std::to_string(res->status));
    return res->body;
}

void check_shape(const std::string& text, const std::string& origin) {
    const auto data = ampr::parse_csv(text, "quality");
    if (data.n_samples() != kRows || data.n_features() != kFeatures) {
        throw ampr::IoError(origin + ": expected " + std::to_string(kRows) + " rows and " +
                            std::to_string(kFeatures + 1) + " columns, got " + std::to_string(data.n_samples()) +
                            " x " + std::to_string(data.n_features() + 1));
    }
}

}  // namespace

int fetch_wine(const FetchOptions& o) {
    const fs::path dir(o.dest);
    const fs::path target = dir / kFileName;
    const fs::path sidecar = dir / (std::string(kFileName) + ".sha256");
    const auto say = [&](const std::string& line) {
        if (!o.quiet) std::cerr << line << '\n';
    };

    std::string expected = o.sha256;
    if (expected.empty()) expected = recorded_hash(sidecar);

    if (fs::exists(target) && !o.force) {
        const std::string bytes = read_file(target);
        const std::string hash = sha256_hex(bytes);
        if (!expected.empty() && hash != expected) {
            throw ampr::IoError(target.string() + ": sha256 " + hash + " does not match " + expected);
        }
        check_shape(bytes, target.string());
        say(target.string() + " present, sha256 " + hash);
        return kExitOk;
    }

    say("fetching " + o.url);
    const std::string bytes = download(o.url);
    check_shape(bytes, o.url);
    const std::string hash = sha256_hex(bytes);
    if (!expected.empty() && hash != expected) {
        throw ampr::IoError("fetch-wine: sha256 " + hash + " does not match " + expected);
    }

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ampr::IoError("cannot create " + dir.string() + ": " + ec.message());
    const fs::path partial = target.string() + ".part";
    {
        std::ofstream out(partial, std::ios::binary);
        out << bytes;
        if (!out) throw ampr::IoError("cannot write " + partial.string());
    }
    fs::rename(partial, target, ec);
    if (ec) throw ampr::IoError("cannot move " + partial.string() + ": " + ec.message());
    {
        std::ofstream out(sidecar);
        out << hash << "  " << kFileName << '\n';
        if (!out) throw ampr::IoError("cannot write " + sidecar.string());
    }
    say("wrote " + target.string() + " (" + std::to_string(kRows) + " x " + std::to_string(kFeatures + 1) +
        "), sha256 " + hash);
    return kExitOk;
}

}  // namespace amprlasso
