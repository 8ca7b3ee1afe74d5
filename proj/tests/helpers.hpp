#ifndef WATGUARD_TESTS_HELPERS_HPP
#define WATGUARD_TESTS_HELPERS_HPP

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "watguard/log.hpp"
#include "watguard/time.hpp"

namespace watguard::testing {

inline LogRecord record(std::string ip, std::string uri,
                        std::uint64_t at_second = 0) {
    LogRecord rec;
    rec.client_ip = std::move(ip);
    rec.timestamp = make_instant({2024, 3, 1, 0, 0, 0}) +
                    std::chrono::seconds{at_second};
    rec.method = "GET";
    rec.uri = std::move(uri);
    rec.status = 200;
    rec.bytes = 512;
    rec.user_agent = "Mozilla/5.0";
    return rec;
}

// A log of (ip, uri) hits one second apart, in the order given.
inline AccessLog make_log(
    const std::vector<std::pair<std::string, std::string>>& hits) {
    AccessLog log;
    log.source = "test";
    for (std::size_t i = 0; i < hits.size(); ++i) {
        LogRecord rec = record(hits[i].first, hits[i].second, i);
        rec.line_no = i + 1;
        log.records.push_back(std::move(rec));
    }
    return log;
}

// Scratch directory wiped on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        path_ = base / ("watguard-test-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const {
        return path_ / name;
    }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace watguard::testing

#endif
