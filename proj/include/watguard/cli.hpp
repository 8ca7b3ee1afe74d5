#ifndef WATGUARD_CLI_HPP
#define WATGUARD_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "watguard/detector.hpp"
#include "watguard/graph.hpp"
#include "watguard/log.hpp"
#include "watguard/wat.hpp"
#include "watguard/workload.hpp"

namespace watguard::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kAnomalies = 1;   // detection ran and flagged users
inline constexpr int kUsage = 2;       // bad flags / arguments
inline constexpr int kDataError = 3;   // unreadable or malformed input

struct CommonOptions {
    LogFormat log_format = LogFormat::Combined;
    bool quiet = false;     // suppress progress chatter, keep results
};

// Window selection: explicit iso-8601 bounds, or the trailing N seconds of
// the log, or the whole log span when nothing is given.
struct WindowSpec {
    std::optional<std::string> start;
    std::optional<std::string> end;
    std::optional<std::uint64_t> last_seconds;

    // Resolves against the log span. Throws UsageError on unparsable
    // bounds or an inverted window.
    TimeWindow resolve(const AccessLog& log) const;
};

struct TrainArgs {
    std::filesystem::path log_path;
    std::filesystem::path out_path = "trained.dat";
    WindowSpec window{};
};

struct DetectArgs {
    std::filesystem::path log_path;
    std::filesystem::path wat_path = "trained.dat";
    std::filesystem::path matrix_out = "am_test.dat";
    std::optional<std::filesystem::path> report_out;  // alert text copy
    std::optional<std::filesystem::path> csv_out;
    Thresholds thresholds{};
    WindowSpec window{};
};

struct BaselineArgs {
    std::filesystem::path log_path;
    std::filesystem::path wat_path = "trained.dat";
    std::uint32_t k = 5;
    double sigma = 0.0;                 // <= 0: self-tuning
    std::uint32_t dims = 32;            // feature vector length cap
    std::uint32_t top = 10;             // ranking rows echoed to stdout
    std::optional<std::filesystem::path> scores_out;
    std::optional<std::filesystem::path> edges_out;
    WindowSpec window{};
};

struct SimulateArgs {
    std::filesystem::path out_path = "access.log";
    std::uint32_t num_users = 50;
    std::uint64_t seed = 42;
    std::uint32_t num_pages = 40;
    double mean_session_len = 30.0;
    std::uint64_t duration_seconds = 21600;
    bool with_attack = false;
    std::string attack_ip = "10.0.0.2";
    std::string attack_target;          // empty = deepest site page
    std::uint32_t attack_attempts = 191;
    std::optional<std::filesystem::path> site_out;
};

struct BenchArgs {
    std::vector<std::uint32_t> sizes = {1000, 2000, 4000, 8000};
    std::uint32_t reps = 3;
    std::uint64_t seed = 7;
    std::uint32_t k = 5;
};

struct ReportArgs {
    std::filesystem::path csv_path;
    std::uint32_t top = 20;
};

int run_train(const TrainArgs& args, const CommonOptions& common,
              std::ostream& out, std::ostream& err);
int run_detect(const DetectArgs& args, const CommonOptions& common,
               std::ostream& out, std::ostream& err);
int run_baseline(const BaselineArgs& args, const CommonOptions& common,
                 std::ostream& out, std::ostream& err);
int run_simulate(const SimulateArgs& args, const CommonOptions& common,
                 std::ostream& out, std::ostream& err);
int run_bench(const BenchArgs& args, const CommonOptions& common,
              std::ostream& out, std::ostream& err);
int run_report(const ReportArgs& args, const CommonOptions& common,
               std::ostream& out, std::ostream& err);

// Least-squares slope of log(time) against log(size) — the growth
// exponent the bench table reports.
double fit_exponent(const std::vector<std::uint32_t>& sizes,
                    const std::vector<double>& times);

}  // namespace watguard::cli

#endif
