#ifndef WATGUARD_WAT_HPP
#define WATGUARD_WAT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "watguard/log.hpp"
#include "watguard/time.hpp"

namespace watguard {

// Per-user request tally inside one observation window.
struct UserProfile {
    std::string user;                          // client ip
    std::map<std::string, std::uint64_t> counts;  // uri -> hits
    std::uint64_t total = 0;                   // sum of counts

    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

struct WatRow {
    std::string uri;
    double mean_freq = 0.0;
    double std_freq = 0.0;
    std::uint32_t rank = 0;      // 1 = most frequently accessed
    std::uint32_t support = 0;   // number of users that touched the uri

    friend bool operator==(const WatRow&, const WatRow&) = default;
};

struct TrainedWat {
    std::vector<WatRow> rows;    // sorted by rank ascending
    std::uint64_t total_logs = 0;
    std::uint64_t num_users = 0;
    TimeWindow window{};

    const WatRow* find(std::string_view uri) const;

    friend bool operator==(const TrainedWat&, const TrainedWat&) = default;
};

// One row of the test-time document matrix: a user's observed frequency for
// a uri next to the trained expectation.
struct MatrixRow {
    std::string user;
    std::string uri;
    std::uint64_t attempts = 0;      // raw hit count
    double observed_freq = 0.0;      // attempts / user total
    std::optional<double> expected_freq;  // trained mean, absent if untrained
};

struct DocumentMatrix {
    std::vector<MatrixRow> rows;     // grouped by user, uris sorted
    std::uint64_t num_users = 0;
    TimeWindow window{};
};

// hits / total, the basic frequency quotient. Throws ZeroDenominatorError
// when total == 0.
double access_frequency(std::uint64_t hits, std::uint64_t total);

// Rounds to 12 significant digits (the on-disk precision), so a value that
// went through round_sig12 survives a write/parse cycle unchanged.
double round_sig12(double v);

// The on-disk rendering of a real ("%.12g").
std::string fmt_g12(double v);

// Groups records by client ip. Keys iterate in sorted order.
std::vector<UserProfile> build_profiles(const AccessLog& log);

// Trains the access table: every user who touched a uri contributes one
// frequency sample for it (their hit count over their own request total);
// mean and population std are taken across those users, ranks assigned by
// mean descending (ties broken by uri ascending). Throws
// EmptyTrainingError on an empty log.
TrainedWat train_wat(const AccessLog& log, const TimeWindow& window);

// The popularity ordering: (uri, rank) pairs, rank ascending.
std::vector<std::pair<std::string, std::uint32_t>> document_rank(
    const TrainedWat& wat);

// Builds the per-user observation matrix for a detection window.
DocumentMatrix build_matrix(const AccessLog& log, const TrainedWat& wat,
                            const TimeWindow& window);

// Table serialization:
//   #wat v1 total_logs=<n> users=<n> window=<start>/<end>
//   <uri>\t<mean>\t<std>\t<rank>\t<support>
// Numbers use %.12g; loading a saved table reproduces it exactly.
std::string serialize_wat(const TrainedWat& wat);
TrainedWat parse_wat(std::istream& in, std::string_view source);
void save_wat(const TrainedWat& wat, const std::filesystem::path& path);
TrainedWat load_wat(const std::filesystem::path& path);

// Matrix serialization (the test-side artifact):
//   #am v1 users=<n> window=<start>/<end>
//   <user>\t<uri>\t<attempts>\t<observed>\t<expected|->
std::string serialize_matrix(const DocumentMatrix& m);
void save_matrix(const DocumentMatrix& m, const std::filesystem::path& path);

}  // namespace watguard

#endif
