#ifndef WATGUARD_DETECTOR_HPP
#define WATGUARD_DETECTOR_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "watguard/wat.hpp"

namespace watguard {

struct Thresholds {
    double theta_abs = 0.05;       // absolute frequency deviation floor
    double k_sigma = 3.0;          // sigma multiplier over trained std
    std::uint64_t min_requests = 10;  // users below this are not judged
    double underflow_floor = 0.10;    // min trained mean for underflow checks
};

enum class Direction { Over, Under };

struct Alert {
    std::string user;
    std::string uri;
    std::uint64_t attempts = 0;
    double observed_freq = 0.0;
    double expected_freq = 0.0;
    double deviation = 0.0;        // |observed - expected|
    Direction direction = Direction::Over;
};

struct DetectionReport {
    std::vector<Alert> alerts;     // deviation desc, then user, then uri
    std::uint64_t users_total = 0;
    std::uint64_t users_checked = 0;   // users that met min_requests
    std::uint64_t users_flagged = 0;
    TimeWindow window{};
};

// Effective trigger for one uri: max(theta_abs, k_sigma * std).
double effective_threshold(const Thresholds& th, double std_freq);

// Walks the matrix and raises alerts:
//   over:  observed > expected and observed - expected > trigger
//   under: observed < expected, expected >= underflow_floor and
//          expected - observed > trigger
// Untrained uris count toward nothing (no expectation to deviate from).
DetectionReport detect(const DocumentMatrix& matrix, const TrainedWat& wat,
                       const Thresholds& th);

// Alert text:
//   attack from ip:<ip> req:<uri> attempts:<n>
//   underflow from ip:<ip> req:<uri> expected:<mean>
// followed by the trailer
//   #alerts=<n> users_flagged=<m> window=<start>/<end>
std::string format_alert(const Alert& a);
std::string render_report(const DetectionReport& rep);

// CSV dump: user,uri,attempts,observed,expected,deviation,direction
std::string report_to_csv(const DetectionReport& rep);
void write_report_csv(const DetectionReport& rep,
                      const std::filesystem::path& path);

// Reads a CSV produced by report_to_csv back into alert rows (used by the
// report command). Throws FormatError on a malformed file.
std::vector<Alert> parse_report_csv(std::istream& in,
                                    std::string_view source);

}  // namespace watguard

#endif
