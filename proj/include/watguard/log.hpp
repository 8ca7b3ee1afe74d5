#ifndef WATGUARD_LOG_HPP
#define WATGUARD_LOG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "watguard/time.hpp"

namespace watguard {

enum class LogFormat { Combined, Common };

// One parsed access-log line. The uri is stored canonicalized (see
// normalize_uri); referrer and user_agent use the "-" sentinel convention,
// mapped to absent here.
struct LogRecord {
    std::string client_ip;
    Instant timestamp{};
    int tz_offset_minutes = 0;
    std::string method;
    std::string uri;
    std::optional<std::string> referrer;
    int status = 0;
    std::optional<std::uint64_t> bytes;
    std::optional<std::string> user_agent;
    std::size_t line_no = 0;

    friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct ParseFailure {
    std::size_t line_no = 0;
    std::string reason;
};

using ParseResult = std::variant<LogRecord, ParseFailure>;

struct AccessLog {
    std::vector<LogRecord> records;
    std::size_t skipped = 0;
    std::string source;
};

// Parses one line of Common or Combined Log Format:
//   <ip> <ident> <authuser> [<dd>/<Mon>/<yyyy>:<hh>:<mm>:<ss> <+zzzz>]
//   "<method> <target> <protocol>" <status> <bytes|->
//   ["<referrer|->" "<agent>"]
// The two trailing quoted fields are optional (Common Log Format lacks
// them). A line that does not match yields a ParseFailure, never a throw.
ParseResult parse_line(std::string_view line, std::size_t line_no);

// Reads every line; malformed lines are tallied into skipped. Always
// satisfies records.size() + skipped == line count. Throws IoError if the
// stream fails mid-read.
AccessLog parse_log(std::istream& in, std::string source);
AccessLog parse_log_file(const std::filesystem::path& path);

// Canonicalizes a request-target so that query noise and encoding quirks do
// not fragment per-document counts:
//   - query string and fragment dropped
//   - percent-triples decoded once; "%25", "%2F", "%3F", "%23" and encoded
//     control characters are kept (uppercased) so the result is a fixed
//     point and survives re-parsing
//   - trailing "/" removed except for the root
// Returns nullopt for non-path targets ("*", "http://..", "host:port"),
// bad percent-escapes, or targets containing control characters.
std::optional<std::string> normalize_uri(std::string_view raw);

// Re-encodes a canonical uri for embedding in a quoted request line
// (space, '"', '\' back to percent-triples).
std::string encode_uri_for_log(std::string_view uri);

// Records with w.start <= timestamp < w.end, input order preserved.
// Callers pass timestamp-ordered logs; the slice does not sort.
AccessLog window_slice(const AccessLog& log, const TimeWindow& w);

// Serialization back to log text. Parsing the result reproduces the record
// (with the line number the parser assigns).
std::string to_combined_line(const LogRecord& rec,
                             LogFormat format = LogFormat::Combined);
std::string render_log(const AccessLog& log,
                       LogFormat format = LogFormat::Combined);
void write_log_file(const AccessLog& log, const std::filesystem::path& path,
                    LogFormat format = LogFormat::Combined);

bool is_valid_ip(std::string_view s);

// [min_ts, max_ts + 1s); nullopt for an empty log.
std::optional<TimeWindow> log_span(const AccessLog& log);

}  // namespace watguard

#endif
