#include "watguard/log.hpp"

#include <arpa/inet.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <sstream>

#include "watguard/errors.hpp"

namespace watguard {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

bool is_ctl(unsigned char c) { return c < 0x20 || c == 0x7f; }

// Bytes that must stay percent-encoded inside a canonical uri: decoding
// them would change how the uri re-parses (separators) or make the string
// unprintable (controls).
bool keep_encoded(unsigned char c) {
    return c == '%' || c == '/' || c == '?' || c == '#' || is_ctl(c);
}

// Cursor over one log line.
struct Scan {
    std::string_view s;
    std::size_t pos = 0;

    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }

    bool skip_spaces() {
        const std::size_t start = pos;
        while (!done() && s[pos] == ' ') ++pos;
        return pos > start;
    }

    // Token up to the next space; empty at end of line.
    std::string_view token() {
        const std::size_t start = pos;
        while (!done() && s[pos] != ' ') ++pos;
        return s.substr(start, pos - start);
    }

    // [ ... ] with no nesting.
    bool bracketed(std::string_view& out) {
        if (done() || s[pos] != '[') return false;
        const std::size_t start = ++pos;
        while (!done() && s[pos] != ']') ++pos;
        if (done()) return false;
        out = s.substr(start, pos - start);
        ++pos;
        return true;
    }

    // " ... " honoring backslash escapes; unescapes into out.
    bool quoted(std::string& out) {
        if (done() || s[pos] != '"') return false;
        ++pos;
        out.clear();
        while (!done()) {
            char c = s[pos++];
            if (c == '"') return true;
            if (c == '\\') {
                if (done()) return false;
                out.push_back(s[pos++]);
            } else {
                out.push_back(c);
            }
        }
        return false;
    }
};

// dd/Mon/yyyy:HH:MM:SS +zzzz
bool parse_clock(std::string_view s, Instant& when, int& offset_min) {
    if (s.size() != 26) return false;
    auto digits = [&](std::size_t pos, std::size_t len, int& out) {
        out = 0;
        for (std::size_t i = 0; i < len; ++i) {
            char c = s[pos + i];
            if (c < '0' || c > '9') return false;
            out = out * 10 + (c - '0');
        }
        return true;
    };
    int d, y, h, mi, se, oh, om;
    if (!digits(0, 2, d) || s[2] != '/') return false;
    const unsigned mo = month_from_abbrev(s.substr(3, 3));
    if (mo == 0 || s[6] != '/') return false;
    if (!digits(7, 4, y) || s[11] != ':') return false;
    if (!digits(12, 2, h) || s[14] != ':') return false;
    if (!digits(15, 2, mi) || s[17] != ':') return false;
    if (!digits(18, 2, se) || s[20] != ' ') return false;
    const char sign = s[21];
    if (sign != '+' && sign != '-') return false;
    if (!digits(22, 2, oh) || !digits(24, 2, om)) return false;
    if (h > 23 || mi > 59 || se > 60 || oh > 23 || om > 59) return false;

    using namespace std::chrono;
    const auto ymd = year{y} / month{mo} / day{unsigned(d)};
    if (!ymd.ok()) return false;
    offset_min = oh * 60 + om;
    if (sign == '-') offset_min = -offset_min;
    when = sys_days{ymd} + hours{h} + minutes{mi} + seconds{se} -
           minutes{offset_min};
    return true;
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
    if (s.empty() || s.size() > 19) return false;
    out = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        out = out * 10 + std::uint64_t(c - '0');
    }
    return true;
}

ParseFailure fail(std::size_t line_no, std::string reason) {
    return ParseFailure{line_no, std::move(reason)};
}

void append_triple(std::string& out, unsigned char c) {
    char buf[4];
    std::snprintf(buf, sizeof buf, "%%%02X", c);
    out += buf;
}

}  // namespace

bool is_valid_ip(std::string_view s) {
    if (s.size() > 45) return false;
    char buf[46];
    std::memcpy(buf, s.data(), s.size());
    buf[s.size()] = '\0';
    unsigned char scratch[16];
    return inet_pton(AF_INET, buf, scratch) == 1 ||
           inet_pton(AF_INET6, buf, scratch) == 1;
}

std::optional<std::string> normalize_uri(std::string_view raw) {
    if (raw.empty() || raw[0] != '/') return std::nullopt;
    const auto cut = raw.find_first_of("?#");
    std::string_view path = raw.substr(0, cut);

    std::string out;
    out.reserve(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        const char c = path[i];
        if (c == '%') {
            if (i + 2 >= path.size()) return std::nullopt;
            const int hi = hex_value(path[i + 1]);
            const int lo = hex_value(path[i + 2]);
            if (hi < 0 || lo < 0) return std::nullopt;
            const auto v = static_cast<unsigned char>(hi * 16 + lo);
            if (keep_encoded(v))
                append_triple(out, v);
            else
                out.push_back(static_cast<char>(v));
            i += 2;
        } else if (is_ctl(static_cast<unsigned char>(c))) {
            return std::nullopt;
        } else {
            out.push_back(c);
        }
    }
    while (out.size() > 1 && out.back() == '/') out.pop_back();
    return out;
}

std::string encode_uri_for_log(std::string_view uri) {
    std::string out;
    out.reserve(uri.size());
    for (char c : uri) {
        if (c == ' ' || c == '"' || c == '\\')
            append_triple(out, static_cast<unsigned char>(c));
        else
            out.push_back(c);
    }
    return out;
}

ParseResult parse_line(std::string_view line, std::size_t line_no) {
    Scan scan{line};
    if (scan.done()) return fail(line_no, "empty line");

    LogRecord rec;
    rec.line_no = line_no;

    const std::string_view ip = scan.token();
    if (!is_valid_ip(ip)) return fail(line_no, "bad client address");
    rec.client_ip = std::string(ip);

    if (!scan.skip_spaces()) return fail(line_no, "truncated after address");
    if (scan.token().empty()) return fail(line_no, "missing ident");
    if (!scan.skip_spaces()) return fail(line_no, "truncated after ident");
    if (scan.token().empty()) return fail(line_no, "missing authuser");
    if (!scan.skip_spaces()) return fail(line_no, "truncated after authuser");

    std::string_view clock;
    if (!scan.bracketed(clock)) return fail(line_no, "missing clock field");
    if (!parse_clock(clock, rec.timestamp, rec.tz_offset_minutes))
        return fail(line_no, "bad clock field");
    if (!scan.skip_spaces()) return fail(line_no, "truncated after clock");

    std::string request;
    if (!scan.quoted(request)) return fail(line_no, "missing request field");
    {
        const auto sp1 = request.find(' ');
        const auto sp2 =
            sp1 == std::string::npos ? sp1 : request.find(' ', sp1 + 1);
        if (sp2 == std::string::npos ||
            request.find(' ', sp2 + 1) != std::string::npos)
            return fail(line_no, "bad request field");
        rec.method = request.substr(0, sp1);
        if (rec.method.empty()) return fail(line_no, "bad request field");
        auto uri = normalize_uri(
            std::string_view(request).substr(sp1 + 1, sp2 - sp1 - 1));
        if (!uri) return fail(line_no, "unsupported request target");
        rec.uri = std::move(*uri);
        if (request.compare(sp2 + 1, 5, "HTTP/") != 0)
            return fail(line_no, "bad request protocol");
    }
    if (!scan.skip_spaces()) return fail(line_no, "truncated after request");

    std::uint64_t status;
    if (!parse_u64(scan.token(), status) || status < 100 || status > 599)
        return fail(line_no, "bad status");
    rec.status = static_cast<int>(status);
    if (!scan.skip_spaces()) return fail(line_no, "truncated after status");

    const std::string_view bytes = scan.token();
    if (bytes == "-") {
        rec.bytes = std::nullopt;
    } else {
        std::uint64_t n;
        if (!parse_u64(bytes, n)) return fail(line_no, "bad byte count");
        rec.bytes = n;
    }

    // Common Log Format stops here; Combined adds the two quoted fields.
    scan.skip_spaces();
    if (!scan.done()) {
        std::string ref, agent;
        if (!scan.quoted(ref)) return fail(line_no, "bad referrer field");
        if (!scan.skip_spaces() || !scan.quoted(agent))
            return fail(line_no, "bad agent field");
        if (ref != "-") rec.referrer = std::move(ref);
        if (agent != "-") rec.user_agent = std::move(agent);
        scan.skip_spaces();
        if (!scan.done()) return fail(line_no, "trailing garbage");
    }
    return rec;
}

AccessLog parse_log(std::istream& in, std::string source) {
    AccessLog log;
    log.source = std::move(source);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ParseResult r = parse_line(line, line_no);
        if (auto* rec = std::get_if<LogRecord>(&r))
            log.records.push_back(std::move(*rec));
        else
            ++log.skipped;
    }
    if (in.bad()) throw IoError("read failed: " + log.source);
    return log;
}

AccessLog parse_log_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_log(in, path.string());
}

AccessLog window_slice(const AccessLog& log, const TimeWindow& w) {
    AccessLog out;
    out.source = log.source;
    for (const LogRecord& rec : log.records)
        if (w.contains(rec.timestamp)) out.records.push_back(rec);
    return out;
}

std::string to_combined_line(const LogRecord& rec, LogFormat format) {
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') q.push_back('\\');
            q.push_back(c);
        }
        q.push_back('"');
        return q;
    };

    std::string out = rec.client_ip;
    out += " - - [";
    out += format_clf_time(rec.timestamp, rec.tz_offset_minutes);
    out += "] \"";
    out += rec.method;
    out += ' ';
    out += encode_uri_for_log(rec.uri);
    out += " HTTP/1.1\" ";
    out += std::to_string(rec.status);
    out += ' ';
    out += rec.bytes ? std::to_string(*rec.bytes) : "-";
    if (format == LogFormat::Combined) {
        out += ' ';
        out += rec.referrer ? quote(*rec.referrer) : "\"-\"";
        out += ' ';
        out += quote(rec.user_agent.value_or("-"));
    }
    return out;
}

std::string render_log(const AccessLog& log, LogFormat format) {
    std::string out;
    for (const LogRecord& rec : log.records) {
        out += to_combined_line(rec, format);
        out.push_back('\n');
    }
    return out;
}

void write_log_file(const AccessLog& log, const std::filesystem::path& path,
                    LogFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create " + path.string());
    out << render_log(log, format);
    if (!out) throw IoError("write failed: " + path.string());
}

std::optional<TimeWindow> log_span(const AccessLog& log) {
    if (log.records.empty()) return std::nullopt;
    Instant lo = log.records.front().timestamp;
    Instant hi = lo;
    for (const LogRecord& rec : log.records) {
        lo = std::min(lo, rec.timestamp);
        hi = std::max(hi, rec.timestamp);
    }
    return TimeWindow{lo, hi + std::chrono::seconds{1}};
}

}  // namespace watguard
