#include "watguard/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>
#include <unordered_map>

#include "watguard/errors.hpp"

namespace watguard {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q.push_back('"');
        q.push_back(c);
    }
    q.push_back('"');
    return q;
}

// One CSV line -> fields, honoring quoted cells.
bool csv_split(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return !quoted;
}

constexpr const char* kCsvHeader =
    "user,uri,attempts,observed,expected,deviation,direction";

}  // namespace

double effective_threshold(const Thresholds& th, double std_freq) {
    return std::max(th.theta_abs, th.k_sigma * std_freq);
}

DetectionReport detect(const DocumentMatrix& matrix, const TrainedWat& wat,
                       const Thresholds& th) {
    DetectionReport rep;
    rep.users_total = matrix.num_users;
    rep.window = matrix.window;

    std::unordered_map<std::string_view, const WatRow*> trained;
    trained.reserve(wat.rows.size());
    for (const WatRow& row : wat.rows) trained.emplace(row.uri, &row);

    // Popular uris where not-visiting is itself a signal.
    std::vector<const WatRow*> floor_rows;
    for (const WatRow& row : wat.rows)
        if (row.mean_freq >= th.underflow_floor) floor_rows.push_back(&row);

    // Matrix rows are grouped by user with uris ascending inside a group.
    std::set<std::string_view> flagged;
    for (std::size_t lo = 0; lo < matrix.rows.size();) {
        std::size_t hi = lo;
        std::uint64_t total = 0;
        while (hi < matrix.rows.size() &&
               matrix.rows[hi].user == matrix.rows[lo].user)
            total += matrix.rows[hi++].attempts;
        const std::string& user = matrix.rows[lo].user;

        if (total < th.min_requests) {
            lo = hi;
            continue;
        }
        ++rep.users_checked;

        auto user_row = [&](std::string_view uri) -> const MatrixRow* {
            auto it = std::lower_bound(
                matrix.rows.begin() + lo, matrix.rows.begin() + hi, uri,
                [](const MatrixRow& r, std::string_view u) { return r.uri < u; });
            return (it != matrix.rows.begin() + hi && it->uri == uri)
                       ? &*it
                       : nullptr;
        };

        for (std::size_t i = lo; i < hi; ++i) {
            const MatrixRow& row = matrix.rows[i];
            const double expected = row.expected_freq.value_or(0.0);
            const auto it = trained.find(row.uri);
            const double sd = it != trained.end() ? it->second->std_freq : 0.0;
            if (row.observed_freq > expected &&
                row.observed_freq - expected > effective_threshold(th, sd)) {
                rep.alerts.push_back(Alert{user, row.uri, row.attempts,
                                           row.observed_freq, expected,
                                           row.observed_freq - expected,
                                           Direction::Over});
                flagged.insert(user);
            }
        }
        for (const WatRow* tr : floor_rows) {
            const MatrixRow* row = user_row(tr->uri);
            const double observed = row ? row->observed_freq : 0.0;
            const std::uint64_t attempts = row ? row->attempts : 0;
            if (observed < tr->mean_freq &&
                tr->mean_freq - observed >
                    effective_threshold(th, tr->std_freq)) {
                rep.alerts.push_back(Alert{user, tr->uri, attempts, observed,
                                           tr->mean_freq,
                                           tr->mean_freq - observed,
                                           Direction::Under});
                flagged.insert(user);
            }
        }
        lo = hi;
    }

    rep.users_flagged = flagged.size();
    std::sort(rep.alerts.begin(), rep.alerts.end(),
              [](const Alert& a, const Alert& b) {
                  if (a.deviation != b.deviation)
                      return a.deviation > b.deviation;
                  if (a.user != b.user) return a.user < b.user;
                  return a.uri < b.uri;
              });
    return rep;
}

std::string format_alert(const Alert& a) {
    if (a.direction == Direction::Over)
        return "attack from ip:" + a.user + " req:" + a.uri +
               " attempts:" + std::to_string(a.attempts);
    return "underflow from ip:" + a.user + " req:" + a.uri +
           " expected:" + fmt_g12(a.expected_freq);
}

std::string render_report(const DetectionReport& rep) {
    std::string out;
    for (const Alert& a : rep.alerts) {
        out += format_alert(a);
        out.push_back('\n');
    }
    out += "#alerts=" + std::to_string(rep.alerts.size()) +
           " users_flagged=" + std::to_string(rep.users_flagged) +
           " window=" + format_iso8601(rep.window.start) + "/" +
           format_iso8601(rep.window.end) + "\n";
    return out;
}

std::string report_to_csv(const DetectionReport& rep) {
    std::string out = kCsvHeader;
    out.push_back('\n');
    for (const Alert& a : rep.alerts) {
        out += csv_field(a.user);
        out.push_back(',');
        out += csv_field(a.uri);
        out.push_back(',');
        out += std::to_string(a.attempts);
        out.push_back(',');
        out += fmt_g12(a.observed_freq);
        out.push_back(',');
        out += fmt_g12(a.expected_freq);
        out.push_back(',');
        out += fmt_g12(a.deviation);
        out.push_back(',');
        out += a.direction == Direction::Over ? "over" : "under";
        out.push_back('\n');
    }
    return out;
}

void write_report_csv(const DetectionReport& rep,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create " + path.string());
    out << report_to_csv(rep);
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Alert> parse_report_csv(std::istream& in,
                                    std::string_view source) {
    auto fail = [&](std::size_t line_no, const char* what) -> void {
        throw FormatError(std::string(source) + ":" +
                          std::to_string(line_no) + ": " + what);
    };

    std::string line;
    if (!std::getline(in, line)) fail(1, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) fail(1, "unexpected csv header");

    std::vector<Alert> alerts;
    std::vector<std::string> cols;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!csv_split(line, cols) || cols.size() != 7)
            fail(line_no, "expected 7 columns");
        Alert a;
        a.user = cols[0];
        a.uri = cols[1];
        char* end = nullptr;
        a.attempts = std::strtoull(cols[2].c_str(), &end, 10);
        if (end != cols[2].c_str() + cols[2].size() || cols[2].empty())
            fail(line_no, "bad attempts");
        auto real = [&](const std::string& s, double& out) {
            out = std::strtod(s.c_str(), &end);
            if (end != s.c_str() + s.size() || s.empty())
                fail(line_no, "bad number");
        };
        real(cols[3], a.observed_freq);
        real(cols[4], a.expected_freq);
        real(cols[5], a.deviation);
        if (cols[6] == "over")
            a.direction = Direction::Over;
        else if (cols[6] == "under")
            a.direction = Direction::Under;
        else
            fail(line_no, "bad direction");
        alerts.push_back(std::move(a));
    }
    if (in.bad()) throw IoError("read failed: " + std::string(source));
    return alerts;
}

}  // namespace watguard
