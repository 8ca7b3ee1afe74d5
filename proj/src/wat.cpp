#include "watguard/wat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "watguard/errors.hpp"

namespace watguard {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            parts.push_back(s.substr(pos));
            return parts;
        }
        parts.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
}

bool parse_count(std::string_view s, std::uint64_t& out) {
    if (s.empty() || s.size() > 19) return false;
    out = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        out = out * 10 + std::uint64_t(c - '0');
    }
    return true;
}

bool parse_real(std::string_view s, double& out) {
    const std::string buf(s);
    char* end = nullptr;
    out = std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size() && !buf.empty();
}

// "<start>/<end>" with iso-8601 halves.
bool parse_window(std::string_view s, TimeWindow& w) {
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return false;
    const auto start = parse_iso8601(s.substr(0, slash));
    const auto end = parse_iso8601(s.substr(slash + 1));
    if (!start || !end) return false;
    w = TimeWindow{*start, *end};
    return w.valid();
}

std::string format_window(const TimeWindow& w) {
    return format_iso8601(w.start) + "/" + format_iso8601(w.end);
}

[[noreturn]] void bad_format(std::string_view source, std::size_t line_no,
                             const char* what) {
    throw FormatError(std::string(source) + ":" + std::to_string(line_no) +
                      ": " + what);
}

}  // namespace

std::string fmt_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double round_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

double access_frequency(std::uint64_t hits, std::uint64_t total) {
    if (total == 0)
        throw ZeroDenominatorError("frequency over an empty window");
    return double(hits) / double(total);
}

std::vector<UserProfile> build_profiles(const AccessLog& log) {
    std::map<std::string, UserProfile> by_user;
    for (const LogRecord& rec : log.records) {
        UserProfile& p = by_user[rec.client_ip];
        if (p.user.empty()) p.user = rec.client_ip;
        ++p.counts[rec.uri];
        ++p.total;
    }
    std::vector<UserProfile> out;
    out.reserve(by_user.size());
    for (auto& [ip, profile] : by_user) out.push_back(std::move(profile));
    return out;
}

const WatRow* TrainedWat::find(std::string_view uri) const {
    for (const WatRow& row : rows)
        if (row.uri == uri) return &row;
    return nullptr;
}

TrainedWat train_wat(const AccessLog& log, const TimeWindow& window) {
    const AccessLog slice = window_slice(log, window);
    const std::vector<UserProfile> profiles = build_profiles(slice);
    if (profiles.empty())
        throw EmptyTrainingError("no usable hits in the training window");

    // One frequency sample per user that touched the uri: their share of
    // their own traffic. Users who never saw the uri stay out of the
    // sample set (zeros would drown the dispersion).
    std::map<std::string, std::vector<double>> samples;
    for (const UserProfile& p : profiles)
        for (const auto& [uri, count] : p.counts)
            samples[uri].push_back(access_frequency(count, p.total));

    TrainedWat wat;
    wat.total_logs = slice.records.size();
    wat.num_users = profiles.size();
    wat.window = window;
    wat.rows.reserve(samples.size());
    for (const auto& [uri, fs] : samples) {
        double sum = 0.0;
        for (double f : fs) sum += f;
        const double mean = sum / double(fs.size());
        double var = 0.0;
        for (double f : fs) var += (f - mean) * (f - mean);
        WatRow row;
        row.uri = uri;
        row.mean_freq = round_sig12(mean);
        row.std_freq = round_sig12(std::sqrt(var / double(fs.size())));
        row.support = std::uint32_t(fs.size());
        wat.rows.push_back(std::move(row));
    }

    std::sort(wat.rows.begin(), wat.rows.end(),
              [](const WatRow& a, const WatRow& b) {
                  if (a.mean_freq != b.mean_freq)
                      return a.mean_freq > b.mean_freq;
                  return a.uri < b.uri;
              });
    for (std::size_t i = 0; i < wat.rows.size(); ++i)
        wat.rows[i].rank = std::uint32_t(i + 1);
    return wat;
}

std::vector<std::pair<std::string, std::uint32_t>> document_rank(
    const TrainedWat& wat) {
    std::vector<std::pair<std::string, std::uint32_t>> out;
    out.reserve(wat.rows.size());
    for (const WatRow& row : wat.rows) out.emplace_back(row.uri, row.rank);
    return out;
}

DocumentMatrix build_matrix(const AccessLog& log, const TrainedWat& wat,
                            const TimeWindow& window) {
    const AccessLog slice = window_slice(log, window);
    const std::vector<UserProfile> profiles = build_profiles(slice);

    DocumentMatrix m;
    m.num_users = profiles.size();
    m.window = window;
    for (const UserProfile& p : profiles) {
        for (const auto& [uri, count] : p.counts) {
            MatrixRow row;
            row.user = p.user;
            row.uri = uri;
            row.attempts = count;
            row.observed_freq = access_frequency(count, p.total);
            if (const WatRow* trained = wat.find(uri))
                row.expected_freq = trained->mean_freq;
            m.rows.push_back(std::move(row));
        }
    }
    return m;
}

std::string serialize_wat(const TrainedWat& wat) {
    std::string out = "#wat v1 total_logs=" + std::to_string(wat.total_logs) +
                      " users=" + std::to_string(wat.num_users) +
                      " window=" + format_window(wat.window) + "\n";
    for (const WatRow& row : wat.rows) {
        out += row.uri;
        out += '\t';
        out += fmt_g12(row.mean_freq);
        out += '\t';
        out += fmt_g12(row.std_freq);
        out += '\t';
        out += std::to_string(row.rank);
        out += '\t';
        out += std::to_string(row.support);
        out += '\n';
    }
    return out;
}

TrainedWat parse_wat(std::istream& in, std::string_view source) {
    std::string line;
    if (!std::getline(in, line)) bad_format(source, 1, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto head = split(line, ' ');
    if (head.size() != 5 || head[0] != "#wat" || head[1] != "v1")
        bad_format(source, 1, "not a #wat v1 file");

    TrainedWat wat;
    bool have_window = false;
    for (std::size_t i = 2; i < head.size(); ++i) {
        const auto eq = head[i].find('=');
        if (eq == std::string_view::npos)
            bad_format(source, 1, "bad header field");
        const auto key = head[i].substr(0, eq);
        const auto value = head[i].substr(eq + 1);
        if (key == "total_logs") {
            if (!parse_count(value, wat.total_logs))
                bad_format(source, 1, "bad total_logs");
        } else if (key == "users") {
            if (!parse_count(value, wat.num_users))
                bad_format(source, 1, "bad users");
        } else if (key == "window") {
            if (!parse_window(value, wat.window))
                bad_format(source, 1, "bad window");
            have_window = true;
        } else {
            bad_format(source, 1, "unknown header field");
        }
    }
    if (!have_window) bad_format(source, 1, "missing window");

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cols = split(line, '\t');
        if (cols.size() != 5) bad_format(source, line_no, "expected 5 columns");
        WatRow row;
        row.uri = std::string(cols[0]);
        std::uint64_t rank, support;
        if (row.uri.empty() || row.uri[0] != '/')
            bad_format(source, line_no, "bad uri");
        if (!parse_real(cols[1], row.mean_freq) || row.mean_freq < 0.0 ||
            row.mean_freq > 1.0)
            bad_format(source, line_no, "bad mean");
        if (!parse_real(cols[2], row.std_freq) || row.std_freq < 0.0)
            bad_format(source, line_no, "bad std");
        if (!parse_count(cols[3], rank) || rank != wat.rows.size() + 1)
            bad_format(source, line_no, "rank out of order");
        if (!parse_count(cols[4], support) || support == 0)
            bad_format(source, line_no, "bad support");
        row.rank = std::uint32_t(rank);
        row.support = std::uint32_t(support);
        wat.rows.push_back(std::move(row));
    }
    if (in.bad()) throw IoError("read failed: " + std::string(source));
    if (wat.rows.empty()) bad_format(source, line_no, "no entries");
    return wat;
}

void save_wat(const TrainedWat& wat, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create " + path.string());
    out << serialize_wat(wat);
    if (!out) throw IoError("write failed: " + path.string());
}

TrainedWat load_wat(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_wat(in, path.string());
}

std::string serialize_matrix(const DocumentMatrix& m) {
    std::string out = "#am v1 users=" + std::to_string(m.num_users) +
                      " window=" + format_window(m.window) + "\n";
    for (const MatrixRow& row : m.rows) {
        out += row.user;
        out += '\t';
        out += row.uri;
        out += '\t';
        out += std::to_string(row.attempts);
        out += '\t';
        out += fmt_g12(row.observed_freq);
        out += '\t';
        out += row.expected_freq ? fmt_g12(*row.expected_freq) : "-";
        out += '\n';
    }
    return out;
}

void save_matrix(const DocumentMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create " + path.string());
    out << serialize_matrix(m);
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace watguard
