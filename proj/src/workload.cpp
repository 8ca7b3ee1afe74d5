#include "watguard/workload.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <set>

#include "watguard/errors.hpp"

namespace watguard {

namespace {

constexpr std::array<const char*, 10> kDirWords = {
    "archive", "blog", "docs", "forum", "gallery",
    "help",    "img",  "news", "shop",  "wiki"};

constexpr std::array<const char*, 6> kFileStems = {
    "page", "item", "photo", "post", "index", "doc"};

constexpr std::array<const char*, 5> kFileExts = {
    ".html", ".html", ".jpg", ".php", ".png"};

constexpr std::array<const char*, 4> kAgents = {
    "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36",
    "Mozilla/5.0 (X11; Linux x86_64; rv:109.0) Gecko/20100101 Firefox/115.0",
    "Mozilla/5.0 (Macintosh; Intel Mac OS X 10_15_7) Safari/605.1.15",
    "Mozilla/5.0 (iPhone; CPU iPhone OS 16_5 like Mac OS X) Mobile/15E148"};

constexpr const char* kFloodAgent = "Mozilla/4.0 (compatible; MSIE 6.0)";

// Directory part of a page uri: itself for folder-style pages, the parent
// folder for file-style ones, "" for the root.
std::string base_of(const std::string& uri) {
    if (uri == "/") return "";
    const auto slash = uri.rfind('/');
    const std::string last = uri.substr(slash + 1);
    if (last.find('.') != std::string::npos)
        return slash == 0 ? "" : uri.substr(0, slash);
    return uri;
}

LogRecord make_record(const std::string& ip, Instant t,
                      const std::string& uri,
                      std::optional<std::string> referrer,
                      const char* agent, std::size_t line_no) {
    LogRecord rec;
    rec.client_ip = ip;
    rec.timestamp = t;
    rec.method = "GET";
    rec.uri = uri;
    rec.referrer = std::move(referrer);
    rec.status = 200;
    rec.bytes = synthetic_bytes(uri);
    rec.user_agent = agent;
    rec.line_no = line_no;
    return rec;
}

}  // namespace

std::uint64_t Rng::pick(std::uint64_t n) {
    return n == 0 ? 0 : next() % n;
}

double Rng::uniform01() {
    return double(next() >> 11) * 0x1.0p-53;
}

std::uint64_t synthetic_bytes(std::string_view uri) {
    std::uint64_t h = 14695981039346656037ull;  // fnv-1a
    for (char c : uri) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return 500 + h % 49500;
}

std::string user_ip(std::uint32_t u) {
    return "10." + std::to_string(100 + (u / 64516) % 154) + "." +
           std::to_string(1 + (u / 254) % 254) + "." +
           std::to_string(1 + u % 254);
}

const SitePage* SiteGraph::find(std::string_view uri) const {
    for (const SitePage& page : pages)
        if (page.uri == uri) return &page;
    return nullptr;
}

std::string SiteGraph::deepest_page() const {
    const SitePage* best = &pages.front();
    for (const SitePage& page : pages) {
        if (page.uri.size() > best->uri.size() ||
            (page.uri.size() == best->uri.size() && page.uri < best->uri))
            best = &page;
    }
    return best->uri;
}

SiteGraph generate_site(const SiteOptions& opt) {
    Rng rng(opt.seed);
    SiteGraph site;
    site.pages.push_back(SitePage{"/", {}});
    std::set<std::string> used = {"/"};

    for (std::uint32_t i = 1; i < opt.num_pages; ++i) {
        // Any page with spare out-degree can sprout the new one; linking
        // from an existing page keeps everything reachable from the root.
        std::vector<std::uint32_t> open;
        for (std::uint32_t j = 0; j < site.pages.size(); ++j)
            if (site.pages[j].links.size() < opt.branching) open.push_back(j);
        const std::uint32_t parent = open[rng.pick(open.size())];
        const std::string base = base_of(site.pages[parent].uri);

        std::string uri;
        if (rng.chance(0.35)) {
            uri = base + "/" + kDirWords[rng.pick(kDirWords.size())];
            if (used.count(uri)) uri += std::to_string(i);
        } else {
            char num[8];
            std::snprintf(num, sizeof num, "%02u", i);
            uri = base + "/" + kFileStems[rng.pick(kFileStems.size())] + num +
                  kFileExts[rng.pick(kFileExts.size())];
        }
        used.insert(uri);
        site.pages.push_back(SitePage{uri, {}});
        site.pages[parent].links.push_back(i);

        // Links back into the older pages for cross-traffic. Skipping the
        // parent avoids two-page orbits that a uniform walk would circle,
        // inflating one user's count on one page far beyond the crowd's.
        const std::uint64_t extras =
            opt.branching > 1 ? 1 + rng.pick(opt.branching - 1) : 0;
        for (std::uint64_t e = 0; e < extras; ++e) {
            auto& links = site.pages[i].links;
            if (links.size() >= opt.branching) break;
            const auto target = std::uint32_t(rng.pick(i));
            if (target != parent &&
                std::find(links.begin(), links.end(), target) == links.end())
                links.push_back(target);
        }
    }
    return site;
}

std::string serialize_site(const SiteGraph& site) {
    std::string out;
    for (const SitePage& page : site.pages) {
        out += page.uri;
        out.push_back('\t');
        for (std::size_t i = 0; i < page.links.size(); ++i) {
            if (i > 0) out.push_back(',');
            out += site.pages[page.links[i]].uri;
        }
        out.push_back('\n');
    }
    return out;
}

SiteGraph parse_site(std::istream& in, std::string_view source) {
    auto fail = [&](std::size_t line_no, const char* what) -> void {
        throw FormatError(std::string(source) + ":" +
                          std::to_string(line_no) + ": " + what);
    };

    SiteGraph site;
    std::map<std::string, std::uint32_t> index;
    std::vector<std::string> link_text;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) fail(line_no, "expected uri\\tlinks");
        std::string uri = line.substr(0, tab);
        if (uri.empty() || uri[0] != '/') fail(line_no, "bad page uri");
        if (!index.emplace(uri, std::uint32_t(site.pages.size())).second)
            fail(line_no, "duplicate page");
        site.pages.push_back(SitePage{std::move(uri), {}});
        link_text.push_back(line.substr(tab + 1));
    }
    if (in.bad()) throw IoError("read failed: " + std::string(source));
    if (site.pages.empty() || site.pages[0].uri != "/")
        fail(line_no, "first page must be /");

    for (std::size_t i = 0; i < link_text.size(); ++i) {
        const std::string& text = link_text[i];
        std::size_t pos = 0;
        while (pos < text.size()) {
            auto comma = text.find(',', pos);
            if (comma == std::string::npos) comma = text.size();
            const std::string target = text.substr(pos, comma - pos);
            const auto it = index.find(target);
            if (it == index.end()) fail(i + 1, "link to unknown page");
            site.pages[i].links.push_back(it->second);
            pos = comma + 1;
        }
    }
    return site;
}

AccessLog simulate_session(const SiteGraph& site, const std::string& ip,
                           Instant start, Instant hard_end,
                           const SessionOptions& opt, Rng& rng) {
    using std::chrono::seconds;
    const double jitter =
        1.0 - opt.len_jitter + 2.0 * opt.len_jitter * rng.uniform01();
    const auto len = std::max<std::uint64_t>(
        1, std::uint64_t(std::llround(opt.mean_session_len * jitter)));
    const char* agent = kAgents[rng.pick(kAgents.size())];

    AccessLog log;
    log.source = ip;
    Instant t = start;
    std::uint32_t cur = 0;
    std::vector<std::uint8_t> visits(site.pages.size(), 0);
    std::vector<std::uint32_t> pool;
    std::optional<std::string> referrer;
    for (std::uint64_t step = 0; step < len; ++step) {
        if (t >= hard_end) t = hard_end - seconds{1};
        log.records.push_back(make_record(ip, t, site.pages[cur].uri,
                                          referrer, agent, step + 1));
        if (visits[cur] < 255) ++visits[cur];
        const auto& links = site.pages[cur].links;
        std::uint8_t least = 255;
        for (auto l : links) least = std::min(least, visits[l]);
        if (links.empty() || least >= 2 || rng.chance(opt.restart_prob)) {
            cur = 0;
            referrer = std::nullopt;  // typed-in entry, no referrer
        } else {
            referrer = site.pages[cur].uri;
            pool.clear();
            for (auto l : links)
                if (visits[l] == least) pool.push_back(l);
            cur = pool[rng.pick(pool.size())];
        }
        t += seconds{1 + std::int64_t(rng.pick(2 * opt.gap_seconds))};
    }
    return log;
}

AccessLog simulate_normal(const SiteGraph& site, const WorkloadOptions& opt) {
    using std::chrono::seconds;
    Rng rng(opt.seed);
    const Instant hard_end = opt.start + seconds{std::int64_t(opt.duration_seconds)};

    std::vector<AccessLog> sessions;
    sessions.reserve(opt.num_users);
    for (std::uint32_t u = 0; u < opt.num_users; ++u) {
        const Instant begin =
            opt.start + seconds{std::int64_t(rng.pick(opt.duration_seconds / 2))};
        sessions.push_back(simulate_session(site, user_ip(u), begin,
                                            hard_end, opt.session, rng));
    }
    AccessLog merged = merge_logs(sessions);
    merged.source = "simulated";
    for (std::size_t i = 0; i < merged.records.size(); ++i)
        merged.records[i].line_no = i + 1;
    return merged;
}

AccessLog simulate_attack(const SiteGraph& site, const AttackOptions& opt) {
    using std::chrono::seconds;
    std::string target = opt.target;
    if (target.empty()) {
        target = site.deepest_page();
    } else {
        const auto canon = normalize_uri(target);
        if (!canon || !site.find(*canon))
            throw UnknownTargetError("no such page: " + target);
        target = *canon;
    }

    AccessLog log;
    log.source = "attack";
    for (std::uint32_t i = 0; i < opt.attempts; ++i) {
        const Instant t =
            opt.start + seconds{std::int64_t(i) * opt.gap_ms / 1000};
        log.records.push_back(
            make_record(opt.ip, t, target, std::nullopt, kFloodAgent, i + 1));
    }
    return log;
}

AccessLog merge_logs(const std::vector<AccessLog>& logs) {
    AccessLog out;
    out.source = "merged";
    std::size_t total = 0;
    for (const AccessLog& log : logs) {
        total += log.records.size();
        out.skipped += log.skipped;
    }
    out.records.reserve(total);
    for (const AccessLog& log : logs)
        out.records.insert(out.records.end(), log.records.begin(),
                           log.records.end());
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const LogRecord& a, const LogRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    return out;
}

}  // namespace watguard
