#ifndef WATGUARD_WORKLOAD_HPP
#define WATGUARD_WORKLOAD_HPP

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "watguard/log.hpp"
#include "watguard/time.hpp"

namespace watguard {

// Deterministic random source. All draws go through hand-rolled transforms
// (std::uniform_int_distribution and friends differ across standard
// libraries, which would break seed-pinned fixtures).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }
    // [0, n)
    std::uint64_t pick(std::uint64_t n);
    // [0, 1)
    double uniform01();
    bool chance(double p) { return uniform01() < p; }

private:
    std::mt19937_64 eng_;
};

// Browsable site: pages[0] is the root "/" and every page is reachable
// from it by construction.
struct SitePage {
    std::string uri;
    std::vector<std::uint32_t> links;  // indices into SiteGraph::pages
};

struct SiteGraph {
    std::vector<SitePage> pages;

    const SitePage* find(std::string_view uri) const;
    // The page farthest from the root by path depth (longest uri, ties
    // lexicographic ascending); the natural flood target.
    std::string deepest_page() const;
};

struct SiteOptions {
    std::uint32_t num_pages = 40;
    std::uint32_t branching = 6;  // max out-degree
    std::uint64_t seed = 1;
};

SiteGraph generate_site(const SiteOptions& opt);

// "uri\tlink1,link2,..." one page per line, dump and load.
std::string serialize_site(const SiteGraph& site);
SiteGraph parse_site(std::istream& in, std::string_view source);

struct SessionOptions {
    double mean_session_len = 30.0;  // population mean requests per user
    double len_jitter = 0.10;        // length varies +/- this fraction
    double restart_prob = 0.10;      // jump back to the entry page
    std::uint32_t gap_seconds = 7;   // mean think time between requests
};

struct WorkloadOptions {
    std::uint32_t num_users = 50;
    std::uint64_t seed = 42;
    Instant start = make_instant({2024, 3, 1, 0, 0, 0});
    std::uint64_t duration_seconds = 21600;  // sessions land inside this
    SessionOptions session{};
};

struct AttackOptions {
    std::string ip = "10.0.0.2";
    std::string target;              // empty = site.deepest_page()
    std::uint32_t attempts = 191;
    std::uint32_t gap_ms = 50;       // flood pacing
    Instant start = make_instant({2024, 3, 1, 3, 0, 0});
};

// One user's browse: a random walk over page links starting at the root,
// with a restart-to-root chance per step. Link choice is uniform over the
// least-visited links of the page; a reader whose every link was already
// read twice starts over at the entry page, so repeat requests concentrate
// there, where the whole crowd shares them. Session length is
// uniform in mean*(1 +/- len_jitter), never below one request; the tight
// spread keeps every user's frequency granularity comparable.
// Referrer = previous page of the walk, absent on entry and restarts.
AccessLog simulate_session(const SiteGraph& site, const std::string& ip,
                           Instant start, Instant hard_end,
                           const SessionOptions& opt, Rng& rng);

// Whole-population crowd, deterministic in (site, options). User ips come
// from user_ip(); logs are merged by timestamp and renumbered.
AccessLog simulate_normal(const SiteGraph& site, const WorkloadOptions& opt);

// Flood: exactly opt.attempts records, one uri, one ip, timestamps
// nondecreasing. Throws UnknownTargetError when an explicit target is not
// a site page.
AccessLog simulate_attack(const SiteGraph& site, const AttackOptions& opt);

// Timestamp-ordered union; the merge is stable and records are untouched.
AccessLog merge_logs(const std::vector<AccessLog>& logs);

std::string user_ip(std::uint32_t user_index);

// Stable per-uri response size for log texture.
std::uint64_t synthetic_bytes(std::string_view uri);

}  // namespace watguard

#endif
