#include "watguard/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "watguard/errors.hpp"

namespace watguard {

namespace {

// (distance, index) pairs to every other point, k smallest first.
std::vector<std::pair<double, std::uint32_t>> nearest(
    const std::vector<UserVector>& vecs, std::uint32_t i, std::uint32_t k) {
    std::vector<std::pair<double, std::uint32_t>> dists;
    dists.reserve(vecs.size() - 1);
    for (std::uint32_t j = 0; j < vecs.size(); ++j)
        if (j != i)
            dists.emplace_back(euclidean(vecs[i].freqs, vecs[j].freqs), j);
    std::partial_sort(dists.begin(), dists.begin() + k, dists.end());
    dists.resize(k);
    return dists;
}

void require_valid_k(std::size_t n, std::uint32_t k) {
    if (k < 1 || k >= n)
        throw InvalidKError("k=" + std::to_string(k) +
                            " out of range for " + std::to_string(n) +
                            " points");
}

}  // namespace

PageRankResult pagerank(const Graph& g, const PageRankOptions& opt) {
    const std::size_t n = g.size();
    PageRankResult res;
    if (n == 0) return res;

    std::vector<double> out_sum(n, 0.0);
    for (const Edge& e : g.edges) out_sum[e.src] += e.weight;

    std::vector<double> rank(n, 1.0 / double(n));
    std::vector<double> next(n);
    const double d = opt.damping;
    const bool custom_restart = opt.teleport.size() == n;

    for (std::uint32_t iter = 1; iter <= opt.max_iter; ++iter) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (out_sum[i] == 0.0) dangling += rank[i];

        // Teleport mass plus the dangling mass, spread by the restart
        // distribution (uniform unless a teleport vector was given).
        const double loose = (1.0 - d) + d * dangling;
        for (std::size_t i = 0; i < n; ++i)
            next[i] = loose *
                      (custom_restart ? opt.teleport[i] : 1.0 / double(n));
        for (const Edge& e : g.edges)
            if (out_sum[e.src] > 0.0)  // zero-weight sources are dangling
                next[e.dst] += d * rank[e.src] * e.weight / out_sum[e.src];

        double total = 0.0;
        for (double v : next) total += v;
        for (double& v : next) v /= total;

        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            delta += std::abs(next[i] - rank[i]);
        rank.swap(next);
        res.iterations = iter;
        if (delta < opt.tol) {
            res.scores = std::move(rank);
            return res;
        }
    }
    res.converged = false;
    res.scores = std::move(rank);
    return res;
}

std::vector<UserVector> user_vectors(const DocumentMatrix& matrix,
                                     const TrainedWat& wat,
                                     std::uint32_t dims) {
    const std::uint32_t d =
        dims == 0 ? std::uint32_t(wat.rows.size()) : dims;
    std::unordered_map<std::string_view, std::uint32_t> axis;
    for (std::uint32_t j = 0; j < wat.rows.size() && j < d; ++j)
        axis.emplace(wat.rows[j].uri, j);  // rows are in rank order

    std::vector<UserVector> out;
    for (std::size_t lo = 0; lo < matrix.rows.size();) {
        std::size_t hi = lo;
        UserVector v;
        v.user = matrix.rows[lo].user;
        v.freqs.assign(d, 0.0);
        while (hi < matrix.rows.size() &&
               matrix.rows[hi].user == v.user) {
            const auto it = axis.find(matrix.rows[hi].uri);
            if (it != axis.end())
                v.freqs[it->second] = matrix.rows[hi].observed_freq;
            ++hi;
        }
        out.push_back(std::move(v));
        lo = hi;
    }
    return out;
}

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

std::vector<std::vector<std::uint32_t>> knn_indices(
    const std::vector<UserVector>& vecs, std::uint32_t k) {
    require_valid_k(vecs.size(), k);
    std::vector<std::vector<std::uint32_t>> out(vecs.size());
    for (std::uint32_t i = 0; i < vecs.size(); ++i) {
        const auto near = nearest(vecs, i, k);
        out[i].reserve(k);
        for (const auto& [dist, j] : near) out[i].push_back(j);
    }
    return out;
}

Graph proximity_graph(const std::vector<UserVector>& vecs, std::uint32_t k,
                      double sigma) {
    require_valid_k(vecs.size(), k);

    std::vector<double> pair_dists;
    pair_dists.reserve(vecs.size() * k);
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> pairs;
    for (std::uint32_t i = 0; i < vecs.size(); ++i) {
        for (const auto& [dist, j] : nearest(vecs, i, k)) {
            pair_dists.push_back(dist);
            pairs.emplace(std::minmax(i, j), dist);
        }
    }

    if (sigma <= 0.0) {
        // Self-tuning bandwidth: the median selected-pair distance.
        std::sort(pair_dists.begin(), pair_dists.end());
        sigma = pair_dists[(pair_dists.size() - 1) / 2];
        if (sigma == 0.0) sigma = 1.0;
    }

    Graph g;
    g.labels.reserve(vecs.size());
    for (const UserVector& v : vecs) g.labels.push_back(v.user);
    g.edges.reserve(pairs.size() * 2);
    for (const auto& [pair, dist] : pairs) {
        // The kernel underflows to 0 for points far outside the bandwidth;
        // floor it so edge weights stay positive and no node ends up with
        // a zero out-weight sum.
        const double w =
            std::max(std::exp(-(dist * dist) / (2.0 * sigma * sigma)),
                     std::numeric_limits<double>::min());
        g.edges.push_back(Edge{pair.first, pair.second, w});
        g.edges.push_back(Edge{pair.second, pair.first, w});
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const Edge& a, const Edge& b) {
                  return a.src != b.src ? a.src < b.src : a.dst < b.dst;
              });
    return g;
}

std::vector<ScoredUser> rank_users_pagerank(const std::vector<UserVector>& vecs,
                                            std::uint32_t k,
                                            const PageRankOptions& opt) {
    const Graph g = proximity_graph(vecs, k);
    const PageRankResult pr = pagerank(g, opt);

    std::vector<ScoredUser> out;
    out.reserve(vecs.size());
    for (std::uint32_t i = 0; i < vecs.size(); ++i)
        out.push_back(ScoredUser{g.labels[i], pr.scores[i], 0});
    std::sort(out.begin(), out.end(),
              [](const ScoredUser& a, const ScoredUser& b) {
                  return a.score != b.score ? a.score < b.score
                                            : a.user < b.user;
              });
    for (std::uint32_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
    return out;
}

std::vector<ScoredUser> rank_users_knn_distance(
    const std::vector<UserVector>& vecs, std::uint32_t k) {
    require_valid_k(vecs.size(), k);
    std::vector<ScoredUser> out;
    out.reserve(vecs.size());
    for (std::uint32_t i = 0; i < vecs.size(); ++i)
        out.push_back(
            ScoredUser{vecs[i].user, nearest(vecs, i, k).back().first, 0});
    std::sort(out.begin(), out.end(),
              [](const ScoredUser& a, const ScoredUser& b) {
                  return a.score != b.score ? a.score > b.score
                                            : a.user < b.user;
              });
    for (std::uint32_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
    return out;
}

std::uint64_t rank_shift(const TrainedWat& wat, const UserProfile& profile,
                         std::uint32_t top_n) {
    std::map<std::string_view, std::uint64_t> trained_rank;
    for (const WatRow& row : wat.rows) {
        if (row.rank > top_n) break;
        trained_rank.emplace(row.uri, row.rank);
    }

    // The user's own ranking: count descending, uri ascending.
    std::vector<std::pair<std::string_view, std::uint64_t>> mine(
        profile.counts.begin(), profile.counts.end());
    std::sort(mine.begin(), mine.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::map<std::string_view, std::uint64_t> row_rank;
    for (std::uint64_t i = 0; i < mine.size() && i < top_n; ++i)
        row_rank.emplace(mine[i].first, i + 1);

    const std::uint64_t missing = top_n + 1;
    std::uint64_t shift = 0;
    for (const auto& [uri, rank] : trained_rank) {
        const auto it = row_rank.find(uri);
        const std::uint64_t other = it != row_rank.end() ? it->second : missing;
        shift += rank > other ? rank - other : other - rank;
    }
    for (const auto& [uri, rank] : row_rank)
        if (!trained_rank.count(uri))
            shift += missing > rank ? missing - rank : rank - missing;
    return shift;
}

std::string serialize_edges(const Graph& g) {
    std::string out;
    for (const Edge& e : g.edges) {
        out += g.labels[e.src];
        out.push_back('\t');
        out += g.labels[e.dst];
        out.push_back('\t');
        out += fmt_g12(e.weight);
        out.push_back('\n');
    }
    return out;
}

std::string serialize_scores(const std::vector<ScoredUser>& scores) {
    std::string out = "user,score,rank\n";
    for (const ScoredUser& s : scores) {
        out += s.user;
        out.push_back(',');
        out += fmt_g12(s.score);
        out.push_back(',');
        out += std::to_string(s.rank);
        out.push_back('\n');
    }
    return out;
}

}  // namespace watguard
