#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "watguard/errors.hpp"
#include "watguard/graph.hpp"

using namespace watguard;

namespace {

Graph make_graph(std::size_t n, std::vector<Edge> edges) {
    Graph g;
    for (std::size_t i = 0; i < n; ++i)
        g.labels.push_back("n" + std::to_string(i));
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        if (a.src != b.src) return a.src < b.src;
        return a.dst < b.dst;
    });
    g.edges = std::move(edges);
    return g;
}

std::vector<UserVector> points1d(const std::vector<double>& xs) {
    std::vector<UserVector> out;
    for (std::size_t i = 0; i < xs.size(); ++i)
        out.push_back({"p" + std::to_string(i), {xs[i]}});
    return out;
}

// Full-matrix power iteration written independently of the library code;
// slow and obvious on purpose.
std::vector<double> dense_pagerank(const Graph& g, double d) {
    const std::size_t n = g.size();
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
    std::vector<double> out_sum(n, 0.0);
    for (const Edge& e : g.edges) out_sum[e.src] += e.weight;
    for (std::size_t i = 0; i < n; ++i)
        if (out_sum[i] == 0.0)
            for (std::size_t j = 0; j < n; ++j) p[i][j] = 1.0 / double(n);
    for (const Edge& e : g.edges) p[e.src][e.dst] = e.weight / out_sum[e.src];

    std::vector<double> x(n, 1.0 / double(n)), next(n);
    for (int iter = 0; iter < 20000; ++iter) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += x[i] * p[i][j];
            next[j] = (1.0 - d) / double(n) + d * acc;
        }
        double delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) delta += std::abs(next[j] - x[j]);
        x = next;
        if (delta < 1e-14) break;
    }
    return x;
}

double weight_between(const Graph& g, std::uint32_t a, std::uint32_t b) {
    for (const Edge& e : g.edges)
        if (e.src == a && e.dst == b) return e.weight;
    return -1.0;
}

}  // namespace

TEST_CASE("two backlinks concentrate rank on their target") {
    // A and B each link to C and nothing links back. Solving the damped
    // system by hand (d = 0.85, dangling C spread uniformly) gives
    // A = B = 10/47 and C = 27/47.
    const Graph g = make_graph(3, {{0, 2, 1.0}, {1, 2, 1.0}});
    const PageRankResult res = pagerank(g);

    REQUIRE(res.scores.size() == 3);
    CHECK(res.converged);
    CHECK(res.scores[2] > res.scores[0]);
    CHECK(std::abs(res.scores[0] - res.scores[1]) < 1e-12);
    CHECK(res.scores[0] == doctest::Approx(10.0 / 47.0).epsilon(1e-9));
    CHECK(res.scores[2] == doctest::Approx(27.0 / 47.0).epsilon(1e-9));

    double sum = 0.0;
    for (double s : res.scores) sum += s;
    CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("degenerate graphs") {
    const PageRankResult one = pagerank(make_graph(1, {}));
    REQUIRE(one.scores.size() == 1);
    CHECK(one.scores[0] == doctest::Approx(1.0).epsilon(1e-12));

    const PageRankResult two =
        pagerank(make_graph(2, {{0, 1, 1.0}, {1, 0, 1.0}}));
    CHECK(two.scores[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(two.scores[1] == doctest::Approx(0.5).epsilon(1e-12));

    CHECK(pagerank(Graph{}).scores.empty());
}

TEST_CASE("an exhausted iteration budget is reported, not thrown") {
    PageRankOptions opt;
    opt.max_iter = 1;
    opt.tol = 1e-15;
    const Graph g = make_graph(3, {{0, 2, 1.0}, {1, 2, 1.0}});
    const PageRankResult res = pagerank(g, opt);
    CHECK_FALSE(res.converged);
    CHECK(res.iterations == 1);
    double sum = 0.0;
    for (double s : res.scores) sum += s;
    CHECK(std::abs(sum - 1.0) < 1e-9);  // still a distribution
}

TEST_CASE("a teleport vector biases the restart") {
    PageRankOptions opt;
    opt.teleport = {1.0, 0.0, 0.0};
    const Graph g = make_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}});
    const PageRankResult biased = pagerank(g, opt);
    const PageRankResult uniform = pagerank(g);
    CHECK(biased.scores[0] > uniform.scores[0]);
    double sum = 0.0;
    for (double s : biased.scores) sum += s;
    CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("pagerank agrees with a dense oracle on random graphs") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng() % 11;  // up to 12 nodes
        std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
        std::vector<Edge> edges;
        const std::size_t m = rng() % (n * 2);
        for (std::size_t e = 0; e < m; ++e) {
            const auto src = std::uint32_t(rng() % n);
            const auto dst = std::uint32_t(rng() % n);
            if (src == dst || !seen.insert({src, dst}).second) continue;
            edges.push_back(
                {src, dst, 0.1 + double(rng() % 100) / 25.0});
        }
        const Graph g = make_graph(n, std::move(edges));
        const PageRankResult res = pagerank(g);
        const std::vector<double> want = dense_pagerank(g, 0.85);

        CAPTURE(trial);
        double sum = 0.0;
        for (double s : res.scores) sum += s;
        CHECK(std::abs(sum - 1.0) < 1e-9);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(res.scores[i] - want[i]) < 1e-8);
    }
}

TEST_CASE("user_vectors embeds users on the trained axes") {
    TrainedWat wat;
    wat.rows = {{"/a", 0.6, 0.0, 1, 2}, {"/b", 0.3, 0.0, 2, 2},
                {"/c", 0.1, 0.0, 3, 1}};
    wat.num_users = 2;
    wat.total_logs = 10;

    DocumentMatrix m;
    m.rows.push_back({"u1", "/a", 3, 0.75, 0.6});
    m.rows.push_back({"u1", "/b", 1, 0.25, 0.3});
    m.rows.push_back({"u2", "/zzz", 4, 1.0, std::nullopt});
    m.num_users = 2;

    const auto vecs = user_vectors(m, wat, 0);
    REQUIRE(vecs.size() == 2);
    CHECK(vecs[0].user == "u1");
    CHECK(vecs[0].freqs == std::vector<double>{0.75, 0.25, 0.0});
    // no overlap with the trained axes at all
    CHECK(vecs[1].freqs == std::vector<double>{0.0, 0.0, 0.0});

    // explicit dims pad with zeros past the trained uris
    const auto padded = user_vectors(m, wat, 5);
    REQUIRE(padded[0].freqs.size() == 5);
    CHECK(padded[0].freqs[3] == 0.0);
    CHECK(padded[0].freqs[4] == 0.0);
    const auto truncated = user_vectors(m, wat, 2);
    CHECK(truncated[0].freqs == std::vector<double>{0.75, 0.25});
}

TEST_CASE("knn neighbours by euclidean distance, ties to the lower index") {
    CHECK(euclidean({0.0, 3.0}, {4.0, 0.0}) == 5.0);

    const auto vecs = points1d({0.0, 1.0, 3.0});
    const auto nn = knn_indices(vecs, 1);
    REQUIRE(nn.size() == 3);
    CHECK(nn[0] == std::vector<std::uint32_t>{1});
    CHECK(nn[1] == std::vector<std::uint32_t>{0});  // tie 0 vs 2? no: d=1 < 2
    CHECK(nn[2] == std::vector<std::uint32_t>{1});

    // a genuine tie: 1 is equidistant from 0 and 2
    const auto tie = knn_indices(points1d({-1.0, 0.0, 1.0}), 1);
    CHECK(tie[1] == std::vector<std::uint32_t>{0});

    CHECK_THROWS_AS(knn_indices(vecs, 3), InvalidKError);
    CHECK_THROWS_AS(knn_indices(vecs, 0), InvalidKError);
}

TEST_CASE("proximity graph is union-symmetric with gaussian weights") {
    const auto vecs = points1d({0.0, 1.0, 3.0});
    const Graph g = proximity_graph(vecs, 1);

    // selected pairs: {0,1} (twice) and {1,2}; median pair distance = 1
    REQUIRE(g.edges.size() == 4);  // both directions of two pairs
    CHECK(weight_between(g, 0, 1) == weight_between(g, 1, 0));
    CHECK(weight_between(g, 1, 2) == weight_between(g, 2, 1));
    CHECK(weight_between(g, 0, 2) == -1.0);  // not neighbours

    // sigma = 1 (median), so w(0,1) = exp(-1/2), w(1,2) = exp(-4/2)
    CHECK(weight_between(g, 0, 1) == doctest::Approx(std::exp(-0.5)));
    CHECK(weight_between(g, 1, 2) == doctest::Approx(std::exp(-2.0)));

    // explicit sigma overrides the self-tuning
    const Graph wide = proximity_graph(vecs, 1, 10.0);
    CHECK(weight_between(wide, 0, 1) ==
          doctest::Approx(std::exp(-1.0 / 200.0)));

    // duplicate points sit at distance 0: weight exactly 1
    const Graph dup = proximity_graph(points1d({2.0, 2.0, 9.0}), 1);
    CHECK(weight_between(dup, 0, 1) == 1.0);
}

TEST_CASE("pagerank ranking puts sparse neighbourhoods first") {
    // 9 users bunched together, one far out
    std::vector<double> xs(9, 0.0);
    for (std::size_t i = 0; i < 9; ++i) xs[i] = 0.01 * double(i);
    xs.push_back(5.0);
    const auto vecs = points1d(xs);

    const auto ranked = rank_users_pagerank(vecs, 2);
    REQUIRE(ranked.size() == 10);
    CHECK(ranked[0].user == "p9");  // the flooder
    CHECK(ranked[0].rank == 1);
    CHECK(ranked[0].score < ranked[1].score);

    const auto oracle = rank_users_knn_distance(vecs, 2);
    CHECK(oracle[0].user == "p9");
    CHECK(oracle[0].score > oracle[1].score);
}

TEST_CASE("kth-nn distance oracle on the line") {
    const auto vecs = points1d({0.0, 1.0, 2.0, 10.0});
    const auto ranked = rank_users_knn_distance(vecs, 1);
    REQUIRE(ranked.size() == 4);
    CHECK(ranked[0].user == "p3");
    CHECK(ranked[0].score == 8.0);  // nearest neighbour of 10 is 2
    CHECK(ranked[0].rank == 1);

    // all identical: distances 0, ties fall back to label order
    const auto flat = rank_users_knn_distance(points1d({4.0, 4.0, 4.0}), 1);
    CHECK(flat[0].user == "p0");
    CHECK(flat[0].score == 0.0);
    CHECK(flat[2].rank == 3);
}

TEST_CASE("score ordering is ascending with label tie-break") {
    // hand-built vectors giving distinct pagerank mass
    const auto vecs = points1d({0.0, 0.1, 0.2, 7.0});
    const auto ranked = rank_users_pagerank(vecs, 1);
    for (std::size_t i = 1; i < ranked.size(); ++i) {
        CHECK(ranked[i - 1].score <= ranked[i].score);
        CHECK(ranked[i].rank == i + 1);
    }
}

TEST_CASE("edge and score dumps are line-oriented") {
    Graph g = make_graph(2, {{0, 1, 0.5}, {1, 0, 0.5}});
    g.labels = {"alice", "bob"};
    const std::string edges = serialize_edges(g);
    CHECK(edges.find("alice\tbob\t0.5\n") != std::string::npos);
    CHECK(edges.find("bob\talice\t0.5\n") != std::string::npos);

    const std::string scores =
        serialize_scores({{"u9", 0.125, 1}, {"u2", 0.875, 2}});
    CHECK(scores.rfind("user,score,rank\n", 0) == 0);
    CHECK(scores.find("u9,0.125,1\n") != std::string::npos);
    CHECK(scores.find("u2,0.875,2\n") != std::string::npos);
}
