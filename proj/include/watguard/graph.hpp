#ifndef WATGUARD_GRAPH_HPP
#define WATGUARD_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "watguard/wat.hpp"

namespace watguard {

struct Edge {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Directed weighted graph over labelled nodes. Nodes are referenced by
// index into labels.
struct Graph {
    std::vector<std::string> labels;
    std::vector<Edge> edges;      // sorted by (src, dst), no duplicates

    std::size_t size() const { return labels.size(); }
};

struct PageRankResult {
    std::vector<double> scores;   // sums to 1
    std::uint32_t iterations = 0;
    bool converged = true;
};

struct PageRankOptions {
    double damping = 0.85;
    double tol = 1e-10;           // L1 movement per iteration
    std::uint32_t max_iter = 1000;
    std::vector<double> teleport;  // restart distribution; empty = uniform
};

// Power iteration; teleport and dangling mass follow the restart
// distribution (uniform by default). A run that hits max_iter reports
// converged = false rather than throwing.
PageRankResult pagerank(const Graph& g, const PageRankOptions& opt = {});

// Feature embedding of one user: the observed frequency for each trained
// uri in rank order (untouched uri = 0), so all users share one axis set.
struct UserVector {
    std::string user;
    std::vector<double> freqs;
};

// dims 0 = one axis per trained uri; otherwise truncated or zero-padded
// to exactly dims.
std::vector<UserVector> user_vectors(const DocumentMatrix& matrix,
                                     const TrainedWat& wat,
                                     std::uint32_t dims = 0);

double euclidean(const std::vector<double>& a, const std::vector<double>& b);

// k nearest neighbours of every vector by euclidean distance, ties broken
// by index ascending. Throws InvalidKError unless 1 <= k < n.
std::vector<std::vector<std::uint32_t>> knn_indices(
    const std::vector<UserVector>& vecs, std::uint32_t k);

// Union-symmetrized kNN proximity graph with gaussian kernel weights
// exp(-d^2 / (2 sigma^2)). sigma <= 0 selects the median kNN-pair
// distance (1.0 when that median is 0).
Graph proximity_graph(const std::vector<UserVector>& vecs, std::uint32_t k,
                      double sigma = 0.0);

struct ScoredUser {
    std::string user;
    double score = 0.0;
    std::uint32_t rank = 0;       // 1 = most anomalous
};

// Anomaly ranking from the proximity structure: low stationary mass means
// the user sits in a sparse neighbourhood. score = pagerank probability,
// ordered ascending (ties by user ascending), rank 1 = most anomalous.
std::vector<ScoredUser> rank_users_pagerank(const std::vector<UserVector>& vecs,
                                            std::uint32_t k,
                                            const PageRankOptions& opt = {});

// Reference oracle: score = distance to the kth nearest neighbour computed
// exhaustively, ordered descending (ties by user ascending), rank 1 = most
// anomalous.
std::vector<ScoredUser> rank_users_knn_distance(
    const std::vector<UserVector>& vecs, std::uint32_t k);

// Spearman footrule between the trained ranking and a user's own frequency
// ranking over the union of both top-n sets; a uri missing from one side
// sits at rank n+1. 0 = identical ordering.
std::uint64_t rank_shift(const TrainedWat& wat, const UserProfile& profile,
                         std::uint32_t top_n);

// Edge dump, one "src\tdst\tweight" line per edge, node labels resolved.
std::string serialize_edges(const Graph& g);

// Score dump: "user,score,rank" CSV with header.
std::string serialize_scores(const std::vector<ScoredUser>& scores);

}  // namespace watguard

#endif
