#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "argo/paper.hpp"

namespace argo {

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

struct Position {
    double x = 0.0;
    double y = 0.0;
    bool pinned = false;

    bool operator==(const Position&) const = default;
};

struct DegreeRecord {
    int in_degree = 0;
    int out_degree = 0;

    int degree() const noexcept { return in_degree + out_degree; }
    bool operator==(const DegreeRecord&) const = default;
};

struct NodeMetrics {
    int in_degree = 0;
    int out_degree = 0;
    int degree = 0;
    double pagerank = 0.0;

    bool operator==(const NodeMetrics&) const = default;
};

struct PageRankParams {
    double damping = 0.85;
    double tolerance = 1e-10;
    int max_iterations = 100;

    bool operator==(const PageRankParams&) const = default;
};

// A personalized citation graph. Nodes are keyed by CorpusId, edges are a
// set (no parallel edges, no self-loops) and every edge endpoint is a node.
// Degree and PageRank metrics are recomputed after each mutation.
//
// Node locations are optional: a paper added without one is "unplaced" until
// a layout pass or an explicit place() assigns coordinates. Pin flags are
// independent of placement.
//
// Not internally synchronized; one writer at a time.
class CitationNetwork {
public:
    CitationNetwork() = default;
    explicit CitationNetwork(PageRankParams params);

    // Inserts or refreshes metadata. Edges, location and pin survive a refresh.
    // Returns true when the paper was not present before.
    bool add_paper(Paper paper);

    // Returns false when the edge already existed.
    bool add_edge(CorpusId source, CorpusId target);
    bool add_edge(CitationEdge edge) { return add_edge(edge.source, edge.target); }
    bool remove_edge(CorpusId source, CorpusId target);

    // Bulk insert with a single metrics refresh. Everything is checked before
    // anything is inserted, so a bad paper or edge leaves the network as it was.
    void merge(std::vector<Paper> papers, const std::vector<CitationEdge>& edges);

    // Removes the node, its incident edges, location and pin.
    void remove_paper(CorpusId id);

    bool contains(CorpusId id) const { return papers_.contains(id); }
    bool contains_edge(CitationEdge edge) const { return edges_.contains(edge); }
    std::size_t size() const noexcept { return papers_.size(); }
    bool empty() const noexcept { return papers_.empty(); }

    const Paper& paper(CorpusId id) const;
    const std::map<CorpusId, Paper>& papers() const noexcept { return papers_; }
    const std::set<CitationEdge>& edges() const noexcept { return edges_; }

    const NodeMetrics& metrics(CorpusId id) const;
    const std::map<CorpusId, NodeMetrics>& metrics() const noexcept { return metrics_; }

    std::optional<Point> location(CorpusId id) const;
    const std::map<CorpusId, Point>& locations() const noexcept { return locations_; }
    void place(CorpusId id, Point at);

    bool pinned(CorpusId id) const;
    const std::set<CorpusId>& pinned_nodes() const noexcept { return pinned_; }
    void set_pinned(CorpusId id, bool pinned);

    // Location (origin when unplaced) plus pin flag.
    Position position(CorpusId id) const;

    const PageRankParams& pagerank_params() const noexcept { return params_; }
    void set_pagerank_params(PageRankParams params);

    bool operator==(const CitationNetwork&) const = default;

private:
    void require(CorpusId id) const;
    void refresh_metrics();

    PageRankParams params_;
    std::map<CorpusId, Paper> papers_;
    std::set<CitationEdge> edges_;
    std::map<CorpusId, NodeMetrics> metrics_;
    std::map<CorpusId, Point> locations_;
    std::set<CorpusId> pinned_;
};

std::map<CorpusId, DegreeRecord> compute_degrees(const CitationNetwork& network);

// Power iteration with uniform teleport; dangling mass is spread uniformly.
// Stops when the L1 change falls below tolerance or after max_iterations.
// Throws Error{empty_network} for an empty graph and Error{invalid_argument}
// unless 0 < damping < 1.
std::map<CorpusId, double> compute_pagerank(const CitationNetwork& network,
                                            const PageRankParams& params = {});

} // namespace argo
