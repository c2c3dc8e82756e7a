#pragma once

#include <chrono>
#include <compare>
#include <map>
#include <string>
#include <vector>

#include "argo/graph.hpp"
#include "argo/layout.hpp"
#include "argo/scholar_client.hpp"
#include "argo/snapshot.hpp"
#include "argo/style.hpp"

namespace argo {

struct ExpansionRequest {
    CorpusId node{};
    Direction direction = Direction::references;
    int batch_size = 5;
    Strategy strategy = Strategy::upstream_order;
};

struct ExpansionResult {
    std::vector<CorpusId> added_papers;
    std::vector<CitationEdge> added_edges;
    int cursor = 0;  // next offset for this node and direction
    bool exhausted = false;

    bool operator==(const ExpansionResult&) const = default;
};

struct CursorKey {
    CorpusId node{};
    Direction direction = Direction::references;

    auto operator<=>(const CursorKey&) const = default;
};

struct Cursor {
    Strategy strategy = Strategy::upstream_order;
    int offset = 0;

    bool operator==(const Cursor&) const = default;
};

using CursorTable = std::map<CursorKey, Cursor>;

// Everything a user builds up while exploring: the graph, its styling and
// how far each listing has been paged.
struct Exploration {
    CitationNetwork network;
    StyleConfig style;
    CursorTable cursors;

    bool operator==(const Exploration&) const = default;
};

struct ExplorerOptions {
    // Candidates fetched per window for the sorting strategies; raised to
    // batch_size when smaller.
    int candidate_window = 50;
    LayoutParams layout;
    // Relax new nodes with the rest held in place after each expansion. Off by
    // default so the new column keeps its vertical alignment.
    bool relax_after_expand = false;
};

// Applies strategy order to a candidate list. Ties (and missing years, which
// sort last) break by ascending corpus id.
std::vector<PaperSummary> order_candidates(std::vector<PaperSummary> candidates, Strategy strategy);

class Explorer {
public:
    explicit Explorer(ScholarClient& client, ExplorerOptions options = {});

    // Fetches the paper and adds it as a node without edges. A new node is
    // placed with place_seed(); a known one only has its metadata refreshed.
    // Returns true when the paper was new. Leaves `state` untouched on error.
    bool seed(Exploration& state, CorpusId id) const;

    // Adds the next batch of linked papers for one node. Already-present
    // papers count against the batch and only get their missing edge. Edges
    // always point citing -> cited. All upstream fetches happen before the
    // state is touched, so any error leaves `state` unchanged.
    ExpansionResult expand(Exploration& state, const ExpansionRequest& request) const;

    const ExplorerOptions& options() const noexcept { return options_; }

private:
    ScholarClient& client_;
    ExplorerOptions options_;
};

// Flips show_edge_direction only.
StyleConfig toggle_edge_direction_display(StyleConfig style);

Snapshot to_snapshot(const Exploration& state, std::string name,
                     std::chrono::sys_seconds created_at, const LayoutParams& layout = {});
Exploration from_snapshot(const Snapshot& snapshot, PageRankParams pagerank = {});

} // namespace argo
