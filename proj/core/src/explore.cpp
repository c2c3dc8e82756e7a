#include "argo/explore.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "argo/error.hpp"

namespace argo {

std::vector<PaperSummary> order_candidates(std::vector<PaperSummary> candidates, Strategy strategy) {
    switch (strategy) {
    case Strategy::upstream_order:
        break;
    case Strategy::citation_count_desc:
        std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
            if (a.citation_count != b.citation_count) return a.citation_count > b.citation_count;
            return a.corpus_id < b.corpus_id;
        });
        break;
    case Strategy::recency_desc:
        std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
            if (a.year != b.year) {
                if (!a.year) return false;
                if (!b.year) return true;
                return *a.year > *b.year;
            }
            return a.corpus_id < b.corpus_id;
        });
        break;
    }
    return candidates;
}

Explorer::Explorer(ScholarClient& client, ExplorerOptions options)
    : client_(client), options_(std::move(options)) {
    options_.layout.validate();
    if (options_.candidate_window < 1) {
        throw Error(Errc::invalid_argument, "candidate_window must be >= 1");
    }
}

bool Explorer::seed(Exploration& state, CorpusId id) const {
    auto record = client_.fetch_paper(id);
    auto network = state.network;
    bool added = network.add_paper(std::move(record.paper));
    if (added) network.place(id, place_seed(network, options_.layout));
    state.network = std::move(network);
    return added;
}

namespace {

struct Batch {
    std::vector<PaperSummary> items;
    int next_cursor = 0;
    bool exhausted = false;
};

} // namespace

ExpansionResult Explorer::expand(Exploration& state, const ExpansionRequest& request) const {
    if (request.batch_size < 1) {
        throw Error(Errc::invalid_argument,
                    fmt::format("batch_size must be >= 1, got {}", request.batch_size));
    }
    if (!state.network.contains(request.node)) {
        throw Error(Errc::unknown_paper,
                    fmt::format("paper {} is not in the network", raw(request.node)));
    }

    const CursorKey key{request.node, request.direction};
    int cursor = 0;
    if (auto it = state.cursors.find(key); it != state.cursors.end() &&
                                           it->second.strategy == request.strategy) {
        cursor = it->second.offset;
    }

    Batch batch;
    if (request.strategy == Strategy::upstream_order) {
        auto page = client_.fetch_linked(request.node, request.direction, request.batch_size, cursor);
        batch.items = std::move(page.items);
        batch.next_cursor = page.next_offset();
        batch.exhausted = page.exhausted();
    } else {
        // Sort one window of candidates locally; the cursor walks the sorted
        // window and jumps to the next upstream window once it is used up.
        const int window = std::max(options_.candidate_window, request.batch_size);
        const int start = (cursor / window) * window;
        auto page = client_.fetch_linked(request.node, request.direction, window, start);
        auto sorted = order_candidates(std::move(page.items), request.strategy);
        const auto local = static_cast<std::size_t>(cursor - start);
        const auto end = std::min(sorted.size(), local + static_cast<std::size_t>(request.batch_size));
        if (local < end) {
            batch.items.assign(sorted.begin() + static_cast<std::ptrdiff_t>(local),
                               sorted.begin() + static_cast<std::ptrdiff_t>(end));
        }
        if (end >= sorted.size()) {
            batch.next_cursor = page.next_offset();
            batch.exhausted = page.exhausted();
        } else {
            batch.next_cursor = cursor + static_cast<int>(end - local);
            batch.exhausted = false;
        }
    }
    std::erase_if(batch.items, [&](const PaperSummary& s) { return s.corpus_id == request.node; });

    std::vector<Paper> fresh;
    for (const auto& s : batch.items) {
        if (!state.network.contains(s.corpus_id)) fresh.push_back(client_.fetch_paper(s.corpus_id).paper);
    }

    // Nothing below talks to the network; build the new state on a copy.
    auto network = state.network;
    ExpansionResult result;
    for (auto& paper : fresh) {
        result.added_papers.push_back(paper.corpus_id);
        network.add_paper(std::move(paper));
    }
    if (!result.added_papers.empty()) {
        auto parent = network.location(request.node)
                          .value_or(initial_position(request.node, options_.layout));
        auto slots = place_expansion(parent, static_cast<int>(result.added_papers.size()),
                                     options_.layout);
        for (std::size_t i = 0; i < slots.size(); ++i) network.place(result.added_papers[i], slots[i]);
    }
    for (const auto& s : batch.items) {
        CitationEdge edge = request.direction == Direction::references
                                ? CitationEdge{request.node, s.corpus_id}
                                : CitationEdge{s.corpus_id, request.node};
        if (network.add_edge(edge)) result.added_edges.push_back(edge);
    }
    if (options_.relax_after_expand && !result.added_papers.empty()) {
        std::set<CorpusId> held;
        for (const auto& [id, p] : network.papers()) held.insert(id);
        for (auto id : result.added_papers) held.erase(id);
        apply_layout(network, options_.layout, held);
    }

    result.cursor = batch.next_cursor;
    result.exhausted = batch.exhausted;
    state.network = std::move(network);
    state.cursors[key] = Cursor{request.strategy, batch.next_cursor};
    return result;
}

StyleConfig toggle_edge_direction_display(StyleConfig style) {
    style.show_edge_direction = !style.show_edge_direction;
    return style;
}

Snapshot to_snapshot(const Exploration& state, std::string name, std::chrono::sys_seconds created_at,
                     const LayoutParams& layout) {
    Snapshot s;
    s.name = std::move(name);
    s.created_at = created_at;
    s.style = state.style;
    for (const auto& [id, paper] : state.network.papers()) {
        auto at = state.network.location(id).value_or(initial_position(id, layout));
        s.nodes.push_back({paper, at.x, at.y, state.network.pinned(id)});
    }
    s.edges.assign(state.network.edges().begin(), state.network.edges().end());
    for (const auto& [key, cursor] : state.cursors) {
        if (!state.network.contains(key.node)) continue;
        s.cursors.push_back({key.node, key.direction, cursor.offset, cursor.strategy});
    }
    return canonicalize(std::move(s));
}

Exploration from_snapshot(const Snapshot& snapshot, PageRankParams pagerank) {
    validate(snapshot);
    Exploration state{CitationNetwork(pagerank), snapshot.style, {}};
    std::vector<Paper> papers;
    for (const auto& node : snapshot.nodes) papers.push_back(node.paper);
    state.network.merge(std::move(papers), snapshot.edges);
    for (const auto& node : snapshot.nodes) {
        state.network.place(node.paper.corpus_id, {node.x, node.y});
        if (node.pinned) state.network.set_pinned(node.paper.corpus_id, true);
    }
    for (const auto& c : snapshot.cursors) {
        state.cursors[{c.corpus_id, c.direction}] = {c.strategy, c.offset};
    }
    return state;
}

} // namespace argo
